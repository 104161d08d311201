#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mzsim {

using EntityId = int;

/// The outside is a zone like any other, with this reserved id.
inline constexpr EntityId kOutside = 0;

struct Site {
    double latitude = 0.0;   // degrees, north positive
    double longitude = 0.0;  // degrees, east positive
    double altitude = 0.0;   // m
    double albedo = 0.2;
    double time_zone_offset = 0.0;  // hours from UTC
};

struct Zone {
    EntityId id = 1;
    std::string name;
    double volume = 1.0;                     // m3
    double air_capacitance_multiplier = 1.0;  // furniture inertia
    double initial_temperature = 20.0;        // C
    double initial_humidity_ratio = 0.008;    // kg/kg
    double sensible_gain = 0.0;               // W, constant internal gain
    double latent_gain = 0.0;                 // W
    double infiltration_ach = 0.0;            // 1/h, used by prescribed airflow
};

struct Interambiance {
    EntityId id = 1;
    EntityId zone_a = 1;
    EntityId zone_b = kOutside;
    double azimuth = 180.0;  // outward normal of the side facing zone_b, degrees from north
    double tilt = 90.0;      // 0 = horizontal facing up, 90 = vertical

    bool faces_outside() const { return zone_a == kOutside || zone_b == kOutside; }
    /// The non-outside zone of an outside-facing separation.
    EntityId inner_zone() const { return zone_a == kOutside ? zone_b : zone_a; }
};

enum class ComponentKind { Wall, Window, HvacSplit, AirlinkCrack, AirlinkLargeOpening };

enum class SurfaceClass { Floor, Ceiling, VerticalWall, Window, InteriorSeparation };

const char* to_string(ComponentKind kind);
const char* to_string(SurfaceClass cls);

struct WallLayer {
    double thickness = 0.1;       // m
    double conductivity = 1.0;    // W/(m K)
    double density = 1000.0;      // kg/m3
    double specific_heat = 1000.0;  // J/(kg K)
};

struct SurfaceProperties {
    double sw_absorptance = 0.6;
    double sw_reflectance = 0.4;
    double lw_emissivity = 0.9;
};

struct Glazing {
    double transmittance = 0.6;
    double u_value = 5.8;  // W/(m2 K), glass surface to glass surface
};

/// Split-system air conditioner parameters.
struct SplitUnitSpec {
    double rated_total_capacity = 3000.0;  // W
    double rated_shr = 0.75;
    double rated_electric_power = 1150.0;  // W
    double time_constant = 300.0;           // s
    double setpoint = 25.0;                 // C
    double deadband = 1.0;                  // K
    /// Affine performance map, coefficients {c0, c_Tout, c_Tin, c_win}; empty when unfitted.
    std::vector<double> map_total;
    std::vector<double> map_sensible;
    std::vector<double> map_electric;
    std::string map_csv;  // source of a fitted map, when given as a file
};

struct CrackSpec {
    double coefficient = 0.001;  // kg/(s Pa^n)
    double exponent = 0.65;
};

struct LargeOpeningSpec {
    double width = 1.0;
    double height = 2.0;
    double discharge_coefficient = 0.78;
};

struct Component {
    EntityId id = 1;
    ComponentKind kind = ComponentKind::Wall;
    /// Interambiance for walls, windows and air links; zone for HVAC units.
    EntityId interambiance_id = 0;
    EntityId zone_id = 0;
    double area = 1.0;  // m2
    SurfaceClass surface_class = SurfaceClass::VerticalWall;
    std::vector<WallLayer> layers;  // from zone_a side to zone_b side
    Glazing glazing;
    SurfaceProperties face_a;  // faces zone_a
    SurfaceProperties face_b;  // faces zone_b
    bool ground_contact = false;
    std::optional<EntityId> host_wall;  // windows: wall whose conductive area shrinks

    // air links
    CrackSpec crack;
    LargeOpeningSpec opening;
    double elevation = 0.0;  // crack height or opening bottom, m above datum
    std::optional<double> wind_pressure_coefficient;
    double prescribed_exchange = 0.0;  // kg/s each way, prescribed airflow

    SplitUnitSpec hvac;

    bool attaches_to_interambiance() const { return kind != ComponentKind::HvacSplit; }
    bool is_surface() const { return kind == ComponentKind::Wall || kind == ComponentKind::Window; }
    bool is_airlink() const {
        return kind == ComponentKind::AirlinkCrack || kind == ComponentKind::AirlinkLargeOpening;
    }
};

struct Building {
    std::string name;
    std::string morphology;  // free-text tag
    Site site;
    std::vector<Zone> zones;
    std::vector<Interambiance> interambiances;
    std::vector<Component> components;

    const Zone* find_zone(EntityId id) const;
    const Interambiance* find_interambiance(EntityId id) const;
    const Component* find_component(EntityId id) const;
    /// Position of the zone in `zones`; throws for unknown ids.
    std::size_t zone_index(EntityId id) const;
};

enum class Severity { Warning, Error };

struct ValidationIssue {
    Severity severity = Severity::Error;
    std::string entity;  // e.g. "component 17"
    std::string message;
    int line = 0;  // position in the source file, when known
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    std::size_t error_count() const;
    std::size_t warning_count() const;
    bool ok() const { return error_count() == 0; }
};

ValidationReport validate_building(const Building& b);

struct ZoneGraph {
    struct Edge {
        EntityId interambiance = 0;
        EntityId a = 0;
        EntityId b = 0;
        std::vector<EntityId> components;
    };
    std::vector<EntityId> vertices;  // zone ids, kOutside included when used
    std::vector<Edge> edges;
    /// Components attached to zones directly (HVAC units), keyed by position in `vertices`.
    std::vector<std::vector<EntityId>> vertex_components;
};

/// Throws Error(InvalidInput) when the building does not validate.
ZoneGraph topology(const Building& b);

/// Conductive area of a wall after removing hosted windows.
double net_wall_area(const Building& b, const Component& wall);

}  // namespace mzsim
