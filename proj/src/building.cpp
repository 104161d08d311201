#include "mzsim/building.hpp"

#include "mzsim/error.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <set>

namespace mzsim {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidInput: return "INVALID_INPUT";
    case ErrorCode::LevelMismatch: return "LEVEL_MISMATCH";
    case ErrorCode::UnknownVariant: return "UNKNOWN_VARIANT";
    case ErrorCode::MissingField: return "MISSING_FIELD";
    case ErrorCode::NonConvergence: return "NON_CONVERGENCE";
    case ErrorCode::SingularJacobian: return "SINGULAR_JACOBIAN";
    case ErrorCode::SingularSystem: return "SINGULAR_SYSTEM";
    case ErrorCode::NoFloorSurface: return "NO_FLOOR_SURFACE";
    case ErrorCode::RankDeficient: return "RANK_DEFICIENT";
    case ErrorCode::UnfittedMap: return "UNFITTED_MAP";
    case ErrorCode::WeatherGap: return "WEATHER_GAP";
    case ErrorCode::Schema: return "SCHEMA";
    case ErrorCode::Semantic: return "SEMANTIC";
    case ErrorCode::MissingSeries: return "MISSING_SERIES";
    }
    return "UNKNOWN";
}

const char* to_string(ComponentKind kind) {
    switch (kind) {
    case ComponentKind::Wall: return "wall";
    case ComponentKind::Window: return "window";
    case ComponentKind::HvacSplit: return "hvac_split";
    case ComponentKind::AirlinkCrack: return "crack";
    case ComponentKind::AirlinkLargeOpening: return "large_opening";
    }
    return "?";
}

const char* to_string(SurfaceClass cls) {
    switch (cls) {
    case SurfaceClass::Floor: return "floor";
    case SurfaceClass::Ceiling: return "ceiling";
    case SurfaceClass::VerticalWall: return "vertical_wall";
    case SurfaceClass::Window: return "window";
    case SurfaceClass::InteriorSeparation: return "interior_separation";
    }
    return "?";
}

const Zone* Building::find_zone(EntityId id) const {
    auto it = std::find_if(zones.begin(), zones.end(), [id](const Zone& z) { return z.id == id; });
    return it == zones.end() ? nullptr : &*it;
}

const Interambiance* Building::find_interambiance(EntityId id) const {
    auto it = std::find_if(interambiances.begin(), interambiances.end(),
                           [id](const Interambiance& i) { return i.id == id; });
    return it == interambiances.end() ? nullptr : &*it;
}

const Component* Building::find_component(EntityId id) const {
    auto it = std::find_if(components.begin(), components.end(),
                           [id](const Component& c) { return c.id == id; });
    return it == components.end() ? nullptr : &*it;
}

std::size_t Building::zone_index(EntityId id) const {
    for (std::size_t i = 0; i < zones.size(); ++i)
        if (zones[i].id == id) return i;
    throw Error(ErrorCode::InvalidInput, fmt::format("unknown zone {}", id));
}

std::size_t ValidationReport::error_count() const {
    return std::count_if(issues.begin(), issues.end(),
                         [](const ValidationIssue& i) { return i.severity == Severity::Error; });
}

std::size_t ValidationReport::warning_count() const {
    return issues.size() - error_count();
}

namespace {

class Reporter {
public:
    explicit Reporter(ValidationReport& r) : report_(r) {}

    void error(std::string entity, std::string message) {
        report_.issues.push_back({Severity::Error, std::move(entity), std::move(message)});
    }
    void warning(std::string entity, std::string message) {
        report_.issues.push_back({Severity::Warning, std::move(entity), std::move(message)});
    }

private:
    ValidationReport& report_;
};

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void check_face(Reporter& r, const std::string& who, const char* face, const SurfaceProperties& p) {
    if (!in_unit(p.sw_absorptance) || !in_unit(p.sw_reflectance) || !in_unit(p.lw_emissivity))
        r.error(who, fmt::format("{}: radiative properties must lie in [0,1]", face));
    if (p.sw_absorptance + p.sw_reflectance > 1.0 + 1e-12)
        r.error(who, fmt::format("{}: absorptance {} + reflectance {} exceeds 1", face,
                                 p.sw_absorptance, p.sw_reflectance));
}

}  // namespace

ValidationReport validate_building(const Building& b) {
    ValidationReport report;
    Reporter r(report);

    if (b.zones.empty()) r.error("building", "at least one zone is required");
    if (b.site.latitude < -90.0 || b.site.latitude > 90.0)
        r.error("site", fmt::format("latitude {} outside [-90, 90]", b.site.latitude));
    if (!in_unit(b.site.albedo)) r.error("site", fmt::format("albedo {} outside [0, 1]", b.site.albedo));

    std::set<EntityId> zone_ids;
    for (const auto& z : b.zones) {
        auto who = fmt::format("zone {}", z.id);
        if (z.id == kOutside) r.error(who, "id 0 is reserved for the outside");
        if (!zone_ids.insert(z.id).second) r.error(who, "duplicate zone id");
        if (!(z.volume > 0.0)) r.error(who, "volume must be positive");
        if (z.air_capacitance_multiplier < 1.0) r.error(who, "air capacitance multiplier must be >= 1");
        if (z.initial_humidity_ratio < 0.0 || z.initial_humidity_ratio > 0.1)
            r.error(who, "initial humidity ratio outside [0, 0.1]");
        if (z.infiltration_ach < 0.0) r.error(who, "infiltration must be non-negative");
    }

    auto zone_known = [&](EntityId id) { return id == kOutside || zone_ids.count(id) > 0; };

    std::set<EntityId> ia_ids;
    for (const auto& ia : b.interambiances) {
        auto who = fmt::format("interambiance {}", ia.id);
        if (!ia_ids.insert(ia.id).second) r.error(who, "duplicate interambiance id");
        if (ia.zone_a == ia.zone_b) r.error(who, "both sides reference the same zone");
        if (!zone_known(ia.zone_a)) r.error(who, fmt::format("references missing zone {}", ia.zone_a));
        if (!zone_known(ia.zone_b)) r.error(who, fmt::format("references missing zone {}", ia.zone_b));
        if (ia.tilt < 0.0 || ia.tilt > 180.0) r.error(who, "tilt outside [0, 180]");
    }

    std::set<EntityId> comp_ids;
    for (const auto& c : b.components) {
        auto who = fmt::format("component {}", c.id);
        if (!comp_ids.insert(c.id).second) r.error(who, "duplicate component id");
        if (c.attaches_to_interambiance()) {
            if (!b.find_interambiance(c.interambiance_id))
                r.error(who, fmt::format("references missing interambiance {}", c.interambiance_id));
        } else if (c.zone_id == kOutside || !zone_ids.count(c.zone_id)) {
            r.error(who, fmt::format("references missing zone {}", c.zone_id));
        }

        switch (c.kind) {
        case ComponentKind::Wall:
            if (!(c.area > 0.0)) r.error(who, "area must be positive");
            if (c.layers.empty()) r.error(who, "a wall needs at least one layer");
            for (std::size_t i = 0; i < c.layers.size(); ++i) {
                const auto& l = c.layers[i];
                if (!(l.thickness > 0.0 && l.conductivity > 0.0 && l.density > 0.0 && l.specific_heat > 0.0))
                    r.error(who, fmt::format("layer {} properties must be strictly positive", i + 1));
            }
            check_face(r, who, "face_a", c.face_a);
            check_face(r, who, "face_b", c.face_b);
            break;
        case ComponentKind::Window:
            if (!(c.area > 0.0)) r.error(who, "area must be positive");
            if (!in_unit(c.glazing.transmittance)) r.error(who, "transmittance outside [0, 1]");
            if (!(c.glazing.u_value > 0.0)) r.error(who, "U-value must be positive");
            check_face(r, who, "face_a", c.face_a);
            check_face(r, who, "face_b", c.face_b);
            if (c.host_wall) {
                const Component* host = b.find_component(*c.host_wall);
                if (!host || host->kind != ComponentKind::Wall)
                    r.error(who, fmt::format("host {} is not a wall", *c.host_wall));
                else if (host->interambiance_id != c.interambiance_id)
                    r.error(who, "host wall lies on a different interambiance");
            }
            break;
        case ComponentKind::HvacSplit: {
            const auto& u = c.hvac;
            if (!(u.rated_total_capacity > 0.0 && u.rated_electric_power > 0.0))
                r.error(who, "rated capacity and electric power must be positive");
            if (!(u.rated_shr > 0.0 && u.rated_shr <= 1.0)) r.error(who, "rated SHR outside (0, 1]");
            if (!(u.time_constant > 0.0)) r.error(who, "time constant must be positive");
            if (!(u.deadband > 0.0)) r.error(who, "deadband must be positive");
            break;
        }
        case ComponentKind::AirlinkCrack:
            if (!(c.crack.coefficient > 0.0)) r.error(who, "flow coefficient must be positive");
            if (c.crack.exponent < 0.5 || c.crack.exponent > 1.0) r.error(who, "flow exponent outside [0.5, 1]");
            if (c.prescribed_exchange < 0.0) r.error(who, "prescribed exchange must be non-negative");
            break;
        case ComponentKind::AirlinkLargeOpening:
            if (!(c.opening.width > 0.0 && c.opening.height > 0.0))
                r.error(who, "opening width and height must be positive");
            if (!(c.opening.discharge_coefficient > 0.0 && c.opening.discharge_coefficient <= 1.0))
                r.error(who, "discharge coefficient outside (0, 1]");
            if (c.prescribed_exchange < 0.0) r.error(who, "prescribed exchange must be non-negative");
            break;
        }
    }

    // hosted window area may not exceed its wall
    for (const auto& c : b.components) {
        if (c.kind != ComponentKind::Wall) continue;
        double windows = 0.0;
        for (const auto& w : b.components)
            if (w.kind == ComponentKind::Window && w.host_wall == c.id) windows += w.area;
        if (windows >= c.area && windows > 0.0)
            r.error(fmt::format("component {}", c.id), "hosted windows cover the whole wall area");
    }

    for (const auto& z : b.zones) {
        bool outside = false;
        for (const auto& c : b.components) {
            if (!c.attaches_to_interambiance()) continue;
            const Interambiance* ia = b.find_interambiance(c.interambiance_id);
            if (ia && ia->faces_outside() && ia->inner_zone() == z.id) outside = true;
        }
        if (!outside) r.warning(fmt::format("zone {}", z.id), "no outside-facing component");
    }
    return report;
}

ZoneGraph topology(const Building& b) {
    if (!validate_building(b).ok())
        throw Error(ErrorCode::InvalidInput, "topology requires a building that validates");

    ZoneGraph g;
    for (const auto& z : b.zones) g.vertices.push_back(z.id);
    bool any_outside = std::any_of(b.interambiances.begin(), b.interambiances.end(),
                                   [](const Interambiance& ia) { return ia.faces_outside(); });
    if (any_outside) g.vertices.push_back(kOutside);
    g.vertex_components.resize(g.vertices.size());

    for (const auto& ia : b.interambiances) {
        ZoneGraph::Edge e{ia.id, ia.zone_a, ia.zone_b, {}};
        for (const auto& c : b.components)
            if (c.attaches_to_interambiance() && c.interambiance_id == ia.id) e.components.push_back(c.id);
        g.edges.push_back(std::move(e));
    }
    for (const auto& c : b.components) {
        if (c.attaches_to_interambiance()) continue;
        auto it = std::find(g.vertices.begin(), g.vertices.end(), c.zone_id);
        g.vertex_components[static_cast<std::size_t>(it - g.vertices.begin())].push_back(c.id);
    }
    return g;
}

double net_wall_area(const Building& b, const Component& wall) {
    double area = wall.area;
    for (const auto& w : b.components)
        if (w.kind == ComponentKind::Window && w.host_wall == wall.id) area -= w.area;
    return area;
}

}  // namespace mzsim
