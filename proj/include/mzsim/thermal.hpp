#pragma once

#include "mzsim/airflow.hpp"
#include "mzsim/building.hpp"
#include "mzsim/conduction.hpp"
#include "mzsim/interior_radiation.hpp"
#include "mzsim/model_catalog.hpp"
#include "mzsim/weather.hpp"

#include <Eigen/SparseCore>
#include <span>
#include <string>
#include <vector>

namespace mzsim {

inline constexpr double kAirSpecificHeat = 1006.0;   // J/(kg K)
inline constexpr double kLatentHeat = 2.45e6;        // J/kg
inline constexpr double kZoneAirDensity = 353.25 / 293.15;

/// Temperatures of every node (C) and zone humidity ratios.
struct ThermalState {
    std::vector<double> temperatures;
    std::vector<double> humidity;
};

struct ZoneState {
    double air_temperature = 0.0;
    double humidity_ratio = 0.0;
    std::vector<double> surface_temperatures;  // interior faces, in zone surface order
};

/// Conductance matrix, capacities and sources of one time step:
/// (C/dt + K) T_new = C/dt T_old + S.
struct AssembledSystem {
    std::vector<std::string> node_names;
    Eigen::SparseMatrix<double> conductance;
    Eigen::VectorXd capacity;
    Eigen::VectorXd source;
    double dt = 3600.0;
};

/// Per-step boundary data derived from the weather.
struct StepBoundary {
    double outdoor_temperature = 20.0;   // C
    double sky_temperature = 20.0;       // C
    double outdoor_humidity_ratio = 0.008;
    int month = 0;                       // 0..11, selects monthly ground temperatures
    std::vector<double> outside_film;    // per surface, W/(m2 K); unused for interior surfaces
    std::vector<double> outer_absorbed;  // per surface, W on the outside face
    std::vector<double> entering_direct;   // per zone, W through windows
    std::vector<double> entering_diffuse;  // per zone, W through windows
};

/// Cooling held at a setpoint by an ideal controller.
struct IdealCooling {
    std::size_t zone = 0;
    double setpoint = 25.0;
    double max_sensible = 0.0;  // W
};

struct StepResult {
    ThermalState state;
    std::vector<double> ideal_demand;     // per IdealCooling, W needed to hold the setpoint (>= 0)
    std::vector<double> ideal_delivered;  // per IdealCooling, W actually extracted
    int h_iterations = 1;
    double max_dh = 0.0;
};

/// Solves (C/dt + K) T = C/dt T_old + S. Throws Error(SingularSystem) naming
/// an unconstrained node.
Eigen::VectorXd advance(const AssembledSystem& system, const Eigen::VectorXd& old_temperatures);

struct MoistureResult {
    std::vector<double> humidity;
    std::vector<std::size_t> clamped_zones;
};

/// Implicit zone moisture balance,
///   rho V dw/dt = sum m_in (w_up - w) + (latent sources - latent extraction) / h_fg,
/// clamped to [0, saturation at the zone air temperature].
MoistureResult moisture_balance(std::span<const double> volumes, std::span<const double> old_humidity,
                                std::span<const double> air_temperatures, std::span<const DirectedFlow> flows,
                                double outdoor_humidity, std::span<const double> latent_sources,
                                std::span<const double> latent_extraction, double dt);

/// Thermal model of a building under one set of bindings. Immutable after
/// construction; `step` works on caller-owned state.
class ThermalModel {
public:
    struct Face {
        int zone = -1;                // zone index, -1 for outside
        std::size_t node = 0;         // global node index
        SurfaceProperties properties;
        SurfaceClass surface_class = SurfaceClass::VerticalWall;
    };

    struct Surface {
        EntityId component = 0;
        bool window = false;
        bool ground_contact = false;
        double area = 0.0;  // net conductive area
        double tilt = 90.0;
        double azimuth = 180.0;  // outward normal of the outside face
        double transmittance = 0.0;
        Face a;  // zone_a side
        Face b;  // zone_b side
        GroundModel ground;

        /// The face in contact with the outside, if any.
        const Face* outside_face() const { return a.zone < 0 ? &a : b.zone < 0 ? &b : nullptr; }
        const Face* inside_face_of_outside_wall() const { return a.zone < 0 ? &b : b.zone < 0 ? &a : nullptr; }
    };

    struct ZoneInfo {
        std::size_t air_node = 0;
        int star_node = -1;
        double air_capacity = 0.0;  // J/K
        double volume = 0.0;
        double sensible_gain = 0.0;
        double latent_gain = 0.0;
        IndoorConvectionModel convection;
        IndoorShortwaveModel shortwave;
        std::vector<std::pair<std::size_t, bool>> faces;  // (surface index, is face a)
        std::vector<InteriorSurface> interior;            // in `faces` order
        LongwaveCoupling longwave;
    };

    ThermalModel(const Building& b, const ModelBindingSet& bindings);

    std::size_t node_count() const { return node_names_.size(); }
    const std::vector<std::string>& node_names() const { return node_names_; }
    const std::vector<Surface>& surfaces() const { return surfaces_; }
    const std::vector<ZoneInfo>& zones() const { return zones_; }
    bool nonlinear_convection() const { return nonlinear_; }

    ThermalState initial_state() const;
    ZoneState zone_state(const ThermalState& s, std::size_t zone) const;

    /// Weather-derived boundary data for one step.
    StepBoundary boundary(const WeatherRecord& r, const Site& site, const ModelBindingSet& bindings) const;

    /// Builds the step system with film coefficients evaluated at `iterate`
    /// and sky exchange linearized at `old`. `injection` is sensible power
    /// added to each zone's air (negative for cooling).
    AssembledSystem assemble(const StepBoundary& boundary, std::span<const DirectedFlow> flows,
                             std::span<const double> injection, const ThermalState& old,
                             const ThermalState& iterate, double dt) const;

    /// One time step: fixed-point iteration on the film coefficients
    /// (|dh| < 0.01 W/(m2 K), at most 20 passes) around the implicit solve,
    /// with ideal cooling solved by superposition. Humidity is carried over
    /// unchanged; see moisture_balance.
    StepResult step(const StepBoundary& boundary, std::span<const DirectedFlow> flows,
                     std::span<const double> injection, std::span<const IdealCooling> ideal,
                     const ThermalState& old, double dt) const;

    /// Film coefficients of every interior face at the given state, zone by zone.
    std::vector<double> film_coefficients(const ThermalState& s) const;

private:
    std::size_t add_node(std::string name, double capacity);

    std::vector<std::string> node_names_;
    std::vector<double> capacities_;
    struct Branch {
        std::size_t a, b;
        double g;
    };
    std::vector<Branch> branches_;  // conduction and linear radiation, fixed in time
    std::vector<Surface> surfaces_;
    std::vector<ZoneInfo> zones_;
    std::vector<double> initial_;
    std::vector<double> initial_humidity_;
    bool nonlinear_ = false;
};

}  // namespace mzsim
