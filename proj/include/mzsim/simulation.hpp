#pragma once

#include "mzsim/airflow.hpp"
#include "mzsim/building.hpp"
#include "mzsim/hvac.hpp"
#include "mzsim/model_catalog.hpp"
#include "mzsim/thermal.hpp"
#include "mzsim/timestamp.hpp"
#include "mzsim/weather.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mzsim {

enum class Coupling { PingPong, Onion };

const char* to_string(Coupling c);
Coupling parse_coupling(std::string_view text);

struct SimulationConfig {
    Timestamp start{};
    Timestamp end{};
    double thermal_step = 3600.0;  // s
    double reduced_step = 60.0;    // s, used when a cycling HVAC model is bound
    std::optional<double> step;    // forces one step for the whole run
    Coupling coupling = Coupling::PingPong;
    double onion_tolerance = 0.05;  // K
    int onion_max_iterations = 10;
    bool warm_up = true;  // repeat the first day once before recording
};

/// Throws Error(InvalidInput) unless steps are positive, nest evenly and
/// divide a day, the tolerance is positive and end > start.
void check_config(const SimulationConfig& c);

/// Reduced step iff any HVAC unit is bound to a cycling model (1 or 2).
double select_timestep(const Building& b, const ModelBindingSet& bindings, const SimulationConfig& c);

/// Mutable state carried from step to step.
struct RunState {
    ThermalState thermal;
    std::vector<CyclingState> cycling;  // per HVAC unit
};

struct StepOutcome {
    RunState state;
    std::vector<DirectedFlow> flows;
    std::vector<LinkFlow> link_flows;    // per air link, empty under prescribed airflow
    std::vector<HvacOutput> hvac;        // per HVAC unit
    std::vector<double> unmet;           // per zone, W of sensible load not met
    int coupling_iterations = 1;
    bool converged = true;
    double coupling_change = 0.0;  // K, last change between coupling iterations
    std::vector<std::size_t> humidity_clamped;  // zones
};

/// Per-zone, per-surface, per-link and per-unit series on a common time base.
/// Series are indexed [entity][step].
struct ResultSet {
    double step = 3600.0;
    std::vector<Timestamp> time;  // end of each step

    std::vector<EntityId> zone_ids;
    std::vector<std::string> zone_names;
    std::vector<std::vector<double>> zone_temperature;
    std::vector<std::vector<double>> zone_humidity;
    std::vector<std::vector<double>> zone_unmet;

    /// Inner is the zone side of an outside surface and the zone_a side otherwise.
    std::vector<EntityId> surface_ids;
    std::vector<std::vector<double>> surface_inner;
    std::vector<std::vector<double>> surface_outer;

    std::vector<EntityId> link_ids;
    std::vector<std::vector<double>> link_forward;   // kg/s, zone_a -> zone_b
    std::vector<std::vector<double>> link_backward;  // kg/s, zone_b -> zone_a

    std::vector<EntityId> hvac_ids;
    std::vector<std::string> hvac_models;
    std::vector<std::vector<HvacOutput>> hvac;

    int onion_unconverged_steps = 0;
    std::vector<std::string> warnings;
};

/// A building with its bindings, ready to step. Immutable; independent runs
/// may share one instance across threads.
class Simulation {
public:
    Simulation(Building building, ModelBindingSet bindings);

    const Building& building() const { return building_; }
    const ModelBindingSet& bindings() const { return bindings_; }
    const ThermalModel& thermal() const { return thermal_; }

    RunState initial_state() const;

    /// One step ending at `record.timestamp`. Errors carry the timestamp.
    StepOutcome couple_step(const RunState& state, const WeatherRecord& record, double dt,
                            const SimulationConfig& config) const;

    /// Warm-up then chronological stepping over [start, end]. Weather is
    /// sampled at the end of each step; throws Error(WeatherGap) when the
    /// series does not cover the period.
    ResultSet run(const WeatherSeries& weather, const SimulationConfig& config) const;

private:
    struct Unit {
        EntityId id = 0;
        std::size_t zone = 0;
        SplitUnitSpec spec;
        HvacModel::Kind kind = HvacModel::Kind::None;
    };

    std::vector<DirectedFlow> airflow(const RunState& state, const WeatherRecord& r, std::vector<LinkFlow>& links) const;

    Building building_;
    ModelBindingSet bindings_;
    ThermalModel thermal_;
    AirflowNetwork network_;
    AirflowModel airflow_;
    std::vector<Unit> units_;
};

ResultSet simulate(const Building& b, const ModelBindingSet& bindings, const WeatherSeries& weather,
                   const SimulationConfig& config);

}  // namespace mzsim
