#include "mzsim/simulation.hpp"

#include "mzsim/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <map>

namespace mzsim {

const char* to_string(Coupling c) { return c == Coupling::Onion ? "ONION" : "PING_PONG"; }

Coupling parse_coupling(std::string_view text) {
    std::string t;
    for (char ch : text) t += ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (t == "PING_PONG" || t == "PINGPONG") return Coupling::PingPong;
    if (t == "ONION") return Coupling::Onion;
    throw Error(ErrorCode::InvalidInput, fmt::format("unknown coupling '{}' (expected ping_pong or onion)", text));
}

namespace {

bool divides(double part, double whole) {
    const double n = whole / part;
    return std::fabs(n - std::round(n)) < 1e-9 && std::round(n) >= 1.0;
}

}  // namespace

void check_config(const SimulationConfig& c) {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidInput, m); };
    if (!(c.thermal_step > 0.0 && c.reduced_step > 0.0)) fail("time steps must be positive");
    if (!divides(c.thermal_step, 86400.0)) fail(fmt::format("thermal step {} s does not divide a day", c.thermal_step));
    if (!divides(c.reduced_step, c.thermal_step))
        fail(fmt::format("reduced step {} s does not divide the thermal step {} s", c.reduced_step, c.thermal_step));
    if (c.step && !(*c.step > 0.0 && divides(*c.step, 86400.0)))
        fail(fmt::format("step {} s must be positive and divide a day", *c.step));
    if (!(c.onion_tolerance > 0.0)) fail("coupling tolerance must be positive");
    if (c.onion_max_iterations < 1) fail("coupling needs at least one iteration");
    if (c.end <= c.start) fail("simulation end must come after its start");
}

double select_timestep(const Building& b, const ModelBindingSet& bindings, const SimulationConfig& c) {
    if (c.step) return *c.step;
    for (const auto& comp : b.components) {
        if (comp.kind != ComponentKind::HvacSplit) continue;
        const auto k = bindings.component<HvacModel>(comp.id).kind;
        if (k == HvacModel::Kind::Cycling || k == HvacModel::Kind::Mapped) return c.reduced_step;
    }
    return c.thermal_step;
}

Simulation::Simulation(Building building, ModelBindingSet bindings)
    : building_(std::move(building)),
      bindings_(std::move(bindings)),
      thermal_(building_, bindings_),
      network_(build_airflow_network(building_)),
      airflow_(bindings_.building<AirflowModel>()) {
    for (const auto& c : building_.components) {
        if (c.kind != ComponentKind::HvacSplit) continue;
        Unit u{c.id, building_.zone_index(c.zone_id), c.hvac, bindings_.component<HvacModel>(c.id).kind};
        if (u.kind == HvacModel::Kind::None) continue;  // an unbound unit is absent from the run
        check_unit(u.spec);
        if (u.kind == HvacModel::Kind::Mapped && !has_performance_map(u.spec))
            throw Error(ErrorCode::UnfittedMap, fmt::format("component {}: MODEL2 needs a performance map", c.id));
        units_.push_back(u);
    }
}

RunState Simulation::initial_state() const { return {thermal_.initial_state(), std::vector<CyclingState>(units_.size())}; }

std::vector<DirectedFlow> Simulation::airflow(const RunState& s, const WeatherRecord& r,
                                              std::vector<LinkFlow>& links) const {
    const double t_out = r.dry_bulb + kKelvin;
    links.clear();
    if (airflow_.kind == AirflowModel::Kind::Prescribed) {
        for (const auto& l : network_.links) {
            const double m = building_.find_component(l.component)->prescribed_exchange;
            links.push_back({m, m, std::nullopt});
        }
        return prescribed_flows(building_, air_density(t_out));
    }
    if (network_.links.empty()) return {};
    AirflowConditions cond;
    cond.outside_temperature = t_out;
    cond.wind_speed = r.wind_speed;
    for (const auto& z : thermal_.zones()) cond.zone_temperatures.push_back(s.thermal.temperatures[z.air_node] + kKelvin);
    const FlowSolution sol = solve_pressures(network_, cond, airflow_);
    links = sol.flows;
    return directed_flows(network_, sol);
}

StepOutcome Simulation::couple_step(const RunState& state, const WeatherRecord& r, double dt,
                                    const SimulationConfig& config) const {
    try {
        const auto& zones = thermal_.zones();
        const std::size_t nz = zones.size();
        StepOutcome out;
        out.state = state;
        out.hvac.assign(units_.size(), {});
        out.unmet.assign(nz, 0.0);

        const StepBoundary bd = thermal_.boundary(r, building_.site, bindings_);

        // cycling units decide from the state at the start of the step
        std::vector<double> injection(nz, 0.0), latent_out(nz, 0.0);
        std::vector<IdealCooling> ideal;
        std::vector<std::vector<std::size_t>> ideal_units;
        for (std::size_t i = 0; i < units_.size(); ++i) {
            const Unit& u = units_[i];
            const double t_air = state.thermal.temperatures[zones[u.zone].air_node];
            CyclingStep cs;
            switch (u.kind) {
            case HvacModel::Kind::None: continue;
            case HvacModel::Kind::Ideal: {
                auto it = std::find_if(ideal.begin(), ideal.end(), [&](const IdealCooling& c) { return c.zone == u.zone; });
                if (it == ideal.end()) {
                    ideal.push_back({u.zone, u.spec.setpoint, 0.0});
                    ideal_units.emplace_back();
                    it = ideal.end() - 1;
                }
                it->max_sensible += u.spec.rated_total_capacity * u.spec.rated_shr;
                ideal_units[std::size_t(it - ideal.begin())].push_back(i);
                continue;
            }
            case HvacModel::Kind::Cycling: cs = model1_step(state.cycling[i], t_air, u.spec, dt); break;
            case HvacModel::Kind::Mapped:
                cs = model2_step(state.cycling[i], {r.dry_bulb, t_air, state.thermal.humidity[u.zone]}, u.spec, dt);
                break;
            }
            out.state.cycling[i] = cs.state;
            out.hvac[i] = cs.output;
            injection[u.zone] -= cs.output.sensible;
            latent_out[u.zone] += cs.output.latent;
        }

        out.flows = airflow(state, r, out.link_flows);
        StepResult res = thermal_.step(bd, out.flows, injection, ideal, state.thermal, dt);

        if (config.coupling == Coupling::Onion && airflow_.kind == AirflowModel::Kind::Pressure) {
            out.converged = false;
            for (int it = 2; it <= config.onion_max_iterations; ++it) {
                const RunState probe{res.state, {}};
                std::vector<LinkFlow> links;
                auto flows = airflow(probe, r, links);
                StepResult next = thermal_.step(bd, flows, injection, ideal, state.thermal, dt);
                double change = 0.0;
                for (const auto& z : zones)
                    change = std::max(change, std::fabs(next.state.temperatures[z.air_node] - res.state.temperatures[z.air_node]));
                res = std::move(next);
                out.flows = std::move(flows);
                out.link_flows = std::move(links);
                out.coupling_iterations = it;
                out.coupling_change = change;
                if (change < config.onion_tolerance) {
                    out.converged = true;
                    break;
                }
            }
        }

        for (std::size_t e = 0; e < ideal.size(); ++e) {
            const double demand = res.ideal_demand[e];
            for (std::size_t i : ideal_units[e]) {
                const Unit& u = units_[i];
                const double share = u.spec.rated_total_capacity * u.spec.rated_shr / ideal[e].max_sensible;
                out.hvac[i] = model0_ideal(demand * share, u.spec, dt);
                out.unmet[u.zone] += out.hvac[i].unmet;
                latent_out[u.zone] += out.hvac[i].latent;
            }
        }

        std::vector<double> volumes, air_t, latent_in;
        for (std::size_t z = 0; z < nz; ++z) {
            volumes.push_back(zones[z].volume);
            air_t.push_back(res.state.temperatures[zones[z].air_node]);
            latent_in.push_back(zones[z].latent_gain);
        }
        const MoistureResult m = moisture_balance(volumes, state.thermal.humidity, air_t, out.flows, r.humidity_ratio,
                                                  latent_in, latent_out, dt);
        out.state.thermal.temperatures = std::move(res.state.temperatures);
        out.state.thermal.humidity = m.humidity;
        out.humidity_clamped = m.clamped_zones;
        return out;
    } catch (const Error& e) {
        throw Error(e.code(), fmt::format("{} (step ending {})", e.what(), format_timestamp(r.timestamp)));
    }
}

ResultSet Simulation::run(const WeatherSeries& weather, const SimulationConfig& config) const {
    check_config(config);
    const double dt = select_timestep(building_, bindings_, config);
    const double span = double((config.end - config.start).count());
    if (!divides(dt, span))
        throw Error(ErrorCode::InvalidInput, fmt::format("step {} s does not divide the simulated period", dt));
    const auto steps = static_cast<long>(std::llround(span / dt));
    const auto step_s = std::chrono::seconds(std::llround(dt));
    weather.require_coverage(config.start, config.end);

    RunState state = initial_state();
    if (config.warm_up) {
        const long per_day = std::lround(86400.0 / dt);
        for (long k = 0; k < per_day; ++k) {
            const Timestamp t = config.start + step_s * (k % steps + 1);
            state = couple_step(state, weather.at(t), dt, config).state;
        }
    }

    ResultSet rs;
    rs.step = dt;
    const auto& zones = thermal_.zones();
    for (const auto& z : building_.zones) {
        rs.zone_ids.push_back(z.id);
        rs.zone_names.push_back(z.name);
    }
    rs.zone_temperature.assign(zones.size(), {});
    rs.zone_humidity.assign(zones.size(), {});
    rs.zone_unmet.assign(zones.size(), {});
    for (const auto& s : thermal_.surfaces()) rs.surface_ids.push_back(s.component);
    rs.surface_inner.assign(rs.surface_ids.size(), {});
    rs.surface_outer.assign(rs.surface_ids.size(), {});
    for (const auto& l : network_.links) rs.link_ids.push_back(l.component);
    rs.link_forward.assign(rs.link_ids.size(), {});
    rs.link_backward.assign(rs.link_ids.size(), {});
    for (const auto& u : units_) {
        rs.hvac_ids.push_back(u.id);
        rs.hvac_models.push_back(variant_id(ModelVariant{HvacModel{u.kind}}));
    }
    rs.hvac.assign(units_.size(), {});

    std::map<std::size_t, long> clamped;
    std::optional<Timestamp> first_unconverged;
    for (long k = 1; k <= steps; ++k) {
        const Timestamp t = config.start + step_s * k;
        StepOutcome o = couple_step(state, weather.at(t), dt, config);
        state = std::move(o.state);
        rs.time.push_back(t);
        for (std::size_t z = 0; z < zones.size(); ++z) {
            rs.zone_temperature[z].push_back(state.thermal.temperatures[zones[z].air_node]);
            rs.zone_humidity[z].push_back(state.thermal.humidity[z]);
            rs.zone_unmet[z].push_back(o.unmet[z]);
        }
        const auto& surfaces = thermal_.surfaces();
        for (std::size_t i = 0; i < surfaces.size(); ++i) {
            const auto& s = surfaces[i];
            const bool flip = s.a.zone < 0;
            rs.surface_inner[i].push_back(state.thermal.temperatures[flip ? s.b.node : s.a.node]);
            rs.surface_outer[i].push_back(state.thermal.temperatures[flip ? s.a.node : s.b.node]);
        }
        for (std::size_t i = 0; i < rs.link_ids.size(); ++i) {
            rs.link_forward[i].push_back(i < o.link_flows.size() ? o.link_flows[i].forward : 0.0);
            rs.link_backward[i].push_back(i < o.link_flows.size() ? o.link_flows[i].backward : 0.0);
        }
        for (std::size_t i = 0; i < units_.size(); ++i) rs.hvac[i].push_back(o.hvac[i]);
        for (std::size_t z : o.humidity_clamped) ++clamped[z];
        if (!o.converged) {
            ++rs.onion_unconverged_steps;
            if (!first_unconverged) first_unconverged = t;
        }
    }

    for (const auto& [z, n] : clamped)
        rs.warnings.push_back(fmt::format("zone {}: humidity ratio clamped to its physical range in {} step(s)",
                                          building_.zones[z].id, n));
    if (first_unconverged)
        rs.warnings.push_back(fmt::format("onion coupling did not converge within {} iterations in {} step(s), first at {}",
                                          config.onion_max_iterations, rs.onion_unconverged_steps,
                                          format_timestamp(*first_unconverged)));
    return rs;
}

ResultSet simulate(const Building& b, const ModelBindingSet& bindings, const WeatherSeries& weather,
                   const SimulationConfig& config) {
    return Simulation(b, bindings).run(weather, config);
}

}  // namespace mzsim
