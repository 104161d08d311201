// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.
#include "fixtures.hpp"

#include "mzsim/error.hpp"
#include "mzsim/project_io.hpp"
#include "mzsim/report.hpp"
#include "mzsim/simulation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fmt/format.h>
#include <functional>
#include <random>

using namespace mzsim;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // s, 0 for none
    std::function<Outcome()> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ConductionModel> all_schemes() {
    std::vector<ConductionModel> out = {{ConductionModel::Kind::R2C}, {ConductionModel::Kind::R3C2}};
    for (int n = 1; n <= 4; ++n) out.push_back({ConductionModel::Kind::PerLayer, n});
    return out;
}

// ---------------------------------------------------------------------------

Outcome steady_conduction() {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> area(0.5, 40.0), temp(-20.0, 50.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto layers = fixture::random_layers(rng);
        const double a = area(rng), ti = temp(rng), to = temp(rng);
        const double expected = wall_ua(layers, a) * (ti - to);
        for (const auto& scheme : all_schemes()) {
            const double q = steady_flux(discretize_wall(layers, a, scheme), ti, to);
            worst = std::max(worst, std::fabs(q - expected) / std::max(std::fabs(expected), 1e-300));
        }
    }
    return {worst < 1e-9, fmt::format("120 wall/scheme pairs, max relative flux error {:.2e} (limit 1e-9)", worst)};
}

Outcome dynamic_conduction() {
    const auto layers = fixture::heavy_wall();
    const double exact = std::abs(analytic_periodic_response(layers, 86400.0).transmittance);
    auto error = [&](ConductionModel m) {
        const auto net = discretize_wall(layers, 1.0, m);
        return std::fabs(std::abs(network_periodic_response(net, 1.0, 86400.0).transmittance) - exact) / exact;
    };
    const double r2c = error({ConductionModel::Kind::R2C});
    const double r3c2 = error({ConductionModel::Kind::R3C2});
    const double pl3 = error({ConductionModel::Kind::PerLayer, 3});
    const bool ok = pl3 < 0.05 && r2c >= r3c2 && r3c2 >= pl3;
    return {ok, fmt::format("PER_LAYER(3) error {:.2f} % (limit 5 %), ordering R2C {:.2f} % >= 3R2C {:.2f} % >= "
                            "PER_LAYER(3) {:.2f} %",
                            100 * pl3, 100 * r2c, 100 * r3c2, 100 * pl3)};
}

Outcome airflow_balance() {
    std::mt19937 rng(99);
    double worst_residual = 0.0, worst_jacobian = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto r = fixture::random_airflow(rng);
        const auto sol = solve_pressures(r.network, r.conditions);
        worst_residual = std::max(worst_residual, sol.max_residual());

        const Eigen::VectorXd p =
            Eigen::Map<const Eigen::VectorXd>(sol.pressures.data(), Eigen::Index(sol.pressures.size()));
        const Eigen::VectorXd probe = p + Eigen::VectorXd::Constant(p.size(), 0.37);
        const auto eq = evaluate_network(r.network, r.conditions, probe);
        for (Eigen::Index j = 0; j < p.size(); ++j) {
            const double h = 1e-6;
            Eigen::VectorXd up = probe, down = probe;
            up[j] += h;
            down[j] -= h;
            const Eigen::VectorXd fd = (evaluate_network(r.network, r.conditions, up).residual -
                                        evaluate_network(r.network, r.conditions, down).residual) / (2 * h);
            for (Eigen::Index i = 0; i < p.size(); ++i)
                worst_jacobian = std::max(worst_jacobian, std::fabs(eq.jacobian(i, j) - fd[i]) /
                                                              std::max(std::fabs(fd[i]), 1e-3));
        }
    }
    return {worst_residual < 1e-6 && worst_jacobian < 1e-4,
            fmt::format("50 networks, max residual {:.2e} kg/s (limit 1e-6), Jacobian vs finite difference {:.2e} "
                        "(limit 1e-4)",
                        worst_residual, worst_jacobian)};
}

Outcome neutral_plane() {
    const double h = 2.0, w = 1.0, cd = 0.78;
    const double rho_a = air_density(295.15), rho_b = air_density(305.15);
    // net flow rises with the bottom pressure difference; bisect for zero
    double lo = 0.0, hi = (rho_a - rho_b) * kGravity * h;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (large_opening_flow(w, h, cd, rho_a, rho_b, mid).net() > 0.0 ? hi : lo) = mid;
    }
    const auto f = large_opening_flow(w, h, cd, rho_a, rho_b, 0.5 * (lo + hi));
    const double zn = f.neutral_height.value_or(-1.0);
    const double plane_error = std::fabs(zn - h / 2.0) / (h / 2.0);

    const double rho = 1.2, dp = 3.0;
    const double orifice = cd * w * h * std::sqrt(2.0 * rho * dp);
    const double iso = large_opening_flow(w, h, cd, rho, rho, dp).net();
    const double iso_error = std::fabs(iso - orifice) / orifice;
    return {plane_error < 0.01 && iso_error < 1e-6,
            fmt::format("neutral plane {:.4f} m for H/2 = {:.1f} m (error {:.2e}, limit 1e-2), isothermal orifice "
                        "error {:.2e} (limit 1e-6)",
                        zn, h / 2.0, plane_error, iso_error)};
}

Outcome shortwave() {
    const IndoorShortwaveModel simple{IndoorShortwaveModel::Kind::Simple}, grouped{IndoorShortwaveModel::Kind::Grouped4},
        full{IndoorShortwaveModel::Kind::Full};
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> power(1.0, 2000.0), alpha(0.05, 0.95);
    double conservation = 0.0, equivalence = 0.0, oracle = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        auto s = fixture::random_zone(rng);
        const double direct = power(rng), diffuse = power(rng), entering = direct + diffuse;
        for (const auto& m : {simple, grouped, full}) {
            double sum = 0.0;
            for (double a : shortwave_distribution(s, direct, diffuse, m)) sum += a;
            conservation = std::max(conservation, std::fabs(sum - entering) / entering);
        }
        const auto f = shortwave_distribution(s, direct, diffuse, full);
        const auto bounce = fixture::bounce_absorption(s, direct, diffuse);
        for (std::size_t i = 0; i < s.size(); ++i) oracle = std::max(oracle, std::fabs(f[i] - bounce[i]) / entering);

        double by_group[4];
        for (double& a : by_group) a = alpha(rng);
        for (auto& x : s) {
            x.sw_absorptance = by_group[static_cast<int>(group_of(x.surface_class))];
            x.sw_reflectance = 1.0 - x.sw_absorptance;
        }
        const auto g = shortwave_distribution(s, direct, diffuse, grouped);
        const auto fh = shortwave_distribution(s, direct, diffuse, full);
        for (std::size_t i = 0; i < s.size(); ++i) equivalence = std::max(equivalence, std::fabs(g[i] - fh[i]) / entering);
    }
    // the two models solve different systems, so equality holds to round-off
    return {conservation < 1e-9 && equivalence < 1e-12 && oracle < 1e-9,
            fmt::format("20 zones, conservation {:.1e} (limit 1e-9), GROUPED4 vs FULL on homogeneous groups {:.1e} "
                        "(round-off, limit 1e-12), FULL vs reflection oracle {:.1e} (limit 1e-9)",
                        conservation, equivalence, oracle)};
}

Outcome zone_response() {
    const double t0 = 20.0, t_out = 30.0;
    const Building b = fixture::glazed_box(t0);
    const double tau = fixture::glazed_box_time_constant(b);
    const auto start = fixture::at("2024-01-15T00:00");

    SimulationConfig c;
    c.start = start;
    c.end = start + std::chrono::hours(24);
    c.step = 120.0;
    c.warm_up = false;
    const auto rs = simulate(b, defaults(), fixture::constant_weather(start, 1, t_out), c);
    double worst = 0.0;
    for (std::size_t k = 0; k < rs.time.size() && double(k + 1) * 120.0 <= 4.0 * tau; ++k) {
        const double normalized = (rs.zone_temperature[0][k] - t_out) / (t0 - t_out);
        worst = std::max(worst, std::fabs(normalized - std::exp(-double(k + 1) * 120.0 / tau)));
    }

    Building rooms = fixture::two_rooms_with_door();
    rooms.components.resize(3);
    for (auto& z : rooms.zones) {
        z.sensible_gain = 0.0;
        z.infiltration_ach = 0.5;
    }
    rooms.zones[1].initial_temperature = 18.0;
    SimulationConfig week;
    week.start = start;
    week.end = start + std::chrono::hours(24 * 7);
    week.warm_up = false;
    const auto weekly = simulate(rooms, defaults(), fixture::constant_weather(start, 7, 26.0, 2.0), week);
    double drift = 0.0;
    for (const auto& s : weekly.zone_temperature) drift = std::max(drift, std::fabs(s.back() - 26.0));
    return {worst < 0.02 && drift < 0.01,
            fmt::format("step response vs first order (tau {:.0f} s) max deviation {:.4f} (limit 0.02), 7-day "
                        "equilibrium offset {:.2e} K (limit 0.01)",
                        tau, worst, drift)};
}

Outcome hvac_transient() {
    const double q = 3000.0, tau = 300.0;
    const double at_tau = transient_capacity(q, tau, tau) / q;
    const double rel = std::fabs(at_tau - 0.632) / 0.632;
    double worst = 0.0;
    for (double t : {60.0, 300.0, 900.0, 3600.0}) {
        // trapezoid quadrature of the capacity curve on 1 s steps
        const int n = int(t);
        double e = 0.0;
        for (int i = 0; i < n; ++i)
            e += 0.5 * (transient_capacity(q, double(i), tau) + transient_capacity(q, double(i + 1), tau));
        const double closed = q * (t - tau * (1.0 - std::exp(-t / tau)));
        worst = std::max(worst, std::fabs(e - closed) / closed);
        worst = std::max(worst, std::fabs(transient_energy(q, t, tau) - closed) / closed);
    }
    return {rel < 1e-3 && worst < 5e-3,
            fmt::format("Q(tau)/Q_ss = {:.5f} (0.632 +- 0.1 %), quadrature vs closed-form energy {:.2e} (limit 5e-3)",
                        at_tau, worst)};
}

// Test cell with a 12 kW unit: the cycling model runs about 16 % of the day.
Project oversized_cell(const char* model) {
    Project p = load_project(fixture::samples_dir() / "test_cell.yaml");
    for (auto& c : p.building.components) {
        if (c.kind != ComponentKind::HvacSplit) continue;
        auto& u = c.hvac;
        u.rated_total_capacity = 12000.0;
        u.rated_electric_power = 12000.0 / 2.6;
        u.rated_shr = 0.75;
        u.time_constant = 120.0;
        // manufacturer table: capacity falls with outdoor and rises with indoor temperature;
        // electric draw sits below the rated figure at mild outdoor temperatures
        std::vector<MapPoint> table;
        for (double to : {25.0, 30.0, 35.0, 40.0})
            for (double ti : {22.0, 25.0, 28.0})
                for (double w : {0.008, 0.011, 0.014}) {
                    MapPoint m{to, ti, w};
                    m.total = u.rated_total_capacity * (1.0 - 0.01 * (to - 35.0) + 0.02 * (ti - 27.0));
                    m.sensible = u.rated_shr * m.total;
                    m.electric = u.rated_electric_power * (0.85 + 0.01 * (to - 35.0));
                    table.push_back(m);
                }
        const auto fit = fit_performance_map(table);
        u.map_total = fit.total;
        u.map_sensible = fit.sensible;
        u.map_electric = fit.electric;
    }
    for (auto& b : p.bindings)
        if (slot_of(b.variant) == ModelSlot::HvacSystem) b.variant = make_variant(ModelSlot::HvacSystem, model);
    return p;
}

Outcome oversized_unit_ordering() {
    const auto weather = load_weather(fixture::samples_dir() / "weather_summer.csv");
    HvacSummary s[3];
    double steps[3];
    const char* ids[] = {"MODEL0", "MODEL1", "MODEL2"};
    for (int k = 0; k < 3; ++k) {
        const Project p = oversized_cell(ids[k]);
        const auto rs = simulate(p.building, mzsim::bind(p.building, p.bindings), weather, p.simulation);
        s[k] = summarize(rs.hvac.at(0), rs.step);
        steps[k] = rs.step;
    }
    const double e0 = s[0].electric_kwh, e1 = s[1].electric_kwh, e2 = s[2].electric_kwh;
    const double cop0 = s[0].mean_cop.value_or(0.0), cop1 = s[1].mean_cop.value_or(0.0);
    const double on1 = s[1].on_time_fraction;
    const bool ok = e0 < e2 && e2 <= e1 && e0 <= 0.5 * e1 && cop0 > cop1 && steps[1] == 60.0 && on1 > 0.12 &&
                    on1 < 0.20;
    return {ok, fmt::format("daily kWh model0 {:.2f} < model2 {:.2f} <= model1 {:.2f}; model0/model1 {:.2f} (limit "
                            "0.5); COP {:.2f} > {:.2f}; cycling on-time {:.1f} % (target ~16 %)",
                            e0, e2, e1, e0 / e1, cop0, cop1, 100.0 * on1)};
}

Outcome allocation_matrix() {
    Building b = fixture::five_zone_house();
    b.components.push_back(fixture::split_unit(40, 1, {}));
    b.components[6].ground_contact = true;  // the slab under zone 2 hosts component-level choices
    int cases = 0, wrong = 0;
    for (auto slot : kAllSlots) {
        for (const auto& id : variant_ids(slot)) {
            const ParamMap params = slot == ModelSlot::GroundCoupling && id == "MONTHLY"
                                        ? ParamMap{{"monthly", std::vector<double>(12, 20.0)}}
                                        : ParamMap{};
            const auto variant = make_variant(slot, id, params);
            for (auto level : {BindingLevel::Building, BindingLevel::Zone, BindingLevel::Component}) {
                EntityId entity = 0;
                if (level == BindingLevel::Zone) entity = 3;
                if (level == BindingLevel::Component) entity = slot == ModelSlot::HvacSystem ? 40 : 7;
                const std::vector<ModelChoice> choice = {{level, entity, variant}};
                bool accepted = true;
                ErrorCode code = ErrorCode::InvalidInput;
                try {
                    mzsim::bind(b, choice);
                } catch (const Error& e) {
                    accepted = false;
                    code = e.code();
                }
                const bool expected = level == allocation_level(slot);
                ++cases;
                if (accepted != expected || (!accepted && code != ErrorCode::LevelMismatch)) ++wrong;
            }
        }
    }
    return {wrong == 0, fmt::format("{} slot x variant x level bindings, {} disagree with the allocation table",
                                    cases, wrong)};
}

Outcome end_to_end() {
    Project p = load_project(fixture::samples_dir() / "five_zone.yaml");
    std::erase_if(p.bindings, [](const ModelChoice& c) { return slot_of(c.variant) == ModelSlot::HeatConduction; });
    bool pressure = false;
    for (const auto& c : p.bindings)
        pressure |= slot_of(c.variant) == ModelSlot::AirflowTransfer && variant_id(c.variant) == "PRESSURE";

    SyntheticWeather spec;
    spec.start = fixture::at("2023-01-01T00:00");
    spec.days = 365;
    const WeatherSeries weather(synthetic_weather(p.building.site, spec));
    SimulationConfig c = p.simulation;
    c.start = spec.start;
    c.end = spec.start + std::chrono::hours(24 * 365);

    const auto bindings = mzsim::bind(p.building, p.bindings);
    const auto t0 = std::chrono::steady_clock::now();
    const auto first = simulate(p.building, bindings, weather, c);
    const double elapsed = seconds_since(t0);
    const auto second = simulate(p.building, bindings, weather, c);

    bool identical = true;
    const auto a = result_tables(first), b = result_tables(second);
    identical = a.size() == b.size();
    for (std::size_t i = 0; identical && i < a.size(); ++i) identical = format_csv(a[i]) == format_csv(b[i]);
    const bool all_r2c = bindings.non_default_choices().size() == p.bindings.size() &&
                         std::all_of(p.building.components.begin(), p.building.components.end(), [&](const Component& k) {
                             return k.kind != ComponentKind::Wall ||
                                    bindings.component<ConductionModel>(k.id).kind == ConductionModel::Kind::R2C;
                         });
    return {pressure && all_r2c && identical && first.time.size() == 8760 && elapsed < 10.0,
            fmt::format("{} hourly steps, {} zones, PRESSURE airflow, R2C walls, {:.2f} s (limit 10 s), second run "
                        "{}",
                        first.time.size(), first.zone_ids.size(), elapsed,
                        identical ? "byte-identical" : "DIFFERS")};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "steady conduction", 1.0, steady_conduction},
        {2, "dynamic conduction fidelity", 5.0, dynamic_conduction},
        {3, "airflow mass balance", 10.0, airflow_balance},
        {4, "large-opening neutral plane", 0.0, neutral_plane},
        {5, "shortwave conservation and equivalence", 0.0, shortwave},
        {6, "zone thermal response", 0.0, zone_response},
        {7, "HVAC transient", 0.0, hvac_transient},
        {8, "oversized-unit daily energy ordering", 30.0, oversized_unit_ordering},
        {9, "model allocation table", 1.0, allocation_matrix},
        {10, "end-to-end performance", 0.0, end_to_end},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        const double elapsed = seconds_since(t0);
        const bool in_time = c.time_limit <= 0.0 || elapsed < c.time_limit;
        const bool pass = o.ok && in_time;
        failed += !pass;
        std::string timing = fmt::format("{:.2f} s", elapsed);
        if (c.time_limit > 0.0) timing += fmt::format(" (limit {:g} s)", c.time_limit);
        std::printf("%s  [%2d] %s: %s; %s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
