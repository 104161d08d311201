#include "mzsim/hvac.hpp"

#include "mzsim/error.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>

namespace mzsim {

void check_unit(const SplitUnitSpec& u) {
    if (!(u.rated_total_capacity > 0.0 && u.rated_electric_power > 0.0))
        throw Error(ErrorCode::InvalidInput, "split unit: rated capacity and electric power must be positive");
    if (!(u.rated_shr > 0.0 && u.rated_shr <= 1.0))
        throw Error(ErrorCode::InvalidInput, "split unit: SHR must lie in (0, 1]");
    if (!(u.deadband > 0.0)) throw Error(ErrorCode::InvalidInput, "split unit: deadband must be positive");
    if (!(u.time_constant > 0.0)) throw Error(ErrorCode::InvalidInput, "split unit: time constant must be positive");
}

double nominal_cop(const SplitUnitSpec& u) { return u.rated_total_capacity / u.rated_electric_power; }

HvacOutput model0_ideal(double load, const SplitUnitSpec& u, double dt) {
    (void)dt;  // the ideal unit has no memory, so the step length does not matter
    HvacOutput out;
    load = std::max(load, 0.0);
    out.sensible = std::min(load, u.rated_total_capacity * u.rated_shr);
    out.total = out.sensible / u.rated_shr;
    out.latent = out.total - out.sensible;
    out.electric = out.total / nominal_cop(u);
    out.on_fraction = out.total / u.rated_total_capacity;
    out.unmet = load - out.sensible;
    return out;
}

bool thermostat_step(bool was_on, double t_air, double setpoint, double deadband) {
    if (t_air > setpoint + deadband / 2.0) return true;
    if (t_air < setpoint - deadband / 2.0) return false;
    return was_on;
}

double transient_capacity(double steady, double t, double tau) {
    if (!(tau > 0.0) || t < 0.0) throw Error(ErrorCode::InvalidInput, "transient capacity needs tau > 0 and t >= 0");
    return steady * (1.0 - std::exp(-t / tau));
}

double transient_energy(double steady, double t, double tau) {
    if (!(tau > 0.0) || t < 0.0) throw Error(ErrorCode::InvalidInput, "transient energy needs tau > 0 and t >= 0");
    return steady * (t + tau * std::expm1(-t / tau));
}

namespace {

// Mean of the transient factor over [t0, t0 + dt].
double mean_ramp(double t0, double dt, double tau) {
    return (transient_energy(1.0, t0 + dt, tau) - transient_energy(1.0, t0, tau)) / dt;
}

struct Decision {
    bool on = false;
    double ramp = 0.0;
    CyclingState next;
};

Decision cycle(const CyclingState& s, double t_air, const SplitUnitSpec& u, double dt) {
    if (!(dt > 0.0) || dt > 300.0)
        throw Error(ErrorCode::InvalidInput, fmt::format("cycling models need a step in (0, 300] s, got {}", dt));
    Decision d;
    d.on = thermostat_step(s.on, t_air, u.setpoint, u.deadband);
    d.next = s;
    d.next.on = d.on;
    if (!d.on) {
        d.next.time_since_on = 0.0;
        return d;
    }
    const double t0 = s.on ? s.time_since_on : 0.0;
    d.ramp = mean_ramp(t0, dt, u.time_constant);
    d.next.time_since_on = t0 + dt;
    d.next.on_time = s.on_time + dt;
    return d;
}

}  // namespace

CyclingStep model1_step(const CyclingState& s, double t_air, const SplitUnitSpec& u, double dt) {
    check_unit(u);
    const Decision d = cycle(s, t_air, u, dt);
    CyclingStep out{{}, d.next};
    if (!d.on) return out;
    out.output.total = u.rated_total_capacity * d.ramp;
    out.output.sensible = u.rated_shr * out.output.total;
    out.output.latent = out.output.total - out.output.sensible;
    out.output.electric = u.rated_electric_power;
    out.output.on_fraction = 1.0;
    return out;
}

bool has_performance_map(const SplitUnitSpec& u) {
    return u.map_total.size() == 4 && u.map_sensible.size() == 4 && u.map_electric.size() == 4;
}

MapPoint evaluate_map(const SplitUnitSpec& u, const HvacConditions& c) {
    if (!has_performance_map(u)) throw Error(ErrorCode::UnfittedMap, "split unit has no fitted performance map");
    auto eval = [&](const std::vector<double>& k) {
        return k[0] + k[1] * c.outdoor_temperature + k[2] * c.indoor_temperature + k[3] * c.indoor_humidity_ratio;
    };
    return {c.outdoor_temperature, c.indoor_temperature, c.indoor_humidity_ratio,
            eval(u.map_total),     eval(u.map_sensible), eval(u.map_electric)};
}

CyclingStep model2_step(const CyclingState& s, const HvacConditions& c, const SplitUnitSpec& u, double dt) {
    check_unit(u);
    const MapPoint steady = evaluate_map(u, c);
    const Decision d = cycle(s, c.indoor_temperature, u, dt);
    CyclingStep out{{}, d.next};
    if (!d.on) return out;
    out.output.total = std::max(0.0, steady.total) * d.ramp;
    out.output.sensible = std::clamp(steady.sensible * d.ramp, 0.0, out.output.total);
    out.output.latent = out.output.total - out.output.sensible;
    out.output.electric = std::max(0.0, steady.electric);
    out.output.on_fraction = 1.0;
    return out;
}

PerformanceFit fit_performance_map(std::span<const MapPoint> pts) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    if (n < 4) throw Error(ErrorCode::RankDeficient, fmt::format("performance map needs at least 4 points, got {}", n));
    Eigen::MatrixXd x(n, 4);
    Eigen::MatrixXd y(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = pts[static_cast<std::size_t>(i)];
        x.row(i) << 1.0, p.outdoor_temperature, p.indoor_temperature, p.indoor_humidity_ratio;
        y.row(i) << p.total, p.sensible, p.electric;
    }
    // scale columns so that the humidity ratio column does not fool the rank test
    Eigen::VectorXd scale = x.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < 4; ++j)
        if (scale[j] == 0.0) scale[j] = 1.0;
    const Eigen::MatrixXd xs = x * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4)
        throw Error(ErrorCode::RankDeficient,
                    fmt::format("performance map design matrix has rank {} < 4", static_cast<int>(qr.rank())));
    const Eigen::MatrixXd coef = scale.cwiseInverse().asDiagonal() * qr.solve(y);
    const Eigen::MatrixXd resid = x * coef - y;

    PerformanceFit fit;
    auto column = [&](Eigen::Index j) { return std::vector<double>(coef.col(j).data(), coef.col(j).data() + 4); };
    fit.total = column(0);
    fit.sensible = column(1);
    fit.electric = column(2);
    fit.rms_total = std::sqrt(resid.col(0).squaredNorm() / double(n));
    fit.rms_sensible = std::sqrt(resid.col(1).squaredNorm() / double(n));
    fit.rms_electric = std::sqrt(resid.col(2).squaredNorm() / double(n));
    return fit;
}

HvacSummary summarize(std::span<const HvacOutput> series, double dt) {
    if (series.empty()) throw Error(ErrorCode::InvalidInput, "cannot summarize an empty HVAC series");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidInput, "time step must be positive");
    constexpr double kJoulesPerKwh = 3.6e6;
    HvacSummary s;
    s.horizon_s = dt * double(series.size());
    const auto per_day = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(86400.0 / dt)));
    double electric_j = 0.0, cooling_j = 0.0, sensible_j = 0.0, on_s = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& o = series[i];
        if (i % per_day == 0) {
            s.daily_electric_kwh.push_back(0.0);
            s.daily_cooling_kwh.push_back(0.0);
        }
        s.daily_electric_kwh.back() += o.electric * dt / kJoulesPerKwh;
        s.daily_cooling_kwh.back() += o.total * dt / kJoulesPerKwh;
        electric_j += o.electric * dt;
        cooling_j += o.total * dt;
        sensible_j += o.sensible * dt;
        on_s += o.on_fraction * dt;
    }
    s.electric_kwh = electric_j / kJoulesPerKwh;
    s.cooling_kwh = cooling_j / kJoulesPerKwh;
    s.sensible_kwh = sensible_j / kJoulesPerKwh;
    if (electric_j > 0.0) s.mean_cop = cooling_j / electric_j;
    s.on_time_fraction = on_s / s.horizon_s;
    return s;
}

double CopCurve::at(double f) const {
    if (empty()) throw Error(ErrorCode::InvalidInput, "COP curve is empty");
    if (f <= on_fraction.front()) return cop.front();
    if (f >= on_fraction.back()) return cop.back();
    const auto hi = std::upper_bound(on_fraction.begin(), on_fraction.end(), f) - on_fraction.begin();
    const auto lo = hi - 1;
    const double w = (f - on_fraction[lo]) / (on_fraction[hi] - on_fraction[lo]);
    return cop[lo] + w * (cop[hi] - cop[lo]);
}

CopCurve cop_curve(std::span<const HvacOutput> series, double dt, double window) {
    if (!(dt > 0.0) || window < dt) throw Error(ErrorCode::InvalidInput, "COP window must be at least one step");
    const auto per = static_cast<std::size_t>(std::llround(window / dt));
    std::map<double, std::pair<double, int>> pooled;  // on-fraction -> (sum of COP, count)
    for (std::size_t start = 0; start + per <= series.size(); start += per) {
        double on = 0.0, cooling = 0.0, electric = 0.0;
        for (std::size_t i = start; i < start + per; ++i) {
            on += series[i].on_fraction;
            cooling += series[i].total;
            electric += series[i].electric;
        }
        if (electric <= 0.0) continue;
        auto& slot = pooled[on / double(per)];
        slot.first += cooling / electric;
        slot.second += 1;
    }
    CopCurve c;
    for (const auto& [f, acc] : pooled) {
        c.on_fraction.push_back(f);
        c.cop.push_back(acc.first / acc.second);
    }
    return c;
}

std::vector<HvacOutput> apply_cop_correction(std::span<const HvacOutput> ideal, const CopCurve& curve) {
    std::vector<HvacOutput> out(ideal.begin(), ideal.end());
    for (auto& o : out) {
        if (o.total <= 0.0) continue;
        const double cop = curve.at(o.on_fraction);
        if (cop > 0.0) o.electric = o.total / cop;
    }
    return out;
}

}  // namespace mzsim
