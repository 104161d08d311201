#include "mzsim/airflow.hpp"

#include "mzsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace mzsim {

double air_density(double t_kelvin) {
    if (!(t_kelvin > 0.0)) throw Error(ErrorCode::InvalidInput, "absolute temperature must be positive");
    return 353.25 / t_kelvin;
}

double wind_pressure(double cp, double rho_out, double wind_speed) {
    if (wind_speed < 0.0) throw Error(ErrorCode::InvalidInput, "negative wind speed");
    return 0.5 * cp * rho_out * wind_speed * wind_speed;
}

LinkDerivative crack_flow_derivative(double c, double n, double dp) {
    const double adp = std::fabs(dp);
    if (adp < kLinearizationPressure) {
        const double k = c * std::pow(kLinearizationPressure, n - 1.0);
        return {k * dp, k};
    }
    const double f = c * std::pow(adp, n);
    return {std::copysign(f, dp), n * f / adp};
}

double crack_flow(double c, double n, double dp) { return crack_flow_derivative(c, n, dp).flow; }

namespace {

struct Segment {
    double mass = 0.0;
    double slope = 0.0;  // d mass / d(shift of the whole profile)
};

// Integral of Cd*W*sqrt(2*rho*|p(z)|) over [z0, z1] where p is linear and of
// one sign, written in a form that stays accurate as the gradient vanishes.
Segment integrate_segment(double cd_w, double rho, double z0, double z1, double p0, double p1) {
    const double s0 = std::sqrt(std::fabs(p0));
    const double s1 = std::sqrt(std::fabs(p1));
    const double len = z1 - z0;
    if (len <= 0.0 || s0 + s1 <= 0.0) return {};
    const double k = cd_w * std::sqrt(2.0 * rho);
    return {k * (2.0 / 3.0) * len * (s1 * s1 + s1 * s0 + s0 * s0) / (s1 + s0), k * len / (s1 + s0)};
}

}  // namespace

OpeningFlow large_opening_flow(double width, double height, double cd, double rho_a, double rho_b, double dp_bottom) {
    if (!(width > 0.0 && height > 0.0)) throw Error(ErrorCode::InvalidInput, "opening geometry must be positive");
    if (!(rho_a > 0.0 && rho_b > 0.0)) throw Error(ErrorCode::InvalidInput, "densities must be positive");

    const double cd_w = cd * width;
    const double gradient = (rho_a - rho_b) * kGravity;  // dp decreases by this per metre
    const double p0 = dp_bottom;
    const double p1 = dp_bottom - gradient * height;
    const double pl = kLinearizationPressure;
    OpeningFlow out;

    // Piece [z0, z1] on which p keeps one sign and stays on one side of the
    // linearization band. Inside the band the local flux is linear in p, so
    // the flow is continuous in dp_bottom.
    auto add = [&](double z0, double z1) {
        if (z1 <= z0) return;
        const double pa = p0 - gradient * z0, pb = p0 - gradient * z1;
        const bool forward = pa + pb > 0.0;
        const double k = cd_w * std::sqrt(2.0 * (forward ? rho_a : rho_b));
        Segment seg;
        if (std::max(std::fabs(pa), std::fabs(pb)) <= pl * (1.0 + 1e-12)) {
            const double len = z1 - z0;
            seg = {k * len * std::fabs(0.5 * (pa + pb)) / std::sqrt(pl), k * len / std::sqrt(pl)};
        } else {
            seg = integrate_segment(cd_w, forward ? rho_a : rho_b, z0, z1, pa, pb);
        }
        (forward ? out.a_to_b : out.b_to_a) += seg.mass;
        out.derivative += seg.slope;
    };

    if (gradient == 0.0) {
        add(0.0, height);
        return out;
    }
    std::vector<double> cuts = {0.0, height};
    for (double level : {-pl, 0.0, pl}) {
        const double z = (p0 - level) / gradient;
        if (z > 0.0 && z < height) cuts.push_back(z);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) add(cuts[i], cuts[i + 1]);

    if ((p0 > 0.0 && p1 < 0.0) || (p0 < 0.0 && p1 > 0.0)) out.neutral_height = p0 / gradient;
    return out;
}

AirflowNetwork build_airflow_network(const Building& b) {
    AirflowNetwork net;
    net.zone_count = b.zones.size();
    auto node = [&](EntityId z) { return z == kOutside ? kOutsideNode : static_cast<int>(b.zone_index(z)); };
    for (const auto& c : b.components) {
        if (!c.is_airlink()) continue;
        const Interambiance* ia = b.find_interambiance(c.interambiance_id);
        if (!ia) throw Error(ErrorCode::InvalidInput, fmt::format("component {}: missing interambiance", c.id));
        AirflowLink l;
        l.kind = c.kind == ComponentKind::AirlinkCrack ? AirflowLink::Kind::Crack : AirflowLink::Kind::LargeOpening;
        l.crack = c.crack;
        l.opening = c.opening;
        l.from = node(ia->zone_a);
        l.to = node(ia->zone_b);
        l.elevation = c.elevation;
        if (ia->faces_outside()) l.cp = c.wind_pressure_coefficient;
        l.component = c.id;
        net.links.push_back(l);
    }
    return net;
}

double FlowSolution::max_residual() const {
    double m = 0.0;
    for (double r : residuals) m = std::max(m, std::fabs(r));
    return m;
}

NetworkEquations evaluate_network(const AirflowNetwork& net, const AirflowConditions& cond,
                                  const Eigen::VectorXd& p) {
    const auto n = static_cast<Eigen::Index>(net.zone_count);
    if (cond.zone_temperatures.size() != net.zone_count)
        throw Error(ErrorCode::InvalidInput, "zone temperature count does not match the airflow network");
    NetworkEquations eq;
    eq.residual = Eigen::VectorXd::Zero(n);
    eq.jacobian = Eigen::MatrixXd::Zero(n, n);
    eq.flows.reserve(net.links.size());

    const double rho_out = air_density(cond.outside_temperature);
    auto density = [&](int node) {
        return node == kOutsideNode ? rho_out : air_density(cond.zone_temperatures[static_cast<std::size_t>(node)]);
    };

    for (const auto& link : net.links) {
        const double rho_a = density(link.from);
        const double rho_b = density(link.to);
        const double wind = link.cp ? wind_pressure(*link.cp, rho_out, cond.wind_speed) : 0.0;
        auto pressure_at = [&](int node, double rho, double z) {
            const double ref = node == kOutsideNode ? wind : p[node];
            return ref - rho * kGravity * z;
        };
        const double dp = pressure_at(link.from, rho_a, link.elevation) - pressure_at(link.to, rho_b, link.elevation);

        double flow = 0.0, slope = 0.0;
        LinkFlow lf;
        if (link.kind == AirflowLink::Kind::Crack) {
            const auto d = crack_flow_derivative(link.crack.coefficient, link.crack.exponent, dp);
            flow = d.flow;
            slope = d.derivative;
            (flow >= 0.0 ? lf.forward : lf.backward) = std::fabs(flow);
        } else {
            const auto o = large_opening_flow(link.opening.width, link.opening.height,
                                              link.opening.discharge_coefficient, rho_a, rho_b, dp);
            flow = o.net();
            slope = o.derivative;
            lf.forward = o.a_to_b;
            lf.backward = o.b_to_a;
            lf.neutral_height = o.neutral_height;
        }
        eq.flows.push_back(lf);

        // flow leaves `from` and enters `to`; dp rises with p_from and falls with p_to
        if (link.from != kOutsideNode) {
            eq.residual[link.from] -= flow;
            eq.jacobian(link.from, link.from) -= slope;
            if (link.to != kOutsideNode) eq.jacobian(link.from, link.to) += slope;
        }
        if (link.to != kOutsideNode) {
            eq.residual[link.to] += flow;
            eq.jacobian(link.to, link.to) -= slope;
            if (link.from != kOutsideNode) eq.jacobian(link.to, link.from) += slope;
        }
    }
    return eq;
}

FlowSolution solve_pressures(const AirflowNetwork& net, const AirflowConditions& cond, const AirflowModel& options) {
    const auto n = static_cast<Eigen::Index>(net.zone_count);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    FlowSolution sol;

    auto worst = [](const Eigen::VectorXd& r) { return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff(); };

    NetworkEquations eq = evaluate_network(net, cond, p);
    int it = 0;
    for (; it < options.max_iterations && worst(eq.residual) >= options.tolerance; ++it) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(eq.jacobian);
        if (!lu.isInvertible())
            throw Error(ErrorCode::SingularJacobian,
                        "airflow Jacobian is singular (a zone may have no path to the outside)");
        const Eigen::VectorXd step = lu.solve(-eq.residual);

        // Relaxed Newton step, halved while it makes the worst residual grow.
        double factor = options.relaxation;
        const double before = worst(eq.residual);
        Eigen::VectorXd trial = p + factor * step;
        NetworkEquations trial_eq = evaluate_network(net, cond, trial);
        for (int k = 0; k < 8 && worst(trial_eq.residual) > before; ++k) {
            factor *= 0.5;
            trial = p + factor * step;
            trial_eq = evaluate_network(net, cond, trial);
        }
        p = std::move(trial);
        eq = std::move(trial_eq);
    }
    if (worst(eq.residual) >= options.tolerance)
        throw Error(ErrorCode::NonConvergence,
                    fmt::format("airflow solve did not converge in {} iterations (worst residual {:.3e} kg/s)",
                                options.max_iterations, worst(eq.residual)));

    sol.pressures.assign(p.data(), p.data() + p.size());
    sol.residuals.assign(eq.residual.data(), eq.residual.data() + eq.residual.size());
    sol.flows = std::move(eq.flows);
    sol.iterations = it;
    return sol;
}

std::vector<DirectedFlow> directed_flows(const AirflowNetwork& net, const FlowSolution& sol) {
    std::vector<DirectedFlow> out;
    for (std::size_t i = 0; i < net.links.size(); ++i) {
        const auto& l = net.links[i];
        const auto& f = sol.flows[i];
        if (f.forward > 0.0) out.push_back({l.from, l.to, f.forward});
        if (f.backward > 0.0) out.push_back({l.to, l.from, f.backward});
    }
    return out;
}

std::vector<DirectedFlow> prescribed_flows(const Building& b, double rho_out) {
    std::vector<DirectedFlow> out;
    for (std::size_t i = 0; i < b.zones.size(); ++i) {
        const auto& z = b.zones[i];
        if (z.infiltration_ach <= 0.0) continue;
        const double m = z.infiltration_ach * z.volume * rho_out / 3600.0;
        out.push_back({kOutsideNode, static_cast<int>(i), m});
        out.push_back({static_cast<int>(i), kOutsideNode, m});
    }
    auto node = [&](EntityId z) { return z == kOutside ? kOutsideNode : static_cast<int>(b.zone_index(z)); };
    for (const auto& c : b.components) {
        if (!c.is_airlink() || c.prescribed_exchange <= 0.0) continue;
        const Interambiance* ia = b.find_interambiance(c.interambiance_id);
        if (!ia) continue;
        out.push_back({node(ia->zone_a), node(ia->zone_b), c.prescribed_exchange});
        out.push_back({node(ia->zone_b), node(ia->zone_a), c.prescribed_exchange});
    }
    return out;
}

}  // namespace mzsim
