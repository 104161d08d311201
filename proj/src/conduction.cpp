#include "mzsim/conduction.hpp"

#include "mzsim/error.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numbers>

namespace mzsim {

namespace {

std::size_t find_role(const RCNetwork& net, RCNetwork::Role role) {
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        if (net.nodes[i].role == role) return i;
    throw Error(ErrorCode::InvalidInput, "network has no surface node of the requested role");
}

void check_layers(std::span<const WallLayer> layers, double area) {
    if (layers.empty()) throw Error(ErrorCode::InvalidInput, "wall has no layers");
    if (!(area > 0.0)) throw Error(ErrorCode::InvalidInput, "wall area must be positive");
    for (const auto& l : layers)
        if (!(l.thickness > 0.0 && l.conductivity > 0.0 && l.density > 0.0 && l.specific_heat > 0.0))
            throw Error(ErrorCode::InvalidInput, "wall layer properties must be strictly positive");
}

// Solves the nodal network with both surface temperatures imposed, returning
// all node temperatures. Complex admittance lets the same routine serve the
// steady and periodic cases.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_imposed(const RCNetwork& net, Scalar omega_i, Scalar t_in, Scalar t_out) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const std::size_t n = net.nodes.size();
    const std::size_t in = net.inner(), out = net.outer();

    std::vector<int> index(n, -1);
    int m = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (i != in && i != out) index[i] = m++;

    Vec t(static_cast<Eigen::Index>(n));
    t.setZero();
    t[static_cast<Eigen::Index>(in)] = t_in;
    t[static_cast<Eigen::Index>(out)] = t_out;
    if (m == 0) return t;

    Mat a = Mat::Zero(m, m);
    Vec rhs = Vec::Zero(m);
    for (std::size_t i = 0; i < n; ++i)
        if (index[i] >= 0) a(index[i], index[i]) += omega_i * Scalar(net.nodes[i].capacity);
    for (const auto& br : net.branches) {
        const Scalar g(br.conductance);
        const int ia = index[br.a], ib = index[br.b];
        if (ia >= 0) a(ia, ia) += g;
        if (ib >= 0) a(ib, ib) += g;
        if (ia >= 0 && ib >= 0) {
            a(ia, ib) -= g;
            a(ib, ia) -= g;
        }
        if (ia >= 0 && ib < 0) rhs[ia] += g * t[static_cast<Eigen::Index>(br.b)];
        if (ib >= 0 && ia < 0) rhs[ib] += g * t[static_cast<Eigen::Index>(br.a)];
    }
    Vec x = a.fullPivLu().solve(rhs);
    for (std::size_t i = 0; i < n; ++i)
        if (index[i] >= 0) t[static_cast<Eigen::Index>(i)] = x[index[i]];
    return t;
}

// Heat flow entering node `k` through its branches.
template <class Vec>
auto branch_inflow(const RCNetwork& net, const Vec& t, std::size_t k) {
    typename Vec::Scalar q(0);
    for (const auto& br : net.branches) {
        if (br.a == k) q += br.conductance * (t[static_cast<Eigen::Index>(br.b)] - t[static_cast<Eigen::Index>(k)]);
        if (br.b == k) q += br.conductance * (t[static_cast<Eigen::Index>(br.a)] - t[static_cast<Eigen::Index>(k)]);
    }
    return q;
}

}  // namespace

std::size_t RCNetwork::inner() const { return find_role(*this, Role::Inner); }
std::size_t RCNetwork::outer() const { return find_role(*this, Role::Outer); }

double RCNetwork::total_capacity() const {
    double c = 0.0;
    for (const auto& n : nodes) c += n.capacity;
    return c;
}

double wall_ua(std::span<const WallLayer> layers, double area) {
    check_layers(layers, area);
    double r = 0.0;
    for (const auto& l : layers) r += l.thickness / l.conductivity;
    return area / r;
}

double wall_capacity(std::span<const WallLayer> layers, double area) {
    check_layers(layers, area);
    double c = 0.0;
    for (const auto& l : layers) c += l.density * l.specific_heat * l.thickness;
    return area * c;
}

RCNetwork discretize_wall(std::span<const WallLayer> layers, double area, const ConductionModel& scheme) {
    const double ua = wall_ua(layers, area);
    const double cap = wall_capacity(layers, area);
    using Role = RCNetwork::Role;
    RCNetwork net;

    switch (scheme.kind) {
    case ConductionModel::Kind::R2C:
        net.nodes = {{cap / 2.0, Role::Inner}, {cap / 2.0, Role::Outer}};
        net.branches = {{0, 1, ua}};
        break;
    case ConductionModel::Kind::R3C2:
        // capacity-free faces, resistance split 1/4, 1/2, 1/4
        net.nodes = {{0.0, Role::Inner}, {cap / 2.0, Role::Internal}, {cap / 2.0, Role::Internal}, {0.0, Role::Outer}};
        net.branches = {{0, 1, 4.0 * ua}, {1, 2, 2.0 * ua}, {2, 3, 4.0 * ua}};
        break;
    case ConductionModel::Kind::PerLayer: {
        if (scheme.nodes_per_layer < 1) throw Error(ErrorCode::InvalidInput, "nodes_per_layer must be >= 1");
        // Each layer is cut into n T-sections (R/2, C, R/2). Capacity-free
        // junctions between sections are eliminated, so consecutive capacity
        // nodes are joined by the sum of the adjoining half resistances.
        const auto n = static_cast<std::size_t>(scheme.nodes_per_layer);
        net.nodes.push_back({0.0, Role::Inner});
        double pending_r = 0.0;  // resistance accumulated since the last node
        for (const auto& l : layers) {
            const double r_section = l.thickness / (l.conductivity * area) / static_cast<double>(n);
            const double c_section = l.density * l.specific_heat * l.thickness * area / static_cast<double>(n);
            for (std::size_t s = 0; s < n; ++s) {
                pending_r += r_section / 2.0;
                net.nodes.push_back({c_section, Role::Internal});
                net.branches.push_back({net.nodes.size() - 2, net.nodes.size() - 1, 1.0 / pending_r});
                pending_r = r_section / 2.0;
            }
        }
        net.nodes.push_back({0.0, Role::Outer});
        net.branches.push_back({net.nodes.size() - 2, net.nodes.size() - 1, 1.0 / pending_r});
        break;
    }
    }
    return net;
}

RCNetwork window_network(double u_value, double area) {
    RCNetwork net;
    net.nodes = {{0.0, RCNetwork::Role::Inner}, {0.0, RCNetwork::Role::Outer}};
    net.branches = {{0, 1, u_value * area}};
    return net;
}

double steady_flux(const RCNetwork& net, double t_inner, double t_outer) {
    const Eigen::VectorXd t = solve_imposed<double>(net, 0.0, t_inner, t_outer);
    return branch_inflow(net, t, net.outer());
}

PeriodicResponse analytic_periodic_response(std::span<const WallLayer> layers, double period_s) {
    if (!(period_s > 0.0)) throw Error(ErrorCode::InvalidInput, "period must be positive");
    using C = std::complex<double>;
    const double omega = 2.0 * std::numbers::pi / period_s;
    C a(1.0), b(0.0), c(0.0), d(1.0);
    for (const auto& l : layers) {
        const double diffusivity = l.conductivity / (l.density * l.specific_heat);
        const C k = std::sqrt(C(0.0, omega / diffusivity));
        const C kl = k * l.thickness;
        const C la = std::cosh(kl);
        const C lb = std::sinh(kl) / (l.conductivity * k);
        const C lc = l.conductivity * k * std::sinh(kl);
        const C ld = la;
        const C na = a * la + b * lc, nb = a * lb + b * ld;
        const C nc = c * la + d * lc, nd = c * lb + d * ld;
        a = na, b = nb, c = nc, d = nd;
    }
    return {1.0 / b, d / b, a / b};
}

PeriodicResponse network_periodic_response(const RCNetwork& net, double area, double period_s) {
    if (!(period_s > 0.0)) throw Error(ErrorCode::InvalidInput, "period must be positive");
    using C = std::complex<double>;
    const C jw(0.0, 2.0 * std::numbers::pi / period_s);
    const std::size_t in = net.inner(), out = net.outer();

    const Eigen::VectorXcd fwd = solve_imposed<C>(net, jw, C(1.0), C(0.0));
    const Eigen::VectorXcd bwd = solve_imposed<C>(net, jw, C(0.0), C(1.0));
    PeriodicResponse r;
    r.transmittance = branch_inflow(net, fwd, out) / area;
    r.inner_admittance = (jw * net.nodes[in].capacity - branch_inflow(net, fwd, in)) / area;
    r.outer_admittance = (jw * net.nodes[out].capacity - branch_inflow(net, bwd, out)) / area;
    return r;
}

}  // namespace mzsim
