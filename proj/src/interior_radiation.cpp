#include "mzsim/interior_radiation.hpp"

#include "mzsim/error.hpp"
#include "mzsim/weather.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace mzsim {

double indoor_film_coefficient(const IndoorConvectionModel& m, double delta_t, SurfaceClass cls) {
    if (m.kind == IndoorConvectionModel::Kind::Constant) return m.h;
    const double gap = std::fabs(delta_t);
    double h = 0.0;
    switch (cls) {
    case SurfaceClass::Floor:
        // warm floor drives the air upward; a cold floor stratifies
        if (delta_t > 0.0) h = m.horizontal_a * std::pow(gap, m.horizontal_b);
        break;
    case SurfaceClass::Ceiling:
        if (delta_t < 0.0) h = m.horizontal_a * std::pow(gap, m.horizontal_b);
        break;
    case SurfaceClass::VerticalWall:
    case SurfaceClass::Window:
    case SurfaceClass::InteriorSeparation:
        h = m.vertical_a * std::pow(gap, m.vertical_b);
        break;
    }
    return std::max(h, m.h_min);
}

double linearized_radiative_coefficient(double emissivity, double t_ref) {
    return 4.0 * emissivity * kStefanBoltzmann * t_ref * t_ref * t_ref;
}

LongwaveCoupling longwave_indoor(std::span<const InteriorSurface> s, const IndoorLongwaveModel& model) {
    const auto n = static_cast<Eigen::Index>(s.size());
    LongwaveCoupling out;
    const double t3 = 4.0 * kStefanBoltzmann * std::pow(model.reference_temperature, 3);

    if (model.kind == IndoorLongwaveModel::Kind::MrtStar) {
        out.uses_star_node = true;
        for (const auto& f : s) out.star_conductance.push_back(t3 * f.lw_emissivity * f.area);
        return out;
    }

    if (s.size() < 2) throw Error(ErrorCode::InvalidInput, "DETAILED long-wave exchange needs at least two surfaces");
    out.uses_star_node = false;
    out.pair_conductance = Eigen::MatrixXd::Zero(n, n);

    double total = 0.0;
    for (const auto& f : s) total += f.area;
    Eigen::MatrixXd view = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) view(i, j) = s[j].area / (total - s[i].area);

    Eigen::VectorXd eps(n);
    for (Eigen::Index i = 0; i < n; ++i) eps[i] = s[i].lw_emissivity;
    if (eps.maxCoeff() <= 0.0) return out;

    // Gebhart absorption factors: B = F diag(eps) + F diag(1 - eps) B
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - view * (Eigen::VectorXd::Ones(n) - eps).asDiagonal();
    const Eigen::MatrixXd gebhart = lhs.fullPivLu().solve(view * eps.asDiagonal());

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) out.pair_conductance(i, j) = t3 * eps[i] * s[i].area * gebhart(i, j);
    // the area-ratio view factors are not reciprocal, so symmetrize
    out.pair_conductance = 0.5 * (out.pair_conductance + out.pair_conductance.transpose()).eval();
    return out;
}

SurfaceGroup group_of(SurfaceClass cls) {
    switch (cls) {
    case SurfaceClass::Floor: return SurfaceGroup::Floors;
    case SurfaceClass::Ceiling:
    case SurfaceClass::VerticalWall: return SurfaceGroup::Walls;
    case SurfaceClass::Window: return SurfaceGroup::Windows;
    case SurfaceClass::InteriorSeparation: return SurfaceGroup::Separations;
    }
    return SurfaceGroup::Walls;
}

namespace {

constexpr std::size_t kGroups = 4;

bool all_floors(std::span<const InteriorSurface> s) {
    for (const auto& f : s)
        if (group_of(f.surface_class) != SurfaceGroup::Floors) return false;
    return true;
}

bool group_sees(SurfaceGroup from, SurfaceGroup to, bool floors_only) {
    return floors_only || !(from == SurfaceGroup::Floors && to == SurfaceGroup::Floors);
}

// First-incidence power per surface, before any reflection.
Eigen::VectorXd first_incidence(std::span<const InteriorSurface> s, double direct, double diffuse) {
    const auto n = static_cast<Eigen::Index>(s.size());
    double total = 0.0, floors = 0.0;
    for (const auto& f : s) {
        total += f.area;
        if (group_of(f.surface_class) == SurfaceGroup::Floors) floors += f.area;
    }
    if (direct > 0.0 && floors <= 0.0)
        throw Error(ErrorCode::NoFloorSurface, "direct short-wave radiation enters a zone with no floor surface");
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g[i] = diffuse * s[i].area / total;
        if (group_of(s[i].surface_class) == SurfaceGroup::Floors) g[i] += direct * s[i].area / floors;
    }
    return g;
}

Eigen::VectorXd absorptances(std::span<const InteriorSurface> s) {
    Eigen::VectorXd a(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) a[static_cast<Eigen::Index>(i)] = s[i].sw_absorptance;
    if (a.maxCoeff() <= 0.0) throw Error(ErrorCode::InvalidInput, "no surface in the zone absorbs short-wave radiation");
    return a;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Full per-surface system on reflected radiosity J:
//   (I - diag(rho) D) J = diag(rho) G0, absorbed = alpha * (G0 + D J)
std::vector<double> full_distribution(std::span<const InteriorSurface> s, const Eigen::VectorXd& g0) {
    const auto n = static_cast<Eigen::Index>(s.size());
    const Eigen::VectorXd alpha = absorptances(s);
    const Eigen::VectorXd rho = Eigen::VectorXd::Ones(n) - alpha;
    const Eigen::MatrixXd d = shortwave_redistribution(s);
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - rho.asDiagonal() * d;
    const Eigen::VectorXd j = lhs.partialPivLu().solve(rho.cwiseProduct(g0));
    return to_vector(alpha.cwiseProduct(g0 + d * j));
}

std::vector<double> grouped_distribution(std::span<const InteriorSurface> s, const Eigen::VectorXd& g0) {
    const bool floors_only = all_floors(s);
    std::array<double, kGroups> area{}, absorbed_area{}, incident{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto g = static_cast<std::size_t>(group_of(s[i].surface_class));
        area[g] += s[i].area;
        absorbed_area[g] += s[i].area * s[i].sw_absorptance;
        incident[g] += g0[static_cast<Eigen::Index>(i)];
    }
    std::vector<std::size_t> present;
    for (std::size_t g = 0; g < kGroups; ++g)
        if (area[g] > 0.0) present.push_back(g);
    const auto k = static_cast<Eigen::Index>(present.size());

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd alpha(k), g0g(k);
    for (Eigen::Index h = 0; h < k; ++h) {
        const auto gh = static_cast<SurfaceGroup>(present[h]);
        double visible = 0.0;
        for (Eigen::Index g = 0; g < k; ++g)
            if (group_sees(gh, static_cast<SurfaceGroup>(present[g]), floors_only)) visible += area[present[g]];
        for (Eigen::Index g = 0; g < k; ++g)
            if (group_sees(gh, static_cast<SurfaceGroup>(present[g]), floors_only)) d(g, h) = area[present[g]] / visible;
        alpha[h] = absorbed_area[present[h]] / area[present[h]];
        g0g[h] = incident[present[h]];
    }
    if (alpha.maxCoeff() <= 0.0) throw Error(ErrorCode::InvalidInput, "no surface in the zone absorbs short-wave radiation");
    const Eigen::VectorXd rho = Eigen::VectorXd::Ones(k) - alpha;
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(k, k) - rho.asDiagonal() * d;
    const Eigen::VectorXd j = lhs.partialPivLu().solve(rho.cwiseProduct(g0g));
    const Eigen::VectorXd incident_group = g0g + d * j;

    // spread the group irradiance over its members by area
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto g = static_cast<std::size_t>(group_of(s[i].surface_class));
        const auto h = static_cast<Eigen::Index>(std::find(present.begin(), present.end(), g) - present.begin());
        out[i] = s[i].sw_absorptance * incident_group[h] * s[i].area / area[g];
    }
    return out;
}

std::vector<double> simple_distribution(std::span<const InteriorSurface> s, const Eigen::VectorXd& g0) {
    const Eigen::VectorXd alpha = absorptances(s);
    double total = 0.0, mean_alpha = 0.0, reflected = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        total += s[i].area;
        mean_alpha += s[i].area * alpha[static_cast<Eigen::Index>(i)];
    }
    mean_alpha /= total;
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out[i] = alpha[k] * g0[k];
        reflected += (1.0 - alpha[k]) * g0[k];
    }
    // every later bounce spreads by area with the area-mean reflectance:
    // sum_k (1 - mean_alpha)^k = 1 / mean_alpha
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] += alpha[static_cast<Eigen::Index>(i)] * s[i].area / total * reflected / mean_alpha;
    return out;
}

}  // namespace

Eigen::MatrixXd shortwave_redistribution(std::span<const InteriorSurface> s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    const bool floors_only = all_floors(s);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto from = group_of(s[j].surface_class);
        double visible = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (group_sees(from, group_of(s[i].surface_class), floors_only)) visible += s[i].area;
        for (Eigen::Index i = 0; i < n; ++i)
            if (group_sees(from, group_of(s[i].surface_class), floors_only)) d(i, j) = s[i].area / visible;
    }
    return d;
}

std::vector<double> shortwave_distribution(std::span<const InteriorSurface> s, double direct, double diffuse,
                                           const IndoorShortwaveModel& model) {
    if (s.empty()) {
        if (direct + diffuse > 0.0) throw Error(ErrorCode::InvalidInput, "short-wave radiation enters a zone with no surfaces");
        return {};
    }
    if (direct < 0.0 || diffuse < 0.0) throw Error(ErrorCode::InvalidInput, "entering short-wave power must be non-negative");
    const Eigen::VectorXd g0 = first_incidence(s, direct, diffuse);
    if (direct + diffuse == 0.0) return std::vector<double>(s.size(), 0.0);
    switch (model.kind) {
    case IndoorShortwaveModel::Kind::Simple: return simple_distribution(s, g0);
    case IndoorShortwaveModel::Kind::Grouped4: return grouped_distribution(s, g0);
    case IndoorShortwaveModel::Kind::Full: return full_distribution(s, g0);
    }
    return {};
}

}  // namespace mzsim
