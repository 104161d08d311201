#pragma once

#include "mzsim/building.hpp"
#include "mzsim/conduction.hpp"
#include "mzsim/interior_radiation.hpp"
#include "mzsim/model_catalog.hpp"
#include "mzsim/simulation.hpp"
#include "mzsim/weather.hpp"

#include <Eigen/Dense>
#include <complex>
#include <filesystem>
#include <random>
#include <vector>

namespace fixture {

using namespace mzsim;

inline std::filesystem::path samples_dir() { return MZSIM_SAMPLES_DIR; }

inline WallLayer layer(double thickness, double conductivity, double density, double specific_heat) {
    return {thickness, conductivity, density, specific_heat};
}

// plaster, insulation, board
inline std::vector<WallLayer> light_wall() {
    return {layer(0.02, 0.8, 1600, 1000), layer(0.10, 0.04, 30, 1400), layer(0.015, 0.35, 900, 1000)};
}

// 30 cm of dense concrete
inline std::vector<WallLayer> heavy_wall() {
    return {layer(0.015, 0.7, 1800, 1000), layer(0.20, 1.75, 2400, 920), layer(0.015, 0.7, 1800, 1000)};
}

inline Component wall(EntityId id, EntityId ia, double area, std::vector<WallLayer> layers,
                      SurfaceClass cls = SurfaceClass::VerticalWall) {
    Component c;
    c.id = id;
    c.kind = ComponentKind::Wall;
    c.interambiance_id = ia;
    c.area = area;
    c.layers = std::move(layers);
    c.surface_class = cls;
    return c;
}

inline Component window(EntityId id, EntityId ia, double area, std::optional<EntityId> host = std::nullopt) {
    Component c;
    c.id = id;
    c.kind = ComponentKind::Window;
    c.interambiance_id = ia;
    c.area = area;
    c.surface_class = SurfaceClass::Window;
    c.host_wall = host;
    c.face_a = c.face_b = {0.08, 0.08, 0.84};
    return c;
}

inline Component crack(EntityId id, EntityId ia, double coefficient, double elevation,
                       std::optional<double> cp = std::nullopt) {
    Component c;
    c.id = id;
    c.kind = ComponentKind::AirlinkCrack;
    c.interambiance_id = ia;
    c.crack = {coefficient, 0.65};
    c.elevation = elevation;
    c.wind_pressure_coefficient = cp;
    return c;
}

inline Component opening(EntityId id, EntityId ia, double width, double height, double bottom = 0.0) {
    Component c;
    c.id = id;
    c.kind = ComponentKind::AirlinkLargeOpening;
    c.interambiance_id = ia;
    c.opening = {width, height, 0.78};
    c.elevation = bottom;
    return c;
}

inline Component split_unit(EntityId id, EntityId zone, SplitUnitSpec spec) {
    Component c;
    c.id = id;
    c.kind = ComponentKind::HvacSplit;
    c.zone_id = zone;
    c.hvac = std::move(spec);
    return c;
}

inline Zone zone(EntityId id, double volume, double t0 = 20.0) {
    Zone z;
    z.id = id;
    z.name = "zone " + std::to_string(id);
    z.volume = volume;
    z.initial_temperature = t0;
    return z;
}

inline Site reunion() {
    Site s;
    s.latitude = -20.9;
    s.longitude = 55.5;
    s.altitude = 75.0;
    s.time_zone_offset = 4.0;
    return s;
}

/// Five zones, twelve interambiances and seventeen components: a walled
/// exterior edge per zone, four partitions and three windows, two cracks.
inline Building five_zone_house() {
    Building b;
    b.name = "five zones";
    b.site = reunion();
    for (EntityId z = 1; z <= 5; ++z) b.zones.push_back(zone(z, 40.0, 26.0));
    EntityId ia = 1;
    const double az[] = {0, 90, 180, 270, 0};
    for (EntityId z = 1; z <= 5; ++z) b.interambiances.push_back({ia++, z, kOutside, az[z - 1], 90});
    b.interambiances.push_back({ia++, 1, kOutside, 0, 0});    // roof over the living room
    b.interambiances.push_back({ia++, 2, kOutside, 0, 180});  // slab under the kitchen
    const std::pair<EntityId, EntityId> inner[] = {{1, 2}, {1, 5}, {2, 5}, {3, 5}, {4, 5}};
    for (auto [a, bz] : inner) b.interambiances.push_back({ia++, a, bz, 0, 90});

    EntityId id = 1;
    for (EntityId i = 1; i <= 12; ++i) {
        auto cls = i == 6 ? SurfaceClass::Ceiling : i == 7 ? SurfaceClass::Floor
                   : i > 7 ? SurfaceClass::InteriorSeparation : SurfaceClass::VerticalWall;
        b.components.push_back(wall(id++, i, 12.0, light_wall(), cls));
    }
    b.components.back().layers = {layer(0.1, 0.9, 1500, 1000)};
    b.components.push_back(window(id++, 1, 2.0, 1));
    b.components.push_back(window(id++, 3, 2.0, 3));
    b.components.push_back(window(id++, 4, 1.5, 4));
    b.components.push_back(crack(id++, 1, 0.002, 0.5, 0.6));
    b.components.push_back(crack(id++, 3, 0.002, 2.0, -0.3));
    return b;
}

/// A zone whose only envelope is capacity-free glazing, so the air node is
/// the one capacity of the building: a first-order system with no sky
/// exchange, no sun and constant films.
inline Building glazed_box(double t0, double volume = 30.0, double multiplier = 10.0) {
    Building b;
    b.site = reunion();
    Zone z = zone(1, volume, t0);
    z.air_capacitance_multiplier = multiplier;
    b.zones.push_back(z);
    b.interambiances.push_back({1, 1, kOutside, 0, 90});
    Component w = window(1, 1, 10.0);
    w.face_a.lw_emissivity = 0.0;  // no interior long-wave node
    w.face_b.lw_emissivity = 0.0;  // no sky exchange
    w.glazing.transmittance = 0.0;
    b.components.push_back(w);
    return b;
}

/// Time constant of glazed_box under default constant film coefficients, s.
inline double glazed_box_time_constant(const Building& b) {
    const Zone& z = b.zones[0];
    const Component& w = b.components[0];
    const double cap = 353.25 / 293.15 * 1006.0 * z.volume * z.air_capacitance_multiplier;
    const double r = 1.0 / (3.0 * w.area) + 1.0 / (w.glazing.u_value * w.area) + 1.0 / (11.7 * w.area);
    return cap * r;
}

/// Two rooms joined by a doorway, each with a low crack to the outside.
inline Building two_rooms_with_door() {
    Building b;
    b.site = reunion();
    b.zones = {zone(1, 40.0, 30.0), zone(2, 40.0, 22.0)};
    b.zones[0].sensible_gain = 400.0;
    b.interambiances = {{1, 1, kOutside, 0, 90}, {2, 2, kOutside, 180, 90}, {3, 1, 2, 90, 90}};
    b.components = {wall(1, 1, 12.0, light_wall()), wall(2, 2, 12.0, light_wall()),
                    wall(3, 3, 10.0, {layer(0.1, 0.9, 1500, 1000)}, SurfaceClass::InteriorSeparation),
                    crack(4, 1, 0.002, 0.3), crack(5, 2, 0.002, 2.4), opening(6, 3, 0.9, 2.0)};
    return b;
}

/// Constant weather, hourly, from `start` over `days` days inclusive.
inline WeatherSeries constant_weather(Timestamp start, int days, double t, double wind = 0.0,
                                      double global = 0.0) {
    std::vector<WeatherRecord> r;
    for (int h = 0; h <= 24 * days; ++h) {
        WeatherRecord w;
        w.timestamp = start + std::chrono::hours(h);
        w.dry_bulb = t;
        w.humidity_ratio = 0.01;
        w.wind_speed = wind;
        w.global_horizontal = global;
        w.diffuse_horizontal = global * 0.3;
        r.push_back(w);
    }
    return WeatherSeries(std::move(r));
}

inline Timestamp at(const char* text) { return parse_timestamp(text); }

// ---------------------------------------------------------------------------
// random generators, fixed seeds

inline std::vector<WallLayer> random_layers(std::mt19937& rng) {
    std::uniform_int_distribution<int> count(1, 5);
    std::uniform_real_distribution<double> thick(0.005, 0.3), cond(0.03, 2.5), dens(20, 2500), cp(400, 2000);
    std::vector<WallLayer> out(static_cast<std::size_t>(count(rng)));
    for (auto& l : out) l = {thick(rng), cond(rng), dens(rng), cp(rng)};
    return out;
}

inline std::vector<InteriorSurface> random_zone(std::mt19937& rng) {
    std::uniform_int_distribution<int> count(2, 9);
    std::uniform_real_distribution<double> area(0.5, 30.0), alpha(0.05, 0.95);
    std::uniform_int_distribution<int> cls(0, 4);
    std::vector<InteriorSurface> s(static_cast<std::size_t>(count(rng)));
    for (auto& f : s) {
        f.area = area(rng);
        f.surface_class = static_cast<SurfaceClass>(cls(rng));
        f.sw_absorptance = alpha(rng);
        f.sw_reflectance = 1.0 - f.sw_absorptance;
    }
    s[0].surface_class = SurfaceClass::Floor;
    return s;
}

struct RandomAirflow {
    AirflowNetwork network;
    AirflowConditions conditions;
};

/// Connected network of cracks and large openings with wind and stack forcing.
inline RandomAirflow random_airflow(std::mt19937& rng) {
    std::uniform_int_distribution<int> zones(1, 6), kind(0, 3);
    std::uniform_real_distribution<double> coeff(1e-4, 1e-2), expo(0.5, 1.0), width(0.4, 1.5), height(1.5, 2.5),
        elev(0.0, 6.0), cp(-0.8, 0.8), temp(280.0, 310.0), wind(0.0, 8.0), unit(0.0, 1.0);
    RandomAirflow out;
    const int n = zones(rng);
    out.network.zone_count = static_cast<std::size_t>(n);
    auto add = [&](int from, int to) {
        AirflowLink l;
        l.from = from;
        l.to = to;
        if (kind(rng) == 0) {
            l.kind = AirflowLink::Kind::LargeOpening;
            l.opening = {width(rng), height(rng), 0.78};
        } else {
            l.crack = {coeff(rng), expo(rng)};
        }
        l.elevation = elev(rng);
        if (from == kOutsideNode || to == kOutsideNode) l.cp = cp(rng);
        out.network.links.push_back(l);
    };
    // spanning tree rooted at the outside, then extra links
    for (int z = 0; z < n; ++z) {
        std::uniform_int_distribution<int> parent(-1, z - 1);
        add(parent(rng), z);
    }
    const int extra = std::uniform_int_distribution<int>(0, 2 * n)(rng);
    for (int k = 0; k < extra; ++k) {
        std::uniform_int_distribution<int> node(-1, n - 1);
        int a = node(rng), b = node(rng);
        if (a == b) continue;
        unit(rng) < 0.5 ? add(a, b) : add(b, a);
    }
    for (int z = 0; z < n; ++z) out.conditions.zone_temperatures.push_back(temp(rng));
    out.conditions.outside_temperature = temp(rng);
    out.conditions.wind_speed = wind(rng);
    return out;
}

// ---------------------------------------------------------------------------
// independent oracles

/// Heat flow leaving the outer node of a network with both faces held at
/// fixed temperatures, by a dense solve of the interior nodes.
inline double dense_steady_flux(const RCNetwork& net, double t_in, double t_out) {
    const auto n = static_cast<Eigen::Index>(net.nodes.size());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (const auto& br : net.branches) {
        const auto a = static_cast<Eigen::Index>(br.a), b = static_cast<Eigen::Index>(br.b);
        k(a, a) += br.conductance, k(b, b) += br.conductance;
        k(a, b) -= br.conductance, k(b, a) -= br.conductance;
    }
    const auto in = static_cast<Eigen::Index>(net.inner()), out = static_cast<Eigen::Index>(net.outer());
    Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
    t[in] = t_in, t[out] = t_out;
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i)
        if (i != in && i != out) free.push_back(i);
    const auto m = static_cast<Eigen::Index>(free.size());
    if (m > 0) {
        Eigen::MatrixXd a(m, m);
        Eigen::VectorXd rhs(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            rhs[i] = -(k(free[i], in) * t_in + k(free[i], out) * t_out);
            for (Eigen::Index j = 0; j < m; ++j) a(i, j) = k(free[i], free[j]);
        }
        const Eigen::VectorXd x = a.fullPivLu().solve(rhs);
        for (Eigen::Index i = 0; i < m; ++i) t[free[i]] = x[i];
    }
    // flux arriving at the outer node
    return -(k.row(out) * t)(0);
}

/// Periodic transmittance of a network by a dense complex nodal solve: unit
/// amplitude on the inner face, outer face held at zero, per unit area.
inline std::complex<double> dense_transmittance(const RCNetwork& net, double area, double period) {
    using C = std::complex<double>;
    const auto n = static_cast<Eigen::Index>(net.nodes.size());
    const C jw(0.0, 2.0 * 3.14159265358979323846 / period);
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& br : net.branches) {
        const auto a = static_cast<Eigen::Index>(br.a), b = static_cast<Eigen::Index>(br.b);
        y(a, a) += br.conductance, y(b, b) += br.conductance;
        y(a, b) -= br.conductance, y(b, a) -= br.conductance;
    }
    for (Eigen::Index i = 0; i < n; ++i) y(i, i) += jw * net.nodes[static_cast<std::size_t>(i)].capacity;
    const auto in = static_cast<Eigen::Index>(net.inner()), out = static_cast<Eigen::Index>(net.outer());
    Eigen::MatrixXcd a = y;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index fixed : {in, out}) {
        a.row(fixed).setZero();
        a(fixed, fixed) = 1.0;
    }
    rhs[in] = 1.0;
    const Eigen::VectorXcd t = a.fullPivLu().solve(rhs);
    // heat flowing out of the outer face into the held boundary
    C flux = 0.0;
    for (const auto& br : net.branches) {
        const auto a2 = static_cast<Eigen::Index>(br.a), b2 = static_cast<Eigen::Index>(br.b);
        if (b2 == out) flux += br.conductance * (t[a2] - t[out]);
        if (a2 == out) flux += br.conductance * (t[b2] - t[out]);
    }
    return flux / area;
}

/// Share of power leaving surface j that lands on surface i: areas of the
/// surfaces j sees, floors excluded from a floor's view.
inline Eigen::MatrixXd area_view(const std::vector<InteriorSurface>& s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    bool only_floors = true;
    for (const auto& f : s) only_floors = only_floors && f.surface_class == SurfaceClass::Floor;
    auto sees = [&](Eigen::Index j, Eigen::Index i) {
        return only_floors || !(s[j].surface_class == SurfaceClass::Floor && s[i].surface_class == SurfaceClass::Floor);
    };
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double visible = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (sees(j, i)) visible += s[i].area;
        for (Eigen::Index i = 0; i < n; ++i)
            if (sees(j, i)) d(i, j) = s[i].area / visible;
    }
    return d;
}

/// Bounce-by-bounce reflection until the power still in flight is negligible.
inline std::vector<double> bounce_absorption(const std::vector<InteriorSurface>& s, double direct, double diffuse) {
    const auto n = static_cast<Eigen::Index>(s.size());
    double total = 0.0, floors = 0.0;
    for (const auto& f : s) {
        total += f.area;
        if (f.surface_class == SurfaceClass::Floor) floors += f.area;
    }
    Eigen::VectorXd incident(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        incident[i] = diffuse * s[i].area / total;
        if (s[i].surface_class == SurfaceClass::Floor) incident[i] += direct * s[i].area / floors;
    }
    const Eigen::MatrixXd d = area_view(s);
    std::vector<double> absorbed(s.size(), 0.0);
    for (int bounce = 0; bounce < 1000000 && incident.sum() > 1e-13 * (direct + diffuse); ++bounce) {
        Eigen::VectorXd reflected(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            absorbed[static_cast<std::size_t>(i)] += s[i].sw_absorptance * incident[i];
            reflected[i] = (1.0 - s[i].sw_absorptance) * incident[i];
        }
        incident = d * reflected;
    }
    return absorbed;
}

}  // namespace fixture
