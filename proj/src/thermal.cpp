#include "mzsim/thermal.hpp"

#include "mzsim/error.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace mzsim {

namespace {

SurfaceClass as_seen_from_b(SurfaceClass cls) {
    if (cls == SurfaceClass::Floor) return SurfaceClass::Ceiling;
    if (cls == SurfaceClass::Ceiling) return SurfaceClass::Floor;
    return cls;
}

double cosd(double x) { return std::cos(x * std::numbers::pi / 180.0); }

// Linearized long-wave conductance per unit area and emissivity between
// surfaces at two absolute temperatures.
double radiative_pair(double t1_k, double t2_k) {
    return kStefanBoltzmann * (t1_k * t1_k + t2_k * t2_k) * (t1_k + t2_k);
}

class Triplets {
public:
    explicit Triplets(std::size_t n) : n_(n) {}

    void add(std::size_t i, std::size_t j, double v) { t_.emplace_back(int(i), int(j), v); }
    void couple(std::size_t i, std::size_t j, double g) {
        add(i, i, g);
        add(j, j, g);
        add(i, j, -g);
        add(j, i, -g);
    }
    Eigen::SparseMatrix<double> build() const {
        const auto size = static_cast<Eigen::Index>(n_);
        Eigen::SparseMatrix<double> m(size, size);
        m.setFromTriplets(t_.begin(), t_.end());
        return m;
    }

private:
    std::size_t n_;
    std::vector<Eigen::Triplet<double>> t_;
};

}  // namespace

// ---------------------------------------------------------------------------
// construction

std::size_t ThermalModel::add_node(std::string name, double capacity) {
    node_names_.push_back(std::move(name));
    capacities_.push_back(capacity);
    return node_names_.size() - 1;
}

ThermalModel::ThermalModel(const Building& b, const ModelBindingSet& bindings) {
    const auto report = validate_building(b);
    if (!report.ok()) throw Error(ErrorCode::InvalidInput, "thermal model requires a building that validates");

    zones_.resize(b.zones.size());
    for (std::size_t z = 0; z < b.zones.size(); ++z) {
        const Zone& zone = b.zones[z];
        ZoneInfo& info = zones_[z];
        info.air_capacity = kZoneAirDensity * kAirSpecificHeat * zone.volume * zone.air_capacitance_multiplier;
        info.air_node = add_node(fmt::format("zone {} air", zone.id), info.air_capacity);
        info.volume = zone.volume;
        info.sensible_gain = zone.sensible_gain;
        info.latent_gain = zone.latent_gain;
        info.convection = bindings.zone<IndoorConvectionModel>(zone.id);
        info.shortwave = bindings.zone<IndoorShortwaveModel>(zone.id);
        if (info.convection.kind == IndoorConvectionModel::Kind::Correlation) nonlinear_ = true;
    }

    auto zone_of = [&](EntityId id) { return id == kOutside ? -1 : static_cast<int>(b.zone_index(id)); };

    for (const auto& c : b.components) {
        if (!c.is_surface()) continue;
        const Interambiance& ia = *b.find_interambiance(c.interambiance_id);
        Surface s;
        s.component = c.id;
        s.window = c.kind == ComponentKind::Window;
        s.ground_contact = c.ground_contact;
        s.tilt = ia.tilt;
        s.azimuth = ia.azimuth;
        s.transmittance = s.window ? c.glazing.transmittance : 0.0;

        RCNetwork net;
        if (s.window) {
            s.area = c.area;
            net = window_network(c.glazing.u_value, c.area);
        } else {
            s.area = net_wall_area(b, c);
            net = discretize_wall(c.layers, s.area, bindings.component<ConductionModel>(c.id));
        }
        if (s.ground_contact) {
            if (!ia.faces_outside())
                throw Error(ErrorCode::InvalidInput,
                            fmt::format("component {}: ground contact requires an outside-facing wall", c.id));
            s.ground = bindings.component<GroundModel>(c.id);
        }

        const std::size_t base = node_names_.size();
        for (std::size_t k = 0; k < net.nodes.size(); ++k) {
            const char* role = net.nodes[k].role == RCNetwork::Role::Inner   ? "a"
                               : net.nodes[k].role == RCNetwork::Role::Outer ? "b"
                                                                             : "i";
            add_node(fmt::format("{} {} node {} ({})", to_string(c.kind), c.id, k, role), net.nodes[k].capacity);
        }
        for (const auto& br : net.branches) branches_.push_back({base + br.a, base + br.b, br.conductance});

        const SurfaceClass cls = s.window ? SurfaceClass::Window : c.surface_class;
        s.a = {zone_of(ia.zone_a), base + net.inner(), c.face_a, cls};
        s.b = {zone_of(ia.zone_b), base + net.outer(), c.face_b, s.window ? cls : as_seen_from_b(cls)};
        surfaces_.push_back(s);
    }

    for (std::size_t si = 0; si < surfaces_.size(); ++si) {
        for (bool is_a : {true, false}) {
            const Face& f = is_a ? surfaces_[si].a : surfaces_[si].b;
            if (f.zone < 0) continue;
            ZoneInfo& zi = zones_[static_cast<std::size_t>(f.zone)];
            zi.faces.emplace_back(si, is_a);
            zi.interior.push_back({surfaces_[si].area, f.surface_class, f.properties.sw_absorptance,
                                   f.properties.sw_reflectance, f.properties.lw_emissivity});
        }
    }

    for (std::size_t z = 0; z < zones_.size(); ++z) {
        ZoneInfo& zi = zones_[z];
        const auto lw_model = bindings.zone<IndoorLongwaveModel>(b.zones[z].id);
        if (zi.interior.empty()) continue;
        if (zi.interior.size() < 2 && lw_model.kind == IndoorLongwaveModel::Kind::Detailed)
            throw Error(ErrorCode::InvalidInput,
                        fmt::format("zone {}: DETAILED long-wave exchange needs at least two surfaces", b.zones[z].id));
        zi.longwave = longwave_indoor(zi.interior, lw_model);
        auto face_node = [&](std::size_t k) {
            const auto [si, is_a] = zi.faces[k];
            return is_a ? surfaces_[si].a.node : surfaces_[si].b.node;
        };
        if (zi.longwave.uses_star_node) {
            double total = 0.0;
            for (double g : zi.longwave.star_conductance) total += g;
            if (total <= 0.0) continue;
            zi.star_node = static_cast<int>(add_node(fmt::format("zone {} radiant star", b.zones[z].id), 0.0));
            for (std::size_t k = 0; k < zi.faces.size(); ++k)
                if (zi.longwave.star_conductance[k] > 0.0)
                    branches_.push_back({face_node(k), std::size_t(zi.star_node), zi.longwave.star_conductance[k]});
        } else {
            const auto& g = zi.longwave.pair_conductance;
            for (Eigen::Index i = 0; i < g.rows(); ++i)
                for (Eigen::Index j = i + 1; j < g.cols(); ++j)
                    if (g(i, j) > 0.0)
                        branches_.push_back({face_node(std::size_t(i)), face_node(std::size_t(j)), g(i, j)});
        }
    }

    // initial temperatures: zones at their initial value, walls and star nodes
    // at the mean of the zones they touch
    initial_.assign(node_count(), 0.0);
    for (std::size_t z = 0; z < zones_.size(); ++z) {
        initial_[zones_[z].air_node] = b.zones[z].initial_temperature;
        if (zones_[z].star_node >= 0) initial_[std::size_t(zones_[z].star_node)] = b.zones[z].initial_temperature;
        initial_humidity_.push_back(b.zones[z].initial_humidity_ratio);
    }
    std::size_t next = 0;
    for (const auto& s : surfaces_) {
        double sum = 0.0;
        int n = 0;
        for (int z : {s.a.zone, s.b.zone})
            if (z >= 0) sum += b.zones[std::size_t(z)].initial_temperature, ++n;
        const double t0 = n ? sum / n : 20.0;
        const std::size_t first = std::min(s.a.node, s.b.node), last = std::max(s.a.node, s.b.node);
        for (std::size_t k = first; k <= last; ++k) initial_[k] = t0;
        next = last + 1;
    }
    (void)next;
}

ThermalState ThermalModel::initial_state() const { return {initial_, initial_humidity_}; }

ZoneState ThermalModel::zone_state(const ThermalState& s, std::size_t zone) const {
    const ZoneInfo& zi = zones_.at(zone);
    ZoneState out;
    out.air_temperature = s.temperatures[zi.air_node];
    out.humidity_ratio = s.humidity[zone];
    for (const auto& [si, is_a] : zi.faces)
        out.surface_temperatures.push_back(s.temperatures[is_a ? surfaces_[si].a.node : surfaces_[si].b.node]);
    return out;
}

// ---------------------------------------------------------------------------
// boundary data

StepBoundary ThermalModel::boundary(const WeatherRecord& r, const Site& site, const ModelBindingSet& bindings) const {
    StepBoundary out;
    out.outdoor_temperature = r.dry_bulb;
    out.outdoor_humidity_ratio = r.humidity_ratio;
    out.sky_temperature = sky_temperature(r, bindings.building<SkyModel>()) - kKelvin;
    out.month = month_index(r.timestamp);
    out.outside_film.assign(surfaces_.size(), 0.0);
    out.outer_absorbed.assign(surfaces_.size(), 0.0);
    out.entering_direct.assign(zones_.size(), 0.0);
    out.entering_diffuse.assign(zones_.size(), 0.0);

    const int doy = day_of_year(r.timestamp);
    const SolarPosition pos = solar_position(site, r.timestamp);
    const IrradianceSplit split = split_diffuse(r, pos, bindings.building<DiffuseModel>(), doy);
    const auto& conv = bindings.building<OutdoorConvectionModel>();

    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
        const Surface& s = surfaces_[i];
        const Face* outside = s.outside_face();
        if (!outside || s.ground_contact) continue;
        const SurfaceIrradiance irr =
            surface_irradiance(split.direct_normal, split.diffuse_horizontal, pos, s.tilt, s.azimuth, site.albedo);
        out.outside_film[i] = outdoor_film_coefficient(conv, r.wind_speed, s.azimuth, r.wind_direction);
        out.outer_absorbed[i] = outside->properties.sw_absorptance * irr.total() * s.area;
        if (s.window) {
            const auto z = static_cast<std::size_t>(s.inside_face_of_outside_wall()->zone);
            out.entering_direct[z] += s.transmittance * irr.direct * s.area;
            out.entering_diffuse[z] += s.transmittance * (irr.diffuse_sky + irr.reflected_ground) * s.area;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// assembly and stepping

std::vector<double> ThermalModel::film_coefficients(const ThermalState& st) const {
    std::vector<double> h;
    for (const auto& zi : zones_) {
        const double t_air = st.temperatures[zi.air_node];
        for (std::size_t k = 0; k < zi.faces.size(); ++k) {
            const auto [si, is_a] = zi.faces[k];
            const Face& f = is_a ? surfaces_[si].a : surfaces_[si].b;
            h.push_back(indoor_film_coefficient(zi.convection, st.temperatures[f.node] - t_air, f.surface_class));
        }
    }
    return h;
}

AssembledSystem ThermalModel::assemble(const StepBoundary& bd, std::span<const DirectedFlow> flows,
                                       std::span<const double> injection, const ThermalState& old,
                                       const ThermalState& iterate, double dt) const {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidInput, "time step must be positive");
    const std::size_t n = node_count();
    Triplets k(n);
    AssembledSystem sys;
    sys.node_names = node_names_;
    sys.dt = dt;
    sys.capacity = Eigen::Map<const Eigen::VectorXd>(capacities_.data(), Eigen::Index(n));
    sys.source = Eigen::VectorXd::Zero(Eigen::Index(n));
    auto& src = sys.source;

    for (const auto& br : branches_) k.couple(br.a, br.b, br.g);

    auto to_boundary = [&](std::size_t node, double g, double t) {
        k.add(node, node, g);
        src[Eigen::Index(node)] += g * t;
    };

    // interior films
    const std::vector<double> h = film_coefficients(iterate);
    std::size_t hk = 0;
    for (const auto& zi : zones_) {
        for (const auto& [si, is_a] : zi.faces) {
            const Face& f = is_a ? surfaces_[si].a : surfaces_[si].b;
            k.couple(f.node, zi.air_node, h[hk++] * surfaces_[si].area);
        }
    }

    // outside faces: convection, sky and ground long-wave, absorbed sun; or soil
    const double t_out_k = bd.outdoor_temperature + kKelvin;
    const double t_sky_k = bd.sky_temperature + kKelvin;
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
        const Surface& s = surfaces_[i];
        const Face* f = s.outside_face();
        if (!f) continue;
        if (s.ground_contact) {
            const double t_ground =
                s.ground.kind == GroundModel::Kind::Monthly ? s.ground.monthly[std::size_t(bd.month)] : s.ground.temperature;
            to_boundary(f->node, s.area / s.ground.soil_resistance, t_ground);
            continue;
        }
        to_boundary(f->node, bd.outside_film.at(i) * s.area, bd.outdoor_temperature);
        const double eps = f->properties.lw_emissivity;
        if (eps > 0.0) {
            const double ts = old.temperatures[f->node] + kKelvin;
            const double f_sky = (1.0 + cosd(s.tilt)) / 2.0;
            to_boundary(f->node, eps * radiative_pair(ts, t_sky_k) * s.area * f_sky, bd.sky_temperature);
            if (f_sky < 1.0)
                to_boundary(f->node, eps * radiative_pair(ts, t_out_k) * s.area * (1.0 - f_sky), bd.outdoor_temperature);
        }
        src[Eigen::Index(f->node)] += bd.outer_absorbed.at(i);
    }

    // transmitted sun and internal gains
    for (std::size_t z = 0; z < zones_.size(); ++z) {
        const ZoneInfo& zi = zones_[z];
        const double direct = bd.entering_direct.empty() ? 0.0 : bd.entering_direct[z];
        const double diffuse = bd.entering_diffuse.empty() ? 0.0 : bd.entering_diffuse[z];
        if (direct + diffuse > 0.0) {
            const auto absorbed = shortwave_distribution(zi.interior, direct, diffuse, zi.shortwave);
            for (std::size_t j = 0; j < zi.faces.size(); ++j) {
                const auto [si, is_a] = zi.faces[j];
                src[Eigen::Index(is_a ? surfaces_[si].a.node : surfaces_[si].b.node)] += absorbed[j];
            }
        }
        src[Eigen::Index(zi.air_node)] += zi.sensible_gain + (injection.empty() ? 0.0 : injection[z]);
    }

    // upwind advection: air enters a zone at the upstream temperature
    for (const auto& fl : flows) {
        if (fl.to < 0 || fl.from == fl.to || fl.mass <= 0.0) continue;
        const double g = fl.mass * kAirSpecificHeat;
        const std::size_t to = zones_[std::size_t(fl.to)].air_node;
        k.add(to, to, g);
        if (fl.from < 0)
            src[Eigen::Index(to)] += g * bd.outdoor_temperature;
        else
            k.add(to, zones_[std::size_t(fl.from)].air_node, -g);
    }

    sys.conductance = k.build();
    return sys;
}

namespace {

struct Factorized {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::VectorXd rhs;
};

void factorize(const AssembledSystem& sys, const Eigen::VectorXd& old, Factorized& f) {
    const Eigen::Index n = sys.capacity.size();
    Eigen::SparseMatrix<double> a = sys.conductance;
    for (Eigen::Index i = 0; i < n; ++i) a.coeffRef(i, i) += sys.capacity[i] / sys.dt;
    a.makeCompressed();

    f.lu.analyzePattern(a);
    f.lu.factorize(a);
    if (f.lu.info() != Eigen::Success) {
        std::string culprit;
        for (Eigen::Index i = 0; i < n && culprit.empty(); ++i) {
            bool empty = true;
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, i); it; ++it)
                if (it.value() != 0.0) empty = false;
            if (empty) culprit = sys.node_names[std::size_t(i)];
        }
        throw Error(ErrorCode::SingularSystem,
                    culprit.empty() ? "thermal system is singular"
                                    : fmt::format("thermal system is singular: node '{}' is disconnected", culprit));
    }
    f.rhs = sys.capacity.cwiseProduct(old) / sys.dt + sys.source;
}

}  // namespace

Eigen::VectorXd advance(const AssembledSystem& sys, const Eigen::VectorXd& old) {
    Factorized f;
    factorize(sys, old, f);
    return f.lu.solve(f.rhs);
}

StepResult ThermalModel::step(const StepBoundary& bd, std::span<const DirectedFlow> flows,
                              std::span<const double> injection, std::span<const IdealCooling> ideal,
                              const ThermalState& old, double dt) const {
    constexpr int kMaxPasses = 20;
    constexpr double kTolerance = 0.01;

    const Eigen::VectorXd t_old = Eigen::Map<const Eigen::VectorXd>(old.temperatures.data(), Eigen::Index(node_count()));
    StepResult result;
    ThermalState iterate = old;

    for (int pass = 1;; ++pass) {
        const AssembledSystem sys = assemble(bd, flows, injection, old, iterate, dt);
        Factorized f;
        factorize(sys, t_old, f);
        Eigen::VectorXd t = f.lu.solve(f.rhs);

        result.ideal_demand.assign(ideal.size(), 0.0);
        result.ideal_delivered.assign(ideal.size(), 0.0);
        if (!ideal.empty()) {
            // response of every node to one watt injected in each controlled zone
            const auto m = Eigen::Index(ideal.size());
            Eigen::MatrixXd response(t.size(), m);
            for (Eigen::Index c = 0; c < m; ++c) {
                Eigen::VectorXd unit = Eigen::VectorXd::Zero(t.size());
                unit[Eigen::Index(zones_[ideal[std::size_t(c)].zone].air_node)] = 1.0;
                response.col(c) = f.lu.solve(unit);
            }
            // active set: zones above setpoint receive the extraction that holds it
            std::vector<bool> active(ideal.size());
            for (std::size_t c = 0; c < ideal.size(); ++c)
                active[c] = t[Eigen::Index(zones_[ideal[c].zone].air_node)] > ideal[c].setpoint;
            Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
            for (std::size_t round = 0; round <= ideal.size(); ++round) {
                std::vector<Eigen::Index> act;
                for (std::size_t c = 0; c < ideal.size(); ++c)
                    if (active[c]) act.push_back(Eigen::Index(c));
                q.setZero();
                if (act.empty()) break;
                const auto na = Eigen::Index(act.size());
                Eigen::MatrixXd r(na, na);
                Eigen::VectorXd excess(na);
                for (Eigen::Index i = 0; i < na; ++i) {
                    const auto node = Eigen::Index(zones_[ideal[std::size_t(act[i])].zone].air_node);
                    excess[i] = t[node] - ideal[std::size_t(act[i])].setpoint;
                    for (Eigen::Index j = 0; j < na; ++j) r(i, j) = response(node, act[j]);
                }
                const Eigen::VectorXd qa = r.partialPivLu().solve(excess);
                bool changed = false;
                for (Eigen::Index i = 0; i < na; ++i) {
                    q[act[i]] = qa[i];
                    if (qa[i] < 0.0) active[std::size_t(act[i])] = false, changed = true;
                }
                if (!changed) break;
            }
            for (Eigen::Index c = 0; c < m; ++c) {
                const double demand = std::max(0.0, q[c]);
                const double delivered = std::min(demand, ideal[std::size_t(c)].max_sensible);
                result.ideal_demand[std::size_t(c)] = demand;
                result.ideal_delivered[std::size_t(c)] = delivered;
                t -= delivered * response.col(c);
            }
        }

        ThermalState next{std::vector<double>(t.data(), t.data() + t.size()), old.humidity};
        result.h_iterations = pass;
        if (!nonlinear_) {
            result.state = std::move(next);
            return result;
        }
        const auto h_used = film_coefficients(iterate);
        const auto h_new = film_coefficients(next);
        double dh = 0.0;
        for (std::size_t i = 0; i < h_used.size(); ++i) dh = std::max(dh, std::fabs(h_new[i] - h_used[i]));
        result.max_dh = dh;
        iterate = std::move(next);
        if (dh < kTolerance) {
            result.state = std::move(iterate);
            return result;
        }
        if (pass >= kMaxPasses)
            throw Error(ErrorCode::NonConvergence,
                        fmt::format("film coefficient iteration did not converge (max dh {:.4f} W/m2K)", dh));
    }
}

// ---------------------------------------------------------------------------
// moisture

MoistureResult moisture_balance(std::span<const double> volumes, std::span<const double> old_w,
                                std::span<const double> air_t, std::span<const DirectedFlow> flows, double outdoor_w,
                                std::span<const double> latent_sources, std::span<const double> latent_extraction,
                                double dt) {
    const auto n = Eigen::Index(volumes.size());
    if (old_w.size() != volumes.size() || air_t.size() != volumes.size())
        throw Error(ErrorCode::InvalidInput, "moisture balance inputs have inconsistent sizes");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b(n);
    for (Eigen::Index z = 0; z < n; ++z) {
        const double mass = kZoneAirDensity * volumes[std::size_t(z)];
        a(z, z) = mass / dt;
        double latent = 0.0;
        if (!latent_sources.empty()) latent += latent_sources[std::size_t(z)];
        if (!latent_extraction.empty()) latent -= latent_extraction[std::size_t(z)];
        b[z] = mass / dt * old_w[std::size_t(z)] + latent / kLatentHeat;
    }
    for (const auto& f : flows) {
        if (f.to < 0 || f.from == f.to || f.mass <= 0.0) continue;
        a(f.to, f.to) += f.mass;
        if (f.from < 0)
            b[f.to] += f.mass * outdoor_w;
        else
            a(f.to, f.from) -= f.mass;
    }
    const Eigen::VectorXd w = a.partialPivLu().solve(b);
    MoistureResult out;
    out.humidity.resize(volumes.size());
    for (std::size_t z = 0; z < volumes.size(); ++z) {
        const double hi = saturation_humidity_ratio(air_t[z]);
        double v = w[Eigen::Index(z)];
        if (v < 0.0 || v > hi) {
            out.clamped_zones.push_back(z);
            v = std::clamp(v, 0.0, hi);
        }
        out.humidity[z] = v;
    }
    return out;
}

}  // namespace mzsim
