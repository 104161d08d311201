#include "mzsim/project_io.hpp"

#include "mzsim/error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

namespace mzsim {

std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidInput, fmt::format("cannot read {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidInput, fmt::format("cannot write {}", path.string()));
    out << text;
}

namespace {

// ---------------------------------------------------------------------------
// schema helpers

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

class Schema {
public:
    explicit Schema(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw Error(ErrorCode::Schema, fmt::format("{}:{}: {}", origin_, line, msg));
    }
    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const { fail(line_of(n), msg); }

    void expect_map(const YAML::Node& n, const std::string& what) const {
        if (!n.IsMap()) fail(n, fmt::format("{} must be a mapping", what));
    }
    void expect_seq(const YAML::Node& n, const std::string& what) const {
        if (!n.IsSequence()) fail(n, fmt::format("{} must be a list", what));
    }

    void allow(const YAML::Node& n, const std::string& what, std::initializer_list<std::string_view> keys) const {
        expect_map(n, what);
        for (auto it = n.begin(); it != n.end(); ++it) {
            const auto key = it->first.as<std::string>();
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                fail(it->first, fmt::format("unknown key '{}' in {}", key, what));
        }
    }

    const YAML::Node require(const YAML::Node& n, const char* key, const std::string& what) const {
        const YAML::Node v = n[key];
        if (!v) fail(n, fmt::format("{} is missing required key '{}'", what, key));
        return v;
    }

    double number(const YAML::Node& v, const std::string& what) const {
        if (!v.IsScalar()) fail(v, fmt::format("{} must be a number", what));
        const auto d = parse_number(v.Scalar());
        if (!d) fail(v, fmt::format("{} must be a number, got '{}'", what, v.Scalar()));
        return *d;
    }
    void read(const YAML::Node& n, const char* key, double& out, const std::string& what) const {
        if (const YAML::Node v = n[key]) out = number(v, fmt::format("{}.{}", what, key));
    }
    int integer(const YAML::Node& v, const std::string& what) const {
        const double d = number(v, what);
        if (d != std::floor(d) || std::fabs(d) > 1e9) fail(v, fmt::format("{} must be an integer", what));
        return static_cast<int>(d);
    }
    void read(const YAML::Node& n, const char* key, int& out, const std::string& what) const {
        if (const YAML::Node v = n[key]) out = integer(v, fmt::format("{}.{}", what, key));
    }
    bool boolean(const YAML::Node& v, const std::string& what) const {
        if (v.IsScalar()) {
            const auto& s = v.Scalar();
            if (s == "true" || s == "yes" || s == "on") return true;
            if (s == "false" || s == "no" || s == "off") return false;
        }
        fail(v, fmt::format("{} must be true or false", what));
    }
    void read(const YAML::Node& n, const char* key, bool& out, const std::string& what) const {
        if (const YAML::Node v = n[key]) out = boolean(v, fmt::format("{}.{}", what, key));
    }
    std::string text(const YAML::Node& v, const std::string& what) const {
        if (!v.IsScalar()) fail(v, fmt::format("{} must be text", what));
        return v.Scalar();
    }
    void read(const YAML::Node& n, const char* key, std::string& out, const std::string& what) const {
        if (const YAML::Node v = n[key]) out = text(v, fmt::format("{}.{}", what, key));
    }
    std::vector<double> numbers(const YAML::Node& v, const std::string& what) const {
        if (v.IsScalar()) return {number(v, what)};
        expect_seq(v, what);
        std::vector<double> out;
        for (const auto& e : v) out.push_back(number(e, what));
        return out;
    }

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
};

template <class E, std::size_t N>
E pick(const Schema& s, const YAML::Node& v, const std::string& what,
       const std::array<std::pair<std::string_view, E>, N>& options) {
    const std::string t = s.text(v, what);
    for (const auto& [name, value] : options)
        if (name == t) return value;
    std::string names;
    for (const auto& [name, value] : options) names += (names.empty() ? "" : ", ") + std::string(name);
    s.fail(v, fmt::format("{} '{}' is not one of {}", what, t, names));
}

constexpr std::array<std::pair<std::string_view, ComponentKind>, 5> kKinds = {{
    {"wall", ComponentKind::Wall},
    {"window", ComponentKind::Window},
    {"hvac_split", ComponentKind::HvacSplit},
    {"crack", ComponentKind::AirlinkCrack},
    {"large_opening", ComponentKind::AirlinkLargeOpening},
}};

constexpr std::array<std::pair<std::string_view, SurfaceClass>, 5> kClasses = {{
    {"floor", SurfaceClass::Floor},
    {"ceiling", SurfaceClass::Ceiling},
    {"vertical_wall", SurfaceClass::VerticalWall},
    {"window", SurfaceClass::Window},
    {"interior_separation", SurfaceClass::InteriorSeparation},
}};

// ---------------------------------------------------------------------------
// sections

void read_site(const Schema& s, const YAML::Node& n, Site& site) {
    s.allow(n, "site", {"latitude", "longitude", "altitude", "albedo", "time_zone_offset"});
    s.read(n, "latitude", site.latitude, "site");
    s.read(n, "longitude", site.longitude, "site");
    s.read(n, "altitude", site.altitude, "site");
    s.read(n, "albedo", site.albedo, "site");
    s.read(n, "time_zone_offset", site.time_zone_offset, "site");
}

Zone read_zone(const Schema& s, const YAML::Node& n) {
    s.allow(n, "zone", {"id", "name", "volume", "air_capacitance_multiplier", "initial_temperature",
                        "initial_humidity_ratio", "sensible_gain", "latent_gain", "infiltration_ach"});
    Zone z;
    z.id = s.integer(s.require(n, "id", "zone"), "zone.id");
    const std::string w = fmt::format("zone {}", z.id);
    s.read(n, "name", z.name, w);
    z.volume = s.number(s.require(n, "volume", w), w + ".volume");
    s.read(n, "air_capacitance_multiplier", z.air_capacitance_multiplier, w);
    s.read(n, "initial_temperature", z.initial_temperature, w);
    s.read(n, "initial_humidity_ratio", z.initial_humidity_ratio, w);
    s.read(n, "sensible_gain", z.sensible_gain, w);
    s.read(n, "latent_gain", z.latent_gain, w);
    s.read(n, "infiltration_ach", z.infiltration_ach, w);
    return z;
}

Interambiance read_interambiance(const Schema& s, const YAML::Node& n) {
    s.allow(n, "interambiance", {"id", "zone_a", "zone_b", "azimuth", "tilt"});
    Interambiance ia;
    ia.id = s.integer(s.require(n, "id", "interambiance"), "interambiance.id");
    const std::string w = fmt::format("interambiance {}", ia.id);
    ia.zone_a = s.integer(s.require(n, "zone_a", w), w + ".zone_a");
    ia.zone_b = s.integer(s.require(n, "zone_b", w), w + ".zone_b");
    s.read(n, "azimuth", ia.azimuth, w);
    s.read(n, "tilt", ia.tilt, w);
    return ia;
}

void read_face(const Schema& s, const YAML::Node& n, SurfaceProperties& f, const std::string& w) {
    s.allow(n, w, {"sw_absorptance", "sw_reflectance", "lw_emissivity"});
    s.read(n, "sw_absorptance", f.sw_absorptance, w);
    s.read(n, "sw_reflectance", f.sw_reflectance, w);
    s.read(n, "lw_emissivity", f.lw_emissivity, w);
}

void read_hvac(const Schema& s, const YAML::Node& n, SplitUnitSpec& u, const std::string& w,
               const std::filesystem::path& base_dir) {
    s.allow(n, w, {"rated_total_capacity", "rated_shr", "rated_electric_power", "time_constant", "setpoint",
                   "deadband", "map_total", "map_sensible", "map_electric", "map_csv"});
    s.read(n, "rated_total_capacity", u.rated_total_capacity, w);
    s.read(n, "rated_shr", u.rated_shr, w);
    s.read(n, "rated_electric_power", u.rated_electric_power, w);
    s.read(n, "time_constant", u.time_constant, w);
    s.read(n, "setpoint", u.setpoint, w);
    s.read(n, "deadband", u.deadband, w);
    for (auto [key, target] : {std::pair{"map_total", &u.map_total}, std::pair{"map_sensible", &u.map_sensible},
                               std::pair{"map_electric", &u.map_electric}}) {
        if (const YAML::Node v = n[key]) {
            *target = s.numbers(v, w + "." + key);
            if (target->size() != 4) s.fail(v, fmt::format("{}.{} needs 4 coefficients", w, key));
        }
    }
    if (const YAML::Node v = n["map_csv"]) {
        u.map_csv = s.text(v, w + ".map_csv");
        const auto path = base_dir / u.map_csv;
        std::string text;
        try {
            text = read_text_file(path);
        } catch (const Error& e) {
            s.fail(v, e.what());
        }
        const auto points = parse_performance_csv(text, path.string());
        try {
            const PerformanceFit fit = fit_performance_map(points);
            u.map_total = fit.total;
            u.map_sensible = fit.sensible;
            u.map_electric = fit.electric;
        } catch (const Error& e) {
            throw Error(ErrorCode::Semantic, fmt::format("{}:{}: {}: {}", s.origin(), line_of(v), w, e.what()));
        }
    }
}

Component read_component(const Schema& s, const YAML::Node& n, const std::filesystem::path& base_dir) {
    s.allow(n, "component",
            {"id", "kind", "interambiance", "zone", "area", "surface_class", "layers", "glazing", "face_a", "face_b",
             "ground_contact", "host_wall", "crack", "opening", "elevation", "wind_pressure_coefficient",
             "prescribed_exchange", "hvac"});
    Component c;
    c.id = s.integer(s.require(n, "id", "component"), "component.id");
    const std::string w = fmt::format("component {}", c.id);
    c.kind = pick(s, s.require(n, "kind", w), w + ".kind", kKinds);
    if (c.kind == ComponentKind::HvacSplit)
        c.zone_id = s.integer(s.require(n, "zone", w), w + ".zone");
    else
        c.interambiance_id = s.integer(s.require(n, "interambiance", w), w + ".interambiance");
    if (c.is_surface()) c.area = s.number(s.require(n, "area", w), w + ".area");
    if (const YAML::Node v = n["surface_class"]) c.surface_class = pick(s, v, w + ".surface_class", kClasses);
    if (c.kind == ComponentKind::Window) c.surface_class = SurfaceClass::Window;
    if (const YAML::Node v = n["layers"]) {
        s.expect_seq(v, w + ".layers");
        for (const auto& l : v) {
            const std::string lw = w + " layer";
            s.allow(l, lw, {"thickness", "conductivity", "density", "specific_heat"});
            WallLayer layer;
            layer.thickness = s.number(s.require(l, "thickness", lw), lw + ".thickness");
            layer.conductivity = s.number(s.require(l, "conductivity", lw), lw + ".conductivity");
            layer.density = s.number(s.require(l, "density", lw), lw + ".density");
            layer.specific_heat = s.number(s.require(l, "specific_heat", lw), lw + ".specific_heat");
            c.layers.push_back(layer);
        }
    } else if (c.kind == ComponentKind::Wall) {
        s.fail(n, fmt::format("{} is missing required key 'layers'", w));
    }
    if (const YAML::Node v = n["glazing"]) {
        s.allow(v, w + ".glazing", {"transmittance", "u_value"});
        s.read(v, "transmittance", c.glazing.transmittance, w + ".glazing");
        s.read(v, "u_value", c.glazing.u_value, w + ".glazing");
    }
    if (const YAML::Node v = n["face_a"]) read_face(s, v, c.face_a, w + ".face_a");
    if (const YAML::Node v = n["face_b"]) read_face(s, v, c.face_b, w + ".face_b");
    s.read(n, "ground_contact", c.ground_contact, w);
    if (const YAML::Node v = n["host_wall"]) c.host_wall = s.integer(v, w + ".host_wall");
    if (const YAML::Node v = n["crack"]) {
        s.allow(v, w + ".crack", {"coefficient", "exponent"});
        s.read(v, "coefficient", c.crack.coefficient, w + ".crack");
        s.read(v, "exponent", c.crack.exponent, w + ".crack");
    }
    if (const YAML::Node v = n["opening"]) {
        s.allow(v, w + ".opening", {"width", "height", "discharge_coefficient"});
        s.read(v, "width", c.opening.width, w + ".opening");
        s.read(v, "height", c.opening.height, w + ".opening");
        s.read(v, "discharge_coefficient", c.opening.discharge_coefficient, w + ".opening");
    }
    s.read(n, "elevation", c.elevation, w);
    if (const YAML::Node v = n["wind_pressure_coefficient"])
        c.wind_pressure_coefficient = s.number(v, w + ".wind_pressure_coefficient");
    s.read(n, "prescribed_exchange", c.prescribed_exchange, w);
    if (const YAML::Node v = n["hvac"]) read_hvac(s, v, c.hvac, w + ".hvac", base_dir);
    return c;
}

ModelChoice read_binding(const Schema& s, const YAML::Node& n) {
    s.allow(n, "binding", {"level", "entity", "slot", "variant", "params"});
    const YAML::Node level = s.require(n, "level", "binding");
    const YAML::Node slot = s.require(n, "slot", "binding");
    const YAML::Node variant = s.require(n, "variant", "binding");
    ModelChoice c;
    ModelSlot sl{};
    try {
        c.level = parse_level(s.text(level, "binding.level"));
    } catch (const Error& e) {
        s.fail(level, e.what());
    }
    try {
        sl = parse_slot(s.text(slot, "binding.slot"));
    } catch (const Error& e) {
        s.fail(slot, e.what());
    }
    if (const YAML::Node e = n["entity"]) c.entity = s.integer(e, "binding.entity");
    else if (c.level != BindingLevel::Building) s.fail(n, "binding below building level needs an 'entity'");
    ParamMap params;
    if (const YAML::Node p = n["params"]) {
        s.expect_map(p, "binding.params");
        for (auto it = p.begin(); it != p.end(); ++it) {
            const auto key = it->first.as<std::string>();
            params[key] = s.numbers(it->second, "binding.params." + key);
        }
    }
    try {
        c.variant = make_variant(sl, s.text(variant, "binding.variant"), params);
    } catch (const Error& e) {
        s.fail(variant, e.what());
    }
    return c;
}

void read_simulation(const Schema& s, const YAML::Node& n, Project& p) {
    s.allow(n, "simulation", {"start", "end", "thermal_step", "reduced_step", "step", "coupling", "onion_tolerance",
                              "onion_max_iterations", "warm_up", "weather"});
    auto& c = p.simulation;
    auto stamp = [&](const char* key) -> std::optional<Timestamp> {
        const YAML::Node v = n[key];
        if (!v) return std::nullopt;
        try {
            return parse_timestamp(s.text(v, fmt::format("simulation.{}", key)));
        } catch (const Error& e) {
            s.fail(v, e.what());
        }
    };
    const auto start = stamp("start");
    const auto end = stamp("end");
    if (start.has_value() != end.has_value()) s.fail(n, "simulation needs both 'start' and 'end'");
    if (start) {
        c.start = *start;
        c.end = *end;
        p.has_period = true;
    }
    s.read(n, "thermal_step", c.thermal_step, "simulation");
    s.read(n, "reduced_step", c.reduced_step, "simulation");
    if (const YAML::Node v = n["step"]) c.step = s.number(v, "simulation.step");
    if (const YAML::Node v = n["coupling"]) {
        try {
            c.coupling = parse_coupling(s.text(v, "simulation.coupling"));
        } catch (const Error& e) {
            s.fail(v, e.what());
        }
    }
    s.read(n, "onion_tolerance", c.onion_tolerance, "simulation");
    s.read(n, "onion_max_iterations", c.onion_max_iterations, "simulation");
    s.read(n, "warm_up", c.warm_up, "simulation");
    s.read(n, "weather", p.weather, "simulation");
}

}  // namespace

Project parse_project(const std::string& text, const std::string& origin, const std::filesystem::path& base_dir) {
    const Schema s(origin);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        s.fail(e.mark.line + 1, e.msg);
    }
    if (!root || root.IsNull()) s.fail(1, "project file is empty");
    s.allow(root, "project", {"name", "morphology", "site", "zones", "interambiances", "components", "bindings",
                              "simulation"});

    Project p;
    p.base_dir = base_dir;
    s.read(root, "name", p.building.name, "project");
    s.read(root, "morphology", p.building.morphology, "project");
    if (const YAML::Node v = root["site"]) read_site(s, v, p.building.site);

    const YAML::Node zones = s.require(root, "zones", "project");
    s.expect_seq(zones, "zones");
    for (const auto& z : zones) {
        p.building.zones.push_back(read_zone(s, z));
        p.entity_lines[fmt::format("zone {}", p.building.zones.back().id)] = line_of(z);
    }
    if (const YAML::Node v = root["interambiances"]) {
        s.expect_seq(v, "interambiances");
        for (const auto& n : v) {
            p.building.interambiances.push_back(read_interambiance(s, n));
            p.entity_lines[fmt::format("interambiance {}", p.building.interambiances.back().id)] = line_of(n);
        }
    }
    if (const YAML::Node v = root["components"]) {
        s.expect_seq(v, "components");
        for (const auto& n : v) {
            p.building.components.push_back(read_component(s, n, base_dir));
            p.entity_lines[fmt::format("component {}", p.building.components.back().id)] = line_of(n);
        }
    }
    if (const YAML::Node v = root["bindings"]) {
        s.expect_seq(v, "bindings");
        for (const auto& n : v) {
            p.bindings.push_back(read_binding(s, n));
            p.binding_lines.push_back(line_of(n));
        }
    }
    if (const YAML::Node v = root["simulation"]) read_simulation(s, v, p);
    if (const YAML::Node site = root["site"]) p.entity_lines["site"] = line_of(site);
    return p;
}

Project load_project(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::Schema, e.what());
    }
    return parse_project(text, path.string(), path.parent_path());
}

// ---------------------------------------------------------------------------
// serialization

namespace {

std::string num(double v) { return fmt::format("{}", v); }

void emit_face(YAML::Emitter& e, const char* key, const SurfaceProperties& f) {
    e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "sw_absorptance" << YAML::Value << num(f.sw_absorptance);
    e << YAML::Key << "sw_reflectance" << YAML::Value << num(f.sw_reflectance);
    e << YAML::Key << "lw_emissivity" << YAML::Value << num(f.lw_emissivity);
    e << YAML::EndMap;
}

void emit_list(YAML::Emitter& e, const char* key, const std::vector<double>& v) {
    e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double x : v) e << num(x);
    e << YAML::EndSeq;
}

}  // namespace

std::string serialize_project(const Project& p) {
    const Building& b = p.building;
    YAML::Emitter e;
    e << YAML::BeginMap;
    if (!b.name.empty()) e << YAML::Key << "name" << YAML::Value << b.name;
    if (!b.morphology.empty()) e << YAML::Key << "morphology" << YAML::Value << b.morphology;

    e << YAML::Key << "site" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "latitude" << YAML::Value << num(b.site.latitude);
    e << YAML::Key << "longitude" << YAML::Value << num(b.site.longitude);
    e << YAML::Key << "altitude" << YAML::Value << num(b.site.altitude);
    e << YAML::Key << "albedo" << YAML::Value << num(b.site.albedo);
    e << YAML::Key << "time_zone_offset" << YAML::Value << num(b.site.time_zone_offset);
    e << YAML::EndMap;

    e << YAML::Key << "zones" << YAML::Value << YAML::BeginSeq;
    for (const auto& z : b.zones) {
        e << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << z.id;
        if (!z.name.empty()) e << YAML::Key << "name" << YAML::Value << z.name;
        e << YAML::Key << "volume" << YAML::Value << num(z.volume);
        e << YAML::Key << "air_capacitance_multiplier" << YAML::Value << num(z.air_capacitance_multiplier);
        e << YAML::Key << "initial_temperature" << YAML::Value << num(z.initial_temperature);
        e << YAML::Key << "initial_humidity_ratio" << YAML::Value << num(z.initial_humidity_ratio);
        e << YAML::Key << "sensible_gain" << YAML::Value << num(z.sensible_gain);
        e << YAML::Key << "latent_gain" << YAML::Value << num(z.latent_gain);
        e << YAML::Key << "infiltration_ach" << YAML::Value << num(z.infiltration_ach);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;

    e << YAML::Key << "interambiances" << YAML::Value << YAML::BeginSeq;
    for (const auto& ia : b.interambiances) {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << ia.id;
        e << YAML::Key << "zone_a" << YAML::Value << ia.zone_a;
        e << YAML::Key << "zone_b" << YAML::Value << ia.zone_b;
        e << YAML::Key << "azimuth" << YAML::Value << num(ia.azimuth);
        e << YAML::Key << "tilt" << YAML::Value << num(ia.tilt);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;

    e << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : b.components) {
        e << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << c.id;
        e << YAML::Key << "kind" << YAML::Value << to_string(c.kind);
        switch (c.kind) {
        case ComponentKind::Wall:
        case ComponentKind::Window:
            e << YAML::Key << "interambiance" << YAML::Value << c.interambiance_id;
            e << YAML::Key << "area" << YAML::Value << num(c.area);
            if (c.kind == ComponentKind::Wall) {
                e << YAML::Key << "surface_class" << YAML::Value << to_string(c.surface_class);
                e << YAML::Key << "layers" << YAML::Value << YAML::BeginSeq;
                for (const auto& l : c.layers) {
                    e << YAML::Flow << YAML::BeginMap;
                    e << YAML::Key << "thickness" << YAML::Value << num(l.thickness);
                    e << YAML::Key << "conductivity" << YAML::Value << num(l.conductivity);
                    e << YAML::Key << "density" << YAML::Value << num(l.density);
                    e << YAML::Key << "specific_heat" << YAML::Value << num(l.specific_heat);
                    e << YAML::EndMap;
                }
                e << YAML::EndSeq;
                if (c.ground_contact) e << YAML::Key << "ground_contact" << YAML::Value << true;
            } else {
                e << YAML::Key << "glazing" << YAML::Value << YAML::Flow << YAML::BeginMap;
                e << YAML::Key << "transmittance" << YAML::Value << num(c.glazing.transmittance);
                e << YAML::Key << "u_value" << YAML::Value << num(c.glazing.u_value);
                e << YAML::EndMap;
                if (c.host_wall) e << YAML::Key << "host_wall" << YAML::Value << *c.host_wall;
            }
            emit_face(e, "face_a", c.face_a);
            emit_face(e, "face_b", c.face_b);
            break;
        case ComponentKind::AirlinkCrack:
        case ComponentKind::AirlinkLargeOpening:
            e << YAML::Key << "interambiance" << YAML::Value << c.interambiance_id;
            if (c.kind == ComponentKind::AirlinkCrack) {
                e << YAML::Key << "crack" << YAML::Value << YAML::Flow << YAML::BeginMap;
                e << YAML::Key << "coefficient" << YAML::Value << num(c.crack.coefficient);
                e << YAML::Key << "exponent" << YAML::Value << num(c.crack.exponent);
                e << YAML::EndMap;
            } else {
                e << YAML::Key << "opening" << YAML::Value << YAML::Flow << YAML::BeginMap;
                e << YAML::Key << "width" << YAML::Value << num(c.opening.width);
                e << YAML::Key << "height" << YAML::Value << num(c.opening.height);
                e << YAML::Key << "discharge_coefficient" << YAML::Value << num(c.opening.discharge_coefficient);
                e << YAML::EndMap;
            }
            e << YAML::Key << "elevation" << YAML::Value << num(c.elevation);
            if (c.wind_pressure_coefficient)
                e << YAML::Key << "wind_pressure_coefficient" << YAML::Value << num(*c.wind_pressure_coefficient);
            if (c.prescribed_exchange > 0.0)
                e << YAML::Key << "prescribed_exchange" << YAML::Value << num(c.prescribed_exchange);
            break;
        case ComponentKind::HvacSplit: {
            const auto& u = c.hvac;
            e << YAML::Key << "zone" << YAML::Value << c.zone_id;
            e << YAML::Key << "hvac" << YAML::Value << YAML::BeginMap;
            e << YAML::Key << "rated_total_capacity" << YAML::Value << num(u.rated_total_capacity);
            e << YAML::Key << "rated_shr" << YAML::Value << num(u.rated_shr);
            e << YAML::Key << "rated_electric_power" << YAML::Value << num(u.rated_electric_power);
            e << YAML::Key << "time_constant" << YAML::Value << num(u.time_constant);
            e << YAML::Key << "setpoint" << YAML::Value << num(u.setpoint);
            e << YAML::Key << "deadband" << YAML::Value << num(u.deadband);
            if (u.map_total.size() == 4) emit_list(e, "map_total", u.map_total);
            if (u.map_sensible.size() == 4) emit_list(e, "map_sensible", u.map_sensible);
            if (u.map_electric.size() == 4) emit_list(e, "map_electric", u.map_electric);
            e << YAML::EndMap;
            break;
        }
        }
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;

    if (!p.bindings.empty()) {
        e << YAML::Key << "bindings" << YAML::Value << YAML::BeginSeq;
        for (const auto& c : p.bindings) {
            e << YAML::Flow << YAML::BeginMap;
            e << YAML::Key << "level" << YAML::Value << to_string(c.level);
            if (c.level != BindingLevel::Building) e << YAML::Key << "entity" << YAML::Value << c.entity;
            e << YAML::Key << "slot" << YAML::Value << to_string(slot_of(c.variant));
            e << YAML::Key << "variant" << YAML::Value << variant_id(c.variant);
            const ParamMap params = variant_params(c.variant);
            if (!params.empty()) {
                e << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
                for (const auto& [k, v] : params) {
                    if (v.size() == 1)
                        e << YAML::Key << k << YAML::Value << num(v[0]);
                    else
                        emit_list(e, k.c_str(), v);
                }
                e << YAML::EndMap;
            }
            e << YAML::EndMap;
        }
        e << YAML::EndSeq;
    }

    const auto& sc = p.simulation;
    e << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
    if (p.has_period) {
        e << YAML::Key << "start" << YAML::Value << format_timestamp(sc.start);
        e << YAML::Key << "end" << YAML::Value << format_timestamp(sc.end);
    }
    e << YAML::Key << "thermal_step" << YAML::Value << num(sc.thermal_step);
    e << YAML::Key << "reduced_step" << YAML::Value << num(sc.reduced_step);
    if (sc.step) e << YAML::Key << "step" << YAML::Value << num(*sc.step);
    e << YAML::Key << "coupling" << YAML::Value << (sc.coupling == Coupling::Onion ? "onion" : "ping_pong");
    e << YAML::Key << "onion_tolerance" << YAML::Value << num(sc.onion_tolerance);
    e << YAML::Key << "onion_max_iterations" << YAML::Value << sc.onion_max_iterations;
    e << YAML::Key << "warm_up" << YAML::Value << sc.warm_up;
    if (!p.weather.empty()) e << YAML::Key << "weather" << YAML::Value << p.weather;
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// semantic checks

ProjectCheck check_project(const Project& p) {
    ProjectCheck out;
    out.report = validate_building(p.building);
    for (auto& issue : out.report.issues) {
        const auto it = p.entity_lines.find(issue.entity);
        if (it != p.entity_lines.end()) issue.line = it->second;
    }
    if (!out.report.ok()) return out;

    // bind choices one at a time so that a failure points at its line
    for (std::size_t i = 0; i < p.bindings.size(); ++i) {
        try {
            mzsim::bind(p.building, std::span(&p.bindings[i], 1));
        } catch (const Error& e) {
            const auto& c = p.bindings[i];
            std::string what = fmt::format("binding {} {} = {}", to_string(c.level), to_string(slot_of(c.variant)),
                                           variant_id(c.variant));
            if (c.level != BindingLevel::Building) what += fmt::format(" on entity {}", c.entity);
            out.report.issues.push_back({Severity::Error, what, e.what(),
                                         i < p.binding_lines.size() ? p.binding_lines[i] : 0});
        }
    }
    if (!out.report.ok()) return out;

    ModelBindingSet set;
    try {
        set = mzsim::bind(p.building, p.bindings);
    } catch (const Error& e) {
        out.report.issues.push_back({Severity::Error, "bindings", e.what(), 0});
        return out;
    }
    for (const auto& c : p.building.components) {
        if (c.kind != ComponentKind::HvacSplit) continue;
        const auto who = fmt::format("component {}", c.id);
        const int line = p.entity_lines.count(who) ? p.entity_lines.at(who) : 0;
        const auto kind = set.component<HvacModel>(c.id).kind;
        if (kind == HvacModel::Kind::None) continue;
        try {
            check_unit(c.hvac);
        } catch (const Error& e) {
            out.report.issues.push_back({Severity::Error, who, e.what(), line});
        }
        if (kind == HvacModel::Kind::Mapped && !has_performance_map(c.hvac))
            out.report.issues.push_back({Severity::Error, who, "MODEL2 needs a performance map", line});
    }
    for (const auto& c : p.building.components) {
        if (c.ground_contact) {
            const auto* ia = p.building.find_interambiance(c.interambiance_id);
            if (ia && !ia->faces_outside()) {
                const auto who = fmt::format("component {}", c.id);
                out.report.issues.push_back({Severity::Error, who, "ground contact requires an outside-facing wall",
                                             p.entity_lines.count(who) ? p.entity_lines.at(who) : 0});
            }
        }
    }
    if (out.report.ok()) out.bindings = std::move(set);
    return out;
}

// ---------------------------------------------------------------------------
// CSV formats

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        while (!f.empty() && f.front() == ' ') f.erase(f.begin());
        while (!f.empty() && f.back() == ' ') f.pop_back();
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::pair<int, std::vector<std::string>>> rows;  // (line, fields)
};

CsvTable read_csv(const std::string& text, const std::string& origin) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw Error(ErrorCode::Schema, fmt::format("{}:{}: expected {} fields, found {}", origin, n,
                                                       t.header.size(), fields.size()));
        t.rows.emplace_back(n, std::move(fields));
    }
    if (t.header.empty()) throw Error(ErrorCode::Schema, fmt::format("{}:1: missing header", origin));
    return t;
}

std::size_t column(const CsvTable& t, std::string_view name, const std::string& origin) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw Error(ErrorCode::Schema, fmt::format("{}:1: missing column '{}'", origin, name));
    return static_cast<std::size_t>(it - t.header.begin());
}

}  // namespace

std::vector<WeatherRecord> parse_weather_csv(const std::string& text, const std::string& origin) {
    const CsvTable t = read_csv(text, origin);
    const auto c_time = column(t, "timestamp", origin);
    const auto c_tdb = column(t, "dry_bulb_C", origin);
    const auto c_rh = column(t, "rel_humidity_pct", origin);
    const auto c_ws = column(t, "wind_speed_ms", origin);
    const auto c_wd = column(t, "wind_dir_deg", origin);
    const auto c_gh = column(t, "global_horiz_Wm2", origin);
    const auto c_dh = column(t, "diffuse_horiz_Wm2", origin);
    const auto c_cc = column(t, "cloud_cover_frac", origin);
    const auto c_dp = column(t, "dew_point_C", origin);

    std::vector<WeatherRecord> out;
    for (const auto& [line, f] : t.rows) {
        auto fail = [&, line = line](const std::string& m) {
            throw Error(ErrorCode::Schema, fmt::format("{}:{}: {}", origin, line, m));
        };
        auto required = [&](std::size_t c) {
            const auto v = parse_number(f[c]);
            if (!v) fail(fmt::format("column '{}' needs a number, got '{}'", t.header[c], f[c]));
            return *v;
        };
        auto optional = [&](std::size_t c) -> std::optional<double> {
            if (f[c].empty()) return std::nullopt;
            return required(c);
        };
        WeatherRecord r;
        try {
            r.timestamp = parse_timestamp(f[c_time]);
        } catch (const Error& e) {
            fail(e.what());
        }
        r.dry_bulb = required(c_tdb);
        const double rh = required(c_rh);
        if (rh < 0.0 || rh > 100.0) fail(fmt::format("relative humidity {} outside [0, 100]", rh));
        r.humidity_ratio = humidity_ratio_from_rh(r.dry_bulb, rh);
        r.wind_speed = required(c_ws);
        r.wind_direction = required(c_wd);
        r.global_horizontal = required(c_gh);
        r.diffuse_horizontal = optional(c_dh);
        r.cloud_cover = optional(c_cc);
        r.dew_point = optional(c_dp);
        try {
            check_record(r);
        } catch (const Error& e) {
            fail(e.what());
        }
        if (!out.empty() && r.timestamp <= out.back().timestamp) fail("timestamps must be strictly increasing");
        out.push_back(r);
    }
    if (out.empty()) throw Error(ErrorCode::Schema, fmt::format("{}: no weather records", origin));
    return out;
}

WeatherSeries load_weather(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::Schema, e.what());
    }
    return WeatherSeries(parse_weather_csv(text, path.string()));
}

std::string format_weather_csv(const std::vector<WeatherRecord>& records) {
    std::string out =
        "timestamp,dry_bulb_C,rel_humidity_pct,wind_speed_ms,wind_dir_deg,global_horiz_Wm2,diffuse_horiz_Wm2,"
        "cloud_cover_frac,dew_point_C\n";
    auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string(); };
    for (const auto& r : records) {
        const double pv = r.humidity_ratio * kAtmosphericPressure / (0.621945 + r.humidity_ratio);
        const double rh = std::clamp(100.0 * pv / saturation_pressure(r.dry_bulb), 0.0, 100.0);
        out += fmt::format("{},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{},{},{}\n", format_timestamp(r.timestamp), r.dry_bulb,
                           rh, r.wind_speed, r.wind_direction, r.global_horizontal, opt(r.diffuse_horizontal),
                           opt(r.cloud_cover), opt(r.dew_point));
    }
    return out;
}

std::vector<MapPoint> parse_performance_csv(const std::string& text, const std::string& origin) {
    const CsvTable t = read_csv(text, origin);
    const std::array<std::size_t, 6> cols = {column(t, "T_out", origin),   column(t, "T_in", origin),
                                             column(t, "w_in", origin),    column(t, "Q_total", origin),
                                             column(t, "Q_sensible", origin), column(t, "P_elec", origin)};
    std::vector<MapPoint> out;
    for (const auto& [line, f] : t.rows) {
        std::array<double, 6> v{};
        for (std::size_t k = 0; k < 6; ++k) {
            const auto x = parse_number(f[cols[k]]);
            if (!x)
                throw Error(ErrorCode::Schema, fmt::format("{}:{}: column '{}' needs a number, got '{}'", origin, line,
                                                           t.header[cols[k]], f[cols[k]]));
            v[k] = *x;
        }
        out.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    return out;
}

}  // namespace mzsim
