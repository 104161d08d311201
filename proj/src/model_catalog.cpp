#include "mzsim/model_catalog.hpp"

#include "mzsim/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace mzsim {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return out;
}

constexpr std::array<const char*, 10> kSlotNames = {
    "AIRFLOW_TRANSFER",  "SKY_TEMPERATURE", "OUTDOOR_CONVECTION", "DIFFUSE_RECONSTITUTION",
    "INDOOR_CONVECTION", "INDOOR_LW",       "INDOOR_SW",          "HVAC_SYSTEM",
    "HEAT_CONDUCTION",   "GROUND_COUPLING",
};

// Variant ids per slot, index-aligned with each model's Kind enum.
const std::array<std::vector<std::string>, 10> kVariantIds = {{
    {"PRESCRIBED", "PRESSURE"},
    {"AIR", "SWINBANK", "DEW_POINT"},
    {"CONSTANT", "LINEAR_WIND", "ITO", "COLE_STURROCK"},
    {"AUTO", "MEASURED", "CLEARNESS_INDEX"},
    {"CONSTANT", "CORRELATION"},
    {"MRT_STAR", "DETAILED"},
    {"SIMPLE", "GROUPED4", "FULL"},
    {"NONE", "MODEL0", "MODEL1", "MODEL2"},
    {"R2C", "3R2C", "PER_LAYER"},
    {"CONSTANT", "MONTHLY"},
}};

// Parameter accessors: each model exposes named scalar fields.
template <class M>
struct Field {
    const char* name;
    double M::*member;
};

template <class M>
struct IntField {
    const char* name;
    int M::*member;
};

class ParamReader {
public:
    ParamReader(const ParamMap& p, std::string_view slot) : params_(p), slot_(slot) {}

    template <class M>
    void read(M& m, std::initializer_list<Field<M>> fields) {
        for (const auto& f : fields) {
            auto it = params_.find(f.name);
            if (it == params_.end()) continue;
            m.*(f.member) = scalar(it);
            used_.push_back(f.name);
        }
    }
    template <class M>
    void read_int(M& m, std::initializer_list<IntField<M>> fields) {
        for (const auto& f : fields) {
            auto it = params_.find(f.name);
            if (it == params_.end()) continue;
            double v = scalar(it);
            if (v != std::floor(v))
                throw Error(ErrorCode::InvalidInput, fmt::format("{}: parameter '{}' must be an integer", slot_, f.name));
            m.*(f.member) = static_cast<int>(v);
            used_.push_back(f.name);
        }
    }
    bool read_bool(const char* name, bool fallback) {
        auto it = params_.find(name);
        if (it == params_.end()) return fallback;
        used_.push_back(name);
        return scalar(it) != 0.0;
    }
    const std::vector<double>* read_list(const char* name) {
        auto it = params_.find(name);
        if (it == params_.end()) return nullptr;
        used_.push_back(name);
        return &it->second;
    }
    void finish() const {
        for (const auto& [key, _] : params_)
            if (std::find(used_.begin(), used_.end(), key) == used_.end())
                throw Error(ErrorCode::InvalidInput, fmt::format("{}: unknown parameter '{}'", slot_, key));
    }

private:
    double scalar(ParamMap::const_iterator it) const {
        if (it->second.size() != 1)
            throw Error(ErrorCode::InvalidInput, fmt::format("{}: parameter '{}' must be a scalar", slot_, it->first));
        return it->second.front();
    }

    const ParamMap& params_;
    std::string_view slot_;
    std::vector<std::string> used_;
};

void require(bool ok, std::string_view slot, std::string_view what) {
    if (!ok) throw Error(ErrorCode::InvalidInput, fmt::format("{}: {}", slot, what));
}

// Field tables shared by make_variant and variant_params.
const std::initializer_list<Field<AirflowModel>> kAirflowFields = {
    {"relaxation", &AirflowModel::relaxation}, {"tolerance", &AirflowModel::tolerance}};
const std::initializer_list<Field<OutdoorConvectionModel>> kOutdoorFields = {
    {"h", &OutdoorConvectionModel::h},
    {"linear_a", &OutdoorConvectionModel::linear_a},
    {"linear_b", &OutdoorConvectionModel::linear_b},
    {"ito_coefficient", &OutdoorConvectionModel::ito_coefficient},
    {"ito_exponent", &OutdoorConvectionModel::ito_exponent},
    {"cole_windward_a", &OutdoorConvectionModel::cole_windward_a},
    {"cole_windward_b", &OutdoorConvectionModel::cole_windward_b},
    {"cole_leeward", &OutdoorConvectionModel::cole_leeward}};
const std::initializer_list<Field<IndoorConvectionModel>> kIndoorFields = {
    {"h", &IndoorConvectionModel::h},
    {"vertical_a", &IndoorConvectionModel::vertical_a},
    {"vertical_b", &IndoorConvectionModel::vertical_b},
    {"horizontal_a", &IndoorConvectionModel::horizontal_a},
    {"horizontal_b", &IndoorConvectionModel::horizontal_b},
    {"h_min", &IndoorConvectionModel::h_min}};
const std::initializer_list<Field<IndoorLongwaveModel>> kLongwaveFields = {
    {"reference_temperature", &IndoorLongwaveModel::reference_temperature}};
const std::initializer_list<Field<GroundModel>> kGroundFields = {
    {"temperature", &GroundModel::temperature}, {"soil_resistance", &GroundModel::soil_resistance}};

template <class M>
void diff_fields(ParamMap& out, const M& m, std::initializer_list<Field<M>> fields) {
    const M d{};
    for (const auto& f : fields)
        if (m.*(f.member) != d.*(f.member)) out[f.name] = {m.*(f.member)};
}

}  // namespace

const char* to_string(ModelSlot slot) { return kSlotNames[static_cast<std::size_t>(slot)]; }

const char* to_string(BindingLevel level) {
    switch (level) {
    case BindingLevel::Building: return "BUILDING";
    case BindingLevel::Zone: return "ZONE";
    case BindingLevel::Component: return "COMPONENT";
    }
    return "?";
}

ModelSlot parse_slot(std::string_view text) {
    const std::string u = upper(text);
    for (std::size_t i = 0; i < kSlotNames.size(); ++i)
        if (u == kSlotNames[i]) return static_cast<ModelSlot>(i);
    throw Error(ErrorCode::UnknownVariant, fmt::format("unknown model slot '{}'", text));
}

BindingLevel parse_level(std::string_view text) {
    const std::string u = upper(text);
    for (auto l : kAllLevels)
        if (u == to_string(l)) return l;
    throw Error(ErrorCode::InvalidInput, fmt::format("unknown binding level '{}'", text));
}

BindingLevel allocation_level(ModelSlot slot) {
    switch (slot) {
    case ModelSlot::AirflowTransfer:
    case ModelSlot::SkyTemperature:
    case ModelSlot::OutdoorConvection:
    case ModelSlot::DiffuseReconstitution:
        return BindingLevel::Building;
    case ModelSlot::IndoorConvection:
    case ModelSlot::IndoorLongwave:
    case ModelSlot::IndoorShortwave:
        return BindingLevel::Zone;
    case ModelSlot::HvacSystem:
    case ModelSlot::HeatConduction:
    case ModelSlot::GroundCoupling:
        return BindingLevel::Component;
    }
    return BindingLevel::Building;
}

std::vector<std::string> variant_ids(ModelSlot slot) { return kVariantIds[static_cast<std::size_t>(slot)]; }

std::string variant_id(const ModelVariant& v) {
    const auto& ids = kVariantIds[v.index()];
    return std::visit([&](const auto& m) { return ids[static_cast<std::size_t>(m.kind)]; }, v);
}

ModelVariant default_variant(ModelSlot slot) {
    switch (slot) {
    case ModelSlot::AirflowTransfer: return AirflowModel{};
    case ModelSlot::SkyTemperature: return SkyModel{};
    case ModelSlot::OutdoorConvection: return OutdoorConvectionModel{};
    case ModelSlot::DiffuseReconstitution: return DiffuseModel{};
    case ModelSlot::IndoorConvection: return IndoorConvectionModel{};
    case ModelSlot::IndoorLongwave: return IndoorLongwaveModel{};
    case ModelSlot::IndoorShortwave: return IndoorShortwaveModel{};
    case ModelSlot::HvacSystem: return HvacModel{};
    case ModelSlot::HeatConduction: return ConductionModel{};
    case ModelSlot::GroundCoupling: return GroundModel{};
    }
    return AirflowModel{};
}

ModelVariant make_variant(ModelSlot slot, std::string_view id, const ParamMap& params) {
    const auto& ids = kVariantIds[static_cast<std::size_t>(slot)];
    const std::string u = upper(id);
    auto it = std::find(ids.begin(), ids.end(), u);
    if (it == ids.end())
        throw Error(ErrorCode::UnknownVariant,
                    fmt::format("{}: unknown variant '{}' (expected one of {})", to_string(slot), id,
                                fmt::join(ids, ", ")));
    const int k = static_cast<int>(it - ids.begin());
    const char* name = to_string(slot);
    ParamReader r(params, name);
    ModelVariant out = default_variant(slot);

    switch (slot) {
    case ModelSlot::AirflowTransfer: {
        auto& m = std::get<AirflowModel>(out);
        m.kind = static_cast<AirflowModel::Kind>(k);
        r.read(m, kAirflowFields);
        r.read_int(m, {{"max_iterations", &AirflowModel::max_iterations}});
        require(m.relaxation > 0.0 && m.relaxation <= 1.0, name, "relaxation must lie in (0, 1]");
        require(m.tolerance > 0.0, name, "tolerance must be positive");
        require(m.max_iterations >= 1, name, "max_iterations must be >= 1");
        break;
    }
    case ModelSlot::SkyTemperature: {
        auto& m = std::get<SkyModel>(out);
        m.kind = static_cast<SkyModel::Kind>(k);
        m.cloud_correction = r.read_bool("cloud_correction", false);
        require(!(m.cloud_correction && m.kind == SkyModel::Kind::Air), name,
                "cloud correction applies to SWINBANK and DEW_POINT only");
        break;
    }
    case ModelSlot::OutdoorConvection: {
        auto& m = std::get<OutdoorConvectionModel>(out);
        m.kind = static_cast<OutdoorConvectionModel::Kind>(k);
        r.read(m, kOutdoorFields);
        require(m.h > 0.0, name, "h must be positive");
        break;
    }
    case ModelSlot::DiffuseReconstitution:
        std::get<DiffuseModel>(out).kind = static_cast<DiffuseModel::Kind>(k);
        break;
    case ModelSlot::IndoorConvection: {
        auto& m = std::get<IndoorConvectionModel>(out);
        m.kind = static_cast<IndoorConvectionModel::Kind>(k);
        r.read(m, kIndoorFields);
        require(m.h > 0.0 && m.h_min > 0.0, name, "h and h_min must be positive");
        break;
    }
    case ModelSlot::IndoorLongwave: {
        auto& m = std::get<IndoorLongwaveModel>(out);
        m.kind = static_cast<IndoorLongwaveModel::Kind>(k);
        r.read(m, kLongwaveFields);
        require(m.reference_temperature > 0.0, name, "reference temperature must be positive (K)");
        break;
    }
    case ModelSlot::IndoorShortwave:
        std::get<IndoorShortwaveModel>(out).kind = static_cast<IndoorShortwaveModel::Kind>(k);
        break;
    case ModelSlot::HvacSystem:
        std::get<HvacModel>(out).kind = static_cast<HvacModel::Kind>(k);
        break;
    case ModelSlot::HeatConduction: {
        auto& m = std::get<ConductionModel>(out);
        m.kind = static_cast<ConductionModel::Kind>(k);
        r.read_int(m, {{"nodes_per_layer", &ConductionModel::nodes_per_layer}});
        require(m.nodes_per_layer >= 1, name, "nodes_per_layer must be >= 1");
        break;
    }
    case ModelSlot::GroundCoupling: {
        auto& m = std::get<GroundModel>(out);
        m.kind = static_cast<GroundModel::Kind>(k);
        r.read(m, kGroundFields);
        if (const auto* months = r.read_list("monthly")) {
            require(months->size() == 12, name, "monthly needs 12 values");
            std::copy(months->begin(), months->end(), m.monthly.begin());
        } else if (m.kind == GroundModel::Kind::Monthly) {
            require(false, name, "MONTHLY needs a 'monthly' list of 12 temperatures");
        }
        require(m.soil_resistance > 0.0, name, "soil_resistance must be positive");
        break;
    }
    }
    r.finish();
    return out;
}

ParamMap variant_params(const ModelVariant& v) {
    ParamMap out;
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, AirflowModel>) {
                diff_fields(out, m, kAirflowFields);
                if (m.max_iterations != M{}.max_iterations) out["max_iterations"] = {double(m.max_iterations)};
            } else if constexpr (std::is_same_v<M, SkyModel>) {
                if (m.cloud_correction) out["cloud_correction"] = {1.0};
            } else if constexpr (std::is_same_v<M, OutdoorConvectionModel>) {
                diff_fields(out, m, kOutdoorFields);
            } else if constexpr (std::is_same_v<M, IndoorConvectionModel>) {
                diff_fields(out, m, kIndoorFields);
            } else if constexpr (std::is_same_v<M, IndoorLongwaveModel>) {
                diff_fields(out, m, kLongwaveFields);
            } else if constexpr (std::is_same_v<M, ConductionModel>) {
                if (m.nodes_per_layer != M{}.nodes_per_layer) out["nodes_per_layer"] = {double(m.nodes_per_layer)};
            } else if constexpr (std::is_same_v<M, GroundModel>) {
                diff_fields(out, m, kGroundFields);
                if (m.kind == GroundModel::Kind::Monthly || m.monthly != M{}.monthly)
                    out["monthly"] = std::vector<double>(m.monthly.begin(), m.monthly.end());
            }
        },
        v);
    return out;
}

bool operator==(const ModelVariant& a, const ModelVariant& b) {
    return a.index() == b.index() && variant_id(a) == variant_id(b) && variant_params(a) == variant_params(b);
}

ModelBindingSet::ModelBindingSet() {
    for (auto s : kAllSlots) slots_[static_cast<std::size_t>(s)] = default_variant(s);
}

const ModelVariant& ModelBindingSet::lookup(const std::map<Key, ModelVariant>& m, EntityId id, ModelSlot s) const {
    auto it = m.find({id, s});
    return it == m.end() ? slots_[static_cast<std::size_t>(s)] : it->second;
}

const ModelVariant& ModelBindingSet::resolve(ModelSlot slot, EntityId entity) const {
    switch (allocation_level(slot)) {
    case BindingLevel::Building: return slots_[static_cast<std::size_t>(slot)];
    case BindingLevel::Zone: return lookup(zone_, entity, slot);
    case BindingLevel::Component: return lookup(component_, entity, slot);
    }
    return slots_[static_cast<std::size_t>(slot)];
}

std::vector<ModelChoice> ModelBindingSet::choices() const {
    std::vector<ModelChoice> out;
    for (auto s : kAllSlots) {
        if (allocation_level(s) != BindingLevel::Building) continue;
        out.push_back({BindingLevel::Building, 0, slots_[static_cast<std::size_t>(s)]});
    }
    for (const auto& [key, v] : zone_) out.push_back({BindingLevel::Zone, key.first, v});
    for (const auto& [key, v] : component_) out.push_back({BindingLevel::Component, key.first, v});
    return out;
}

std::vector<ModelChoice> ModelBindingSet::non_default_choices() const {
    std::vector<ModelChoice> out;
    for (auto& c : choices())
        if (!(c.variant == default_variant(slot_of(c.variant)))) out.push_back(std::move(c));
    return out;
}

ModelBindingSet defaults() { return ModelBindingSet{}; }

ModelBindingSet bind(const Building& b, std::span<const ModelChoice> choices) {
    ModelBindingSet set;
    for (const auto& c : choices) {
        const ModelSlot slot = slot_of(c.variant);
        const BindingLevel expected = allocation_level(slot);
        if (c.level != expected)
            throw Error(ErrorCode::LevelMismatch,
                        fmt::format("{} cannot be bound at {} level (allowed: {})", to_string(slot),
                                    to_string(c.level), to_string(expected)));
        switch (c.level) {
        case BindingLevel::Building:
            set.slots_[static_cast<std::size_t>(slot)] = c.variant;
            break;
        case BindingLevel::Zone:
            if (!b.find_zone(c.entity))
                throw Error(ErrorCode::InvalidInput,
                            fmt::format("{} bound to missing zone {}", to_string(slot), c.entity));
            set.zone_[{c.entity, slot}] = c.variant;
            break;
        case BindingLevel::Component: {
            const Component* comp = b.find_component(c.entity);
            if (!comp)
                throw Error(ErrorCode::InvalidInput,
                            fmt::format("{} bound to missing component {}", to_string(slot), c.entity));
            bool fits = false;
            if (slot == ModelSlot::HeatConduction) fits = comp->kind == ComponentKind::Wall;
            if (slot == ModelSlot::HvacSystem) fits = comp->kind == ComponentKind::HvacSplit;
            if (slot == ModelSlot::GroundCoupling) fits = comp->kind == ComponentKind::Wall && comp->ground_contact;
            if (!fits)
                throw Error(ErrorCode::InvalidInput,
                            fmt::format("{} cannot be bound to component {} ({})", to_string(slot), c.entity,
                                        to_string(comp->kind)));
            set.component_[{c.entity, slot}] = c.variant;
            break;
        }
        }
    }
    return set;
}

}  // namespace mzsim
