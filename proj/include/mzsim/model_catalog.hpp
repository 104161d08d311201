#pragma once

#include "mzsim/building.hpp"

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mzsim {

/// Physical phenomena for which an interchangeable model is selected.
/// Order matches the alternatives of ModelVariant.
enum class ModelSlot {
    AirflowTransfer,
    SkyTemperature,
    OutdoorConvection,
    DiffuseReconstitution,
    IndoorConvection,
    IndoorLongwave,
    IndoorShortwave,
    HvacSystem,
    HeatConduction,
    GroundCoupling,
};

inline constexpr std::array<ModelSlot, 10> kAllSlots = {
    ModelSlot::AirflowTransfer,  ModelSlot::SkyTemperature, ModelSlot::OutdoorConvection,
    ModelSlot::DiffuseReconstitution, ModelSlot::IndoorConvection, ModelSlot::IndoorLongwave,
    ModelSlot::IndoorShortwave,  ModelSlot::HvacSystem,     ModelSlot::HeatConduction,
    ModelSlot::GroundCoupling,
};

enum class BindingLevel { Building, Zone, Component };

inline constexpr std::array<BindingLevel, 3> kAllLevels = {BindingLevel::Building, BindingLevel::Zone,
                                                           BindingLevel::Component};

const char* to_string(ModelSlot slot);
const char* to_string(BindingLevel level);
ModelSlot parse_slot(std::string_view text);    // case-insensitive, throws UnknownVariant
BindingLevel parse_level(std::string_view text);

/// Entity level at which a slot is selected.
BindingLevel allocation_level(ModelSlot slot);

// ---------------------------------------------------------------------------
// Variant parameter records, one per slot.

struct AirflowModel {
    enum class Kind { Prescribed, Pressure };
    Kind kind = Kind::Prescribed;
    double relaxation = 0.75;
    double tolerance = 1e-6;  // kg/s
    int max_iterations = 100;
};

struct SkyModel {
    enum class Kind { Air, Swinbank, DewPoint };
    Kind kind = Kind::Air;
    bool cloud_correction = false;
};

struct OutdoorConvectionModel {
    enum class Kind { Constant, LinearWind, Ito, ColeSturrock };
    Kind kind = Kind::Constant;
    double h = 11.7;
    double linear_a = 5.8;
    double linear_b = 4.0;
    double ito_coefficient = 18.63;
    double ito_exponent = 0.605;
    double cole_windward_a = 11.4;
    double cole_windward_b = 5.7;
    double cole_leeward = 5.7;
};

struct DiffuseModel {
    enum class Kind { Auto, Measured, ClearnessIndex };
    Kind kind = Kind::Auto;
};

struct IndoorConvectionModel {
    enum class Kind { Constant, Correlation };
    Kind kind = Kind::Constant;
    double h = 3.0;
    double vertical_a = 1.52;
    double vertical_b = 0.33;
    double horizontal_a = 1.31;
    double horizontal_b = 0.25;
    double h_min = 0.5;
};

struct IndoorLongwaveModel {
    enum class Kind { MrtStar, Detailed };
    Kind kind = Kind::MrtStar;
    double reference_temperature = 293.15;  // K
};

struct IndoorShortwaveModel {
    enum class Kind { Simple, Grouped4, Full };
    Kind kind = Kind::Simple;
};

struct HvacModel {
    enum class Kind { None, Ideal, Cycling, Mapped };  // none, model 0, model 1, model 2
    Kind kind = Kind::None;
};

struct ConductionModel {
    enum class Kind { R2C, R3C2, PerLayer };
    Kind kind = Kind::R2C;
    int nodes_per_layer = 3;
};

struct GroundModel {
    enum class Kind { Constant, Monthly };
    Kind kind = Kind::Constant;
    double temperature = 20.0;  // C
    std::array<double, 12> monthly{};
    double soil_resistance = 0.5;  // m2 K/W between the wall face and the ground node
};

using ModelVariant = std::variant<AirflowModel, SkyModel, OutdoorConvectionModel, DiffuseModel,
                                  IndoorConvectionModel, IndoorLongwaveModel, IndoorShortwaveModel,
                                  HvacModel, ConductionModel, GroundModel>;

template <class M>
constexpr ModelSlot slot_of() {
    constexpr std::size_t n = std::variant_size_v<ModelVariant>;
    std::size_t found = n;
    [&]<std::size_t... I>(std::index_sequence<I...>) {
        ((std::is_same_v<M, std::variant_alternative_t<I, ModelVariant>> ? (found = I, 0) : 0), ...);
    }(std::make_index_sequence<n>{});
    return static_cast<ModelSlot>(found);
}

inline ModelSlot slot_of(const ModelVariant& v) { return static_cast<ModelSlot>(v.index()); }

/// Scalar parameters are one-element vectors; booleans are 0/1.
using ParamMap = std::map<std::string, std::vector<double>>;

/// Variant id as written in project files, e.g. "R2C", "SWINBANK".
std::string variant_id(const ModelVariant& v);
std::vector<std::string> variant_ids(ModelSlot slot);
/// Builds a variant from its id and parameters. Throws UnknownVariant for an id
/// not offered by the slot and InvalidInput for unknown or invalid parameters.
ModelVariant make_variant(ModelSlot slot, std::string_view id, const ParamMap& params = {});
/// Parameters that differ from the variant's defaults.
ParamMap variant_params(const ModelVariant& v);
ModelVariant default_variant(ModelSlot slot);
bool operator==(const ModelVariant& a, const ModelVariant& b);

struct ModelChoice {
    BindingLevel level = BindingLevel::Building;
    EntityId entity = 0;  // ignored at building level
    ModelVariant variant;
};

class ModelBindingSet {
public:
    ModelBindingSet();

    template <class M>
    const M& building() const {
        return std::get<M>(slots_[static_cast<std::size_t>(slot_of<M>())]);
    }
    template <class M>
    const M& zone(EntityId id) const {
        return std::get<M>(lookup(zone_, id, slot_of<M>()));
    }
    template <class M>
    const M& component(EntityId id) const {
        return std::get<M>(lookup(component_, id, slot_of<M>()));
    }

    /// Resolved variant for any slot at the entity's level.
    const ModelVariant& resolve(ModelSlot slot, EntityId entity) const;

    /// Every explicit choice, in deterministic order.
    std::vector<ModelChoice> choices() const;
    /// Explicit choices that differ from the default variant.
    std::vector<ModelChoice> non_default_choices() const;

private:
    using Key = std::pair<EntityId, ModelSlot>;
    const ModelVariant& lookup(const std::map<Key, ModelVariant>& m, EntityId id, ModelSlot s) const;

    std::array<ModelVariant, 10> slots_;  // building level values and per-slot defaults
    std::map<Key, ModelVariant> zone_;
    std::map<Key, ModelVariant> component_;

    friend ModelBindingSet bind(const Building&, std::span<const ModelChoice>);
};

/// Default variant for every slot.
ModelBindingSet defaults();

/// Resolves choices against the building. Throws Error(LevelMismatch) when a
/// choice is made at a level other than allocation_level(slot) and
/// Error(InvalidInput) when the entity does not exist or cannot carry the slot.
ModelBindingSet bind(const Building& b, std::span<const ModelChoice> choices);

}  // namespace mzsim
