#include "fixtures.hpp"

#include "mzsim/error.hpp"
#include "mzsim/project_io.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <gtest/gtest.h>
#include <random>

using namespace mzsim;

namespace {

std::string sample_text(const char* name) { return read_text_file(fixture::samples_dir() / name); }

// Line (1-based) of the first occurrence of `needle`.
int line_of(const std::string& text, const std::string& needle) {
    const auto pos = text.find(needle);
    return pos == std::string::npos ? 0 : 1 + int(std::count(text.begin(), text.begin() + long(pos), '\n'));
}

Error schema_error(const std::string& text) {
    try {
        parse_project(text, "p.yaml");
    } catch (const Error& e) {
        return e;
    }
    return Error(ErrorCode::InvalidInput, "accepted");
}

std::vector<ModelChoice> random_bindings(const Building& b, std::mt19937& rng) {
    auto pick = [&](const std::vector<std::string>& ids) {
        return ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
    };
    std::vector<ModelChoice> out;
    for (auto slot : {ModelSlot::AirflowTransfer, ModelSlot::SkyTemperature, ModelSlot::OutdoorConvection,
                      ModelSlot::DiffuseReconstitution})
        out.push_back({BindingLevel::Building, 0, make_variant(slot, pick(variant_ids(slot)))});
    for (const auto& z : b.zones) {
        for (auto slot : {ModelSlot::IndoorConvection, ModelSlot::IndoorShortwave})
            if (rng() % 2) out.push_back({BindingLevel::Zone, z.id, make_variant(slot, pick(variant_ids(slot)))});
    }
    for (const auto& c : b.components) {
        if (c.kind != ComponentKind::Wall || rng() % 2) continue;
        const int n = 1 + int(rng() % 4);
        out.push_back({BindingLevel::Component, c.id,
                       rng() % 2 ? make_variant(ModelSlot::HeatConduction, "PER_LAYER", {{"nodes_per_layer", {double(n)}}})
                                 : make_variant(ModelSlot::HeatConduction, "3R2C")});
    }
    return out;
}

void jitter(Building& b, std::mt19937& rng) {
    std::uniform_real_distribution<double> scale(0.5, 2.0), temp(15.0, 32.0);
    for (auto& z : b.zones) {
        z.volume *= scale(rng);
        z.initial_temperature = temp(rng);
        z.sensible_gain = 100.0 * scale(rng);
    }
    for (auto& c : b.components) {
        if (c.kind == ComponentKind::Wall)
            for (auto& l : c.layers) l.thickness *= scale(rng);
        if (c.kind == ComponentKind::AirlinkCrack) c.crack.coefficient *= scale(rng);
    }
}

}  // namespace

TEST(ProjectFile, SamplesValidate) {
    for (const char* name : {"test_cell.yaml", "five_zone.yaml"}) {
        const Project p = load_project(fixture::samples_dir() / name);
        const auto check = check_project(p);
        EXPECT_TRUE(check.report.ok()) << name;
        EXPECT_TRUE(check.bindings.has_value()) << name;
        EXPECT_TRUE(p.has_period);
        EXPECT_FALSE(p.weather.empty());
    }
}

TEST(ProjectFile, SerializerOutputAlwaysValidates) {
    std::mt19937 rng(99);
    const std::vector<Building> bases = {fixture::five_zone_house(), fixture::two_rooms_with_door(),
                                         fixture::glazed_box(25.0)};
    for (int trial = 0; trial < 30; ++trial) {
        Project p;
        p.building = bases[std::size_t(trial) % bases.size()];
        jitter(p.building, rng);
        p.bindings = random_bindings(p.building, rng);
        p.simulation.coupling = trial % 2 ? Coupling::Onion : Coupling::PingPong;

        const std::string text = serialize_project(p);
        const Project back = parse_project(text, "roundtrip.yaml");
        const auto check = check_project(back);
        EXPECT_TRUE(check.report.ok()) << text;
        ASSERT_EQ(back.building.components.size(), p.building.components.size());
        ASSERT_EQ(back.bindings.size(), p.bindings.size());
        for (std::size_t i = 0; i < p.building.zones.size(); ++i) {
            EXPECT_EQ(back.building.zones[i].volume, p.building.zones[i].volume);
            EXPECT_EQ(back.building.zones[i].initial_temperature, p.building.zones[i].initial_temperature);
        }
        for (std::size_t i = 0; i < p.bindings.size(); ++i) {
            EXPECT_EQ(variant_id(back.bindings[i].variant), variant_id(p.bindings[i].variant));
            EXPECT_EQ(variant_params(back.bindings[i].variant), variant_params(p.bindings[i].variant));
        }
        EXPECT_EQ(back.simulation.coupling, p.simulation.coupling);
        // serialization is a fixed point
        EXPECT_EQ(serialize_project(back), text);
    }
}

TEST(ProjectFile, UnknownKeyCarriesLine) {
    std::string text = sample_text("test_cell.yaml");
    const std::string anchor = "  - {id: 1, zone_a: 1, zone_b: 0, azimuth: 0, tilt: 90}";
    ASSERT_NE(text.find(anchor), std::string::npos);
    text.replace(text.find(anchor), anchor.size(), "  - {id: 1, zone_a: 1, zone_b: 0, azimuth: 0, tilt: 90, colour: red}");
    const int line = line_of(text, "colour");
    const Error e = schema_error(text);
    EXPECT_EQ(e.code(), ErrorCode::Schema);
    EXPECT_NE(std::string(e.what()).find(fmt::format("p.yaml:{}:", line)), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
}

TEST(ProjectFile, TruncatedFileCarriesLine) {
    const std::string text = sample_text("test_cell.yaml");
    const auto cut = text.find("  - {id: 3,");
    ASSERT_NE(cut, std::string::npos);
    const std::string truncated = text.substr(0, cut + 20);
    const Error e = schema_error(truncated);
    EXPECT_EQ(e.code(), ErrorCode::Schema);
    EXPECT_NE(std::string(e.what()).find("p.yaml:"), std::string::npos) << e.what();
    const std::string msg = e.what();
    const int line = std::stoi(msg.substr(msg.find(':') + 1));
    EXPECT_GE(line, line_of(text, "interambiances:"));
}

TEST(ProjectFile, MissingRequiredAndWrongType) {
    EXPECT_EQ(schema_error("name: x\n").code(), ErrorCode::Schema);
    EXPECT_EQ(schema_error("").code(), ErrorCode::Schema);
    const Error e = schema_error("zones:\n  - {id: 1, volume: lots}\n");
    EXPECT_EQ(e.code(), ErrorCode::Schema);
    EXPECT_NE(std::string(e.what()).find("p.yaml:2:"), std::string::npos) << e.what();
}

TEST(ProjectFile, LevelMismatchCitesBindingLine) {
    std::string text = sample_text("test_cell.yaml");
    const std::string added = "  - {level: ZONE, entity: 1, slot: HEAT_CONDUCTION, variant: 3R2C}\n";
    text.insert(text.find("\nsimulation:"), "\n" + added.substr(0, added.size() - 1));
    const Project p = parse_project(text, "p.yaml");
    const auto check = check_project(p);
    ASSERT_FALSE(check.report.ok());
    EXPECT_FALSE(check.bindings.has_value());
    const auto& issue = check.report.issues.back();
    EXPECT_EQ(issue.line, line_of(text, "slot: HEAT_CONDUCTION"));
    EXPECT_NE(issue.entity.find("HEAT_CONDUCTION"), std::string::npos);
}

TEST(ProjectFile, SemanticIssueCitesEntityLine) {
    std::string text = sample_text("test_cell.yaml");
    const std::string from = "interambiance: 4\n";
    text.replace(text.find(from), from.size(), "interambiance: 44\n");
    const Project p = parse_project(text, "p.yaml");
    const auto check = check_project(p);
    ASSERT_EQ(check.report.error_count(), 1u);
    EXPECT_EQ(check.report.issues[0].entity, "component 13");
    EXPECT_EQ(check.report.issues[0].line, line_of(text, "- id: 13"));
}

TEST(WeatherCsv, ParsesBlanksAndRoundTrips) {
    const std::string text =
        "timestamp,dry_bulb_C,rel_humidity_pct,wind_speed_ms,wind_dir_deg,global_horiz_Wm2,diffuse_horiz_Wm2,"
        "cloud_cover_frac,dew_point_C\n"
        "2024-01-15T00:00:00,25.0,80,2,90,0,,0.3,\n"
        "2024-01-15T01:00:00,24.5,82,1.5,100,0,0,,21.5\n";
    const auto rs = parse_weather_csv(text, "w.csv");
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_FALSE(rs[0].diffuse_horizontal.has_value());
    EXPECT_DOUBLE_EQ(*rs[0].cloud_cover, 0.3);
    EXPECT_FALSE(rs[1].cloud_cover.has_value());
    EXPECT_DOUBLE_EQ(*rs[1].dew_point, 21.5);
    EXPECT_NEAR(rs[0].humidity_ratio, humidity_ratio_from_rh(25.0, 80.0), 1e-12);

    const auto again = parse_weather_csv(format_weather_csv(rs), "w2.csv");
    ASSERT_EQ(again.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(again[i].timestamp, rs[i].timestamp);
        EXPECT_NEAR(again[i].dry_bulb, rs[i].dry_bulb, 1e-4);
        EXPECT_NEAR(again[i].humidity_ratio, rs[i].humidity_ratio, 1e-6);
        EXPECT_EQ(again[i].diffuse_horizontal.has_value(), rs[i].diffuse_horizontal.has_value());
    }
}

TEST(WeatherCsv, RejectsMalformedRows) {
    const std::string header =
        "timestamp,dry_bulb_C,rel_humidity_pct,wind_speed_ms,wind_dir_deg,global_horiz_Wm2,diffuse_horiz_Wm2,"
        "cloud_cover_frac,dew_point_C\n";
    try {
        parse_weather_csv(header + "2024-01-15T00:00:00,25.0,80,2,90,0,,,\n2024-01-15T01:00:00,2x,80,2,90,0,,,\n",
                          "w.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Schema);
        EXPECT_NE(std::string(e.what()).find("w.csv:3:"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_weather_csv(header + "2024-01-15T00:00:00,25.0,80\n", "w.csv"), Error);
    EXPECT_THROW(parse_weather_csv(header + "2024-01-15T00:00:00,25.0,180,2,90,0,,,\n", "w.csv"), Error);
    EXPECT_THROW(parse_weather_csv(header, "w.csv"), Error);
}

TEST(PerformanceCsv, Parses) {
    const auto pts = parse_performance_csv(
        "T_out,T_in,w_in,Q_total,Q_sensible,P_elec\n35,27,0.011,3000,2250,1150\n30,25,0.010,3200,2400,1050\n", "m.csv");
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_DOUBLE_EQ(pts[1].outdoor_temperature, 30.0);
    EXPECT_DOUBLE_EQ(pts[0].electric, 1150.0);
    EXPECT_THROW(parse_performance_csv("T_out,T_in,w_in,Q_total,Q_sensible,P_elec\n35,27,0.011,3000,x,1\n", "m.csv"),
                 Error);
}

TEST(ParseNumber, LocaleIndependent) {
    EXPECT_EQ(parse_number("1.5"), 1.5);
    EXPECT_EQ(parse_number("-2e3"), -2000.0);
    EXPECT_FALSE(parse_number("1,5").has_value());
    EXPECT_FALSE(parse_number("").has_value());
    EXPECT_FALSE(parse_number("12abc").has_value());
    EXPECT_FALSE(parse_number("nan").has_value());
}
