#pragma once

#include "mzsim/building.hpp"
#include "mzsim/hvac.hpp"
#include "mzsim/model_catalog.hpp"
#include "mzsim/simulation.hpp"
#include "mzsim/weather.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mzsim {

/// A building, its model bindings and run settings as read from a project file.
struct Project {
    Building building;
    std::vector<ModelChoice> bindings;
    SimulationConfig simulation;
    bool has_period = false;      // start and end given in the file
    std::string weather;          // path as written, relative to the project file
    std::filesystem::path base_dir;

    // source lines, for messages
    std::map<std::string, int> entity_lines;  // "zone 1", "component 17", ...
    std::vector<int> binding_lines;
};

/// Parses project text. Throws Error(Schema) with "origin:line: message" on
/// malformed YAML, unknown keys, wrong types or missing required fields.
/// Performance map CSV files are read relative to `base_dir`.
Project parse_project(const std::string& text, const std::string& origin = "<project>",
                      const std::filesystem::path& base_dir = {});
Project load_project(const std::filesystem::path& path);
std::string serialize_project(const Project& p);

/// Building validation plus binding resolution. Issues carry source lines.
/// On success `bindings` holds the resolved set.
struct ProjectCheck {
    ValidationReport report;
    std::optional<ModelBindingSet> bindings;
};
ProjectCheck check_project(const Project& p);

// ---------------------------------------------------------------------------
// weather and manufacturer data

/// Columns: timestamp, dry_bulb_C, rel_humidity_pct, wind_speed_ms,
/// wind_dir_deg, global_horiz_Wm2, diffuse_horiz_Wm2, cloud_cover_frac,
/// dew_point_C. The last three may be blank. Throws Error(Schema).
std::vector<WeatherRecord> parse_weather_csv(const std::string& text, const std::string& origin = "<weather>");
WeatherSeries load_weather(const std::filesystem::path& path);

/// Writes records in the same format; relative humidity is recovered from
/// the humidity ratio.
std::string format_weather_csv(const std::vector<WeatherRecord>& records);

/// Columns: T_out, T_in, w_in, Q_total, Q_sensible, P_elec.
std::vector<MapPoint> parse_performance_csv(const std::string& text, const std::string& origin = "<map>");

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Locale-independent number parsing of a whole field.
std::optional<double> parse_number(std::string_view text);

}  // namespace mzsim
