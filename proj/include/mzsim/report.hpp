#pragma once

#include "mzsim/simulation.hpp"
#include "mzsim/timestamp.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mzsim {

struct SeriesColumn {
    std::string name;  // e.g. "zone1_air_temperature"
    std::string unit;  // e.g. "C"
    std::vector<double> values;
};

/// One output group (zones, surfaces, flows, hvac) on a shared time base.
struct SeriesTable {
    std::string group;
    std::vector<Timestamp> time;
    std::vector<SeriesColumn> columns;

    const SeriesColumn* find(std::string_view name) const;
};

inline constexpr const char* kGroups[] = {"zones", "surfaces", "flows", "hvac"};

/// Tables for every non-empty group of the result set.
std::vector<SeriesTable> result_tables(const ResultSet& rs);

/// CSV with an ISO 8601 timestamp column and "name[unit]" headers.
std::string format_csv(const SeriesTable& t);
/// Throws Error(Schema) on malformed content.
SeriesTable parse_series_csv(const std::string& text, const std::string& group, const std::string& origin);

/// Reads every <group>.csv present in the directory.
std::vector<SeriesTable> load_tables(const std::filesystem::path& dir);

struct ReportOptions {
    double comfort_threshold = 28.0;  // C
};

/// Zone temperature statistics, comfort hours and, when HVAC series exist,
/// daily energies, mean COP and fractional on-time per unit.
std::string summary_text(const std::vector<SeriesTable>& tables, const ReportOptions& options = {});

/// Static line chart of one column against time.
std::string svg_chart(const SeriesTable& table, const SeriesColumn& column);

/// Writes the CSV files and summary.txt of a run.
void write_outputs(const std::filesystem::path& dir, const ResultSet& rs, const ReportOptions& options = {});

}  // namespace mzsim
