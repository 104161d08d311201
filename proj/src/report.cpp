#include "mzsim/report.hpp"

#include "mzsim/error.hpp"
#include "mzsim/project_io.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <sstream>

namespace mzsim {

const SeriesColumn* SeriesTable::find(std::string_view name) const {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<SeriesTable> result_tables(const ResultSet& rs) {
    std::vector<SeriesTable> out;
    auto table = [&](const char* group) -> SeriesTable& {
        out.push_back({group, rs.time, {}});
        return out.back();
    };

    auto& zones = table("zones");
    for (std::size_t z = 0; z < rs.zone_ids.size(); ++z) {
        const auto id = rs.zone_ids[z];
        zones.columns.push_back({fmt::format("zone{}_air_temperature", id), "C", rs.zone_temperature[z]});
        zones.columns.push_back({fmt::format("zone{}_humidity_ratio", id), "kg/kg", rs.zone_humidity[z]});
        zones.columns.push_back({fmt::format("zone{}_unmet_load", id), "W", rs.zone_unmet[z]});
    }
    if (!rs.surface_ids.empty()) {
        auto& s = table("surfaces");
        for (std::size_t i = 0; i < rs.surface_ids.size(); ++i) {
            s.columns.push_back({fmt::format("surface{}_inner", rs.surface_ids[i]), "C", rs.surface_inner[i]});
            s.columns.push_back({fmt::format("surface{}_outer", rs.surface_ids[i]), "C", rs.surface_outer[i]});
        }
    }
    if (!rs.link_ids.empty()) {
        auto& f = table("flows");
        for (std::size_t i = 0; i < rs.link_ids.size(); ++i) {
            f.columns.push_back({fmt::format("link{}_forward", rs.link_ids[i]), "kg/s", rs.link_forward[i]});
            f.columns.push_back({fmt::format("link{}_backward", rs.link_ids[i]), "kg/s", rs.link_backward[i]});
        }
    }
    if (!rs.hvac_ids.empty()) {
        auto& h = table("hvac");
        for (std::size_t i = 0; i < rs.hvac_ids.size(); ++i) {
            const auto id = rs.hvac_ids[i];
            auto series = [&](double HvacOutput::*field) {
                std::vector<double> v;
                for (const auto& o : rs.hvac[i]) v.push_back(o.*field);
                return v;
            };
            h.columns.push_back({fmt::format("unit{}_total", id), "W", series(&HvacOutput::total)});
            h.columns.push_back({fmt::format("unit{}_sensible", id), "W", series(&HvacOutput::sensible)});
            h.columns.push_back({fmt::format("unit{}_latent", id), "W", series(&HvacOutput::latent)});
            h.columns.push_back({fmt::format("unit{}_electric", id), "W", series(&HvacOutput::electric)});
            h.columns.push_back({fmt::format("unit{}_on_fraction", id), "-", series(&HvacOutput::on_fraction)});
            h.columns.push_back({fmt::format("unit{}_unmet", id), "W", series(&HvacOutput::unmet)});
        }
    }
    return out;
}

namespace {

std::string format_value(double v, const std::string& unit) {
    if (v == 0.0) v = 0.0;  // no negative zero
    const int digits = unit == "kg/kg" || unit == "kg/s" ? 8 : 6;
    std::string s = fmt::format("{:.{}f}", v, digits);
    if (s.find_first_not_of("-0.") == std::string::npos) s = fmt::format("{:.{}f}", 0.0, digits);
    return s;
}

}  // namespace

std::string format_csv(const SeriesTable& t) {
    std::string out = "timestamp";
    for (const auto& c : t.columns) out += fmt::format(",{}[{}]", c.name, c.unit);
    out += '\n';
    for (std::size_t k = 0; k < t.time.size(); ++k) {
        out += format_timestamp(t.time[k]);
        for (const auto& c : t.columns) {
            out += ',';
            out += format_value(c.values[k], c.unit);
        }
        out += '\n';
    }
    return out;
}

SeriesTable parse_series_csv(const std::string& text, const std::string& group, const std::string& origin) {
    SeriesTable t;
    t.group = group;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    auto fail = [&](const std::string& m) { throw Error(ErrorCode::Schema, fmt::format("{}:{}: {}", origin, n, m)); };
    auto split = [](const std::string& l) {
        std::vector<std::string> f;
        std::stringstream ss(l);
        std::string x;
        while (std::getline(ss, x, ',')) f.push_back(x);
        if (!l.empty() && l.back() == ',') f.emplace_back();
        return f;
    };
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (t.columns.empty() && n == 1) {
            if (f.empty() || f[0] != "timestamp") fail("first column must be 'timestamp'");
            for (std::size_t i = 1; i < f.size(); ++i) {
                const auto open = f[i].find('[');
                if (open == std::string::npos || f[i].back() != ']') fail(fmt::format("header '{}' lacks a unit", f[i]));
                t.columns.push_back({f[i].substr(0, open), f[i].substr(open + 1, f[i].size() - open - 2), {}});
            }
            continue;
        }
        if (f.size() != t.columns.size() + 1) fail("field count does not match the header");
        try {
            t.time.push_back(parse_timestamp(f[0]));
        } catch (const Error& e) {
            fail(e.what());
        }
        for (std::size_t i = 1; i < f.size(); ++i) {
            const auto v = parse_number(f[i]);
            if (!v) fail(fmt::format("'{}' is not a number", f[i]));
            t.columns[i - 1].values.push_back(*v);
        }
    }
    if (n == 0) throw Error(ErrorCode::Schema, fmt::format("{}: empty file", origin));
    return t;
}

std::vector<SeriesTable> load_tables(const std::filesystem::path& dir) {
    std::vector<SeriesTable> out;
    for (const char* g : kGroups) {
        const auto path = dir / fmt::format("{}.csv", g);
        if (!std::filesystem::exists(path)) continue;
        out.push_back(parse_series_csv(read_text_file(path), g, path.string()));
    }
    return out;
}

namespace {

double step_seconds(const SeriesTable& t) {
    if (t.time.size() < 2) return 3600.0;
    return double((t.time[1] - t.time[0]).count());
}

// Day a step belongs to: the date of its start.
std::string day_of_step(Timestamp end, double dt) {
    const Timestamp start = end - std::chrono::seconds(std::llround(dt));
    return format_timestamp(start).substr(0, 10);
}

const SeriesTable* group(const std::vector<SeriesTable>& tables, std::string_view name) {
    for (const auto& t : tables)
        if (t.group == name) return &t;
    return nullptr;
}

}  // namespace

std::string summary_text(const std::vector<SeriesTable>& tables, const ReportOptions& options) {
    std::string out;
    const SeriesTable* zones = group(tables, "zones");
    const SeriesTable* base = zones ? zones : (tables.empty() ? nullptr : &tables.front());
    if (!base || base->time.empty()) return "no results\n";
    const double dt = step_seconds(*base);
    out += fmt::format("period: {} .. {} ({} steps of {:.0f} s)\n", format_timestamp(base->time.front() - std::chrono::seconds(std::llround(dt))),
                       format_timestamp(base->time.back()), base->time.size(), dt);

    if (zones) {
        out += "\nzones\n";
        for (const auto& c : zones->columns) {
            if (!c.name.ends_with("_air_temperature")) continue;
            const auto label = c.name.substr(0, c.name.size() - std::string_view("_air_temperature").size());
            double sum = 0.0, hi = -1e300, lo = 1e300, above = 0.0;
            for (double v : c.values) {
                sum += v;
                hi = std::max(hi, v);
                lo = std::min(lo, v);
                if (v > options.comfort_threshold) above += dt / 3600.0;
            }
            out += fmt::format("  {}: mean {:.2f} C, min {:.2f} C, max {:.2f} C, hours above {:.1f} C: {:.2f}\n", label,
                               sum / double(c.values.size()), lo, hi, options.comfort_threshold, above);
        }
    }

    const SeriesTable* hvac = group(tables, "hvac");
    if (hvac) {
        const double hdt = step_seconds(*hvac);
        std::vector<std::string> units;
        for (const auto& c : hvac->columns)
            if (c.name.ends_with("_electric")) units.push_back(c.name.substr(0, c.name.size() - 9));
        for (const auto& u : units) {
            const auto* electric = hvac->find(u + "_electric");
            const auto* total = hvac->find(u + "_total");
            const auto* on = hvac->find(u + "_on_fraction");
            if (!electric || !total || !on) continue;
            std::vector<std::string> days;
            std::map<std::string, std::pair<double, double>> daily;  // kWh electric, cooling
            double e_sum = 0.0, q_sum = 0.0, on_sum = 0.0;
            for (std::size_t k = 0; k < hvac->time.size(); ++k) {
                const auto d = day_of_step(hvac->time[k], hdt);
                if (days.empty() || days.back() != d) days.push_back(d);
                daily[d].first += electric->values[k] * hdt / 3.6e6;
                daily[d].second += total->values[k] * hdt / 3.6e6;
                e_sum += electric->values[k] * hdt;
                q_sum += total->values[k] * hdt;
                on_sum += on->values[k] * hdt;
            }
            out += fmt::format("\n{}\n", u);
            out += "  day          electric_kWh  cooling_kWh  COP\n";
            for (const auto& d : days) {
                const auto [e, q] = daily[d];
                out += fmt::format("  {}  {:12.3f}  {:11.3f}  {}\n", d, e, q, e > 0.0 ? fmt::format("{:.2f}", q / e) : "NONE");
            }
            out += fmt::format("  daily energy consumption {:.3f} kWh/day, cooling {:.3f} kWh/day\n",
                               e_sum / 3.6e6 / double(days.size()), q_sum / 3.6e6 / double(days.size()));
            out += fmt::format("  mean COP {}\n", e_sum > 0.0 ? fmt::format("{:.2f}", q_sum / e_sum) : "NONE");
            out += fmt::format("  fractional on-time {:.1f} %\n",
                               100.0 * on_sum / (hdt * double(hvac->time.size())));
        }
    }
    return out;
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string svg_chart(const SeriesTable& t, const SeriesColumn& c) {
    constexpr double w = 800, h = 400, left = 70, right = 20, top = 40, bottom = 60;
    const double pw = w - left - right, ph = h - top - bottom;
    double lo = 0.0, hi = 1.0;
    if (!c.values.empty()) {
        lo = *std::min_element(c.values.begin(), c.values.end());
        hi = *std::max_element(c.values.begin(), c.values.end());
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const std::size_t n = c.values.size();
    auto x = [&](std::size_t k) { return left + (n > 1 ? pw * double(k) / double(n - 1) : pw / 2); };
    auto y = [&](double v) { return top + ph * (hi - v) / (hi - lo); };

    std::string s;
    s += fmt::format("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                     "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
                     "viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
                     w, h);
    s += fmt::format("  <rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", w, h);
    s += fmt::format("  <text x=\"{:.0f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{} ({})</text>\n", left,
                     xml_escape(c.name), xml_escape(t.group));
    // axes
    s += fmt::format("  <line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", left, top,
                     top + ph);
    s += fmt::format("  <line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>\n", left,
                     top + ph, left + pw);
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        s += fmt::format("  <text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" "
                         "text-anchor=\"end\">{:.4g}</text>\n",
                         left - 6, y(v) + 3, v);
    }
    s += fmt::format("  <text x=\"16\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
                     "transform=\"rotate(-90 16 {:.1f})\" text-anchor=\"middle\">{}</text>\n",
                     top + ph / 2, top + ph / 2, xml_escape(c.unit));
    if (!t.time.empty()) {
        s += fmt::format("  <text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n",
                         left, top + ph + 16, format_timestamp(t.time.front()));
        s += fmt::format("  <text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" "
                         "text-anchor=\"end\">{}</text>\n",
                         left + pw, top + ph + 16, format_timestamp(t.time.back()));
    }
    s += fmt::format("  <text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
                     "text-anchor=\"middle\">time</text>\n",
                     left + pw / 2, top + ph + 34);
    // series
    s += "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < n; ++k) s += fmt::format("{}{:.2f},{:.2f}", k ? " " : "", x(k), y(c.values[k]));
    s += "\"/>\n";
    // legend
    const double ly = h - 12;
    s += fmt::format("  <line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#1f77b4\" "
                     "stroke-width=\"2\"/>\n",
                     left, ly - 4, left + 24);
    s += fmt::format("  <text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\">{} [{}]</text>\n",
                     left + 30, ly, xml_escape(c.name), xml_escape(c.unit));
    s += "</svg>\n";
    return s;
}

void write_outputs(const std::filesystem::path& dir, const ResultSet& rs, const ReportOptions& options) {
    const auto tables = result_tables(rs);
    for (const auto& t : tables) write_text_file(dir / (t.group + ".csv"), format_csv(t));
    write_text_file(dir / "summary.txt", summary_text(tables, options));
}

}  // namespace mzsim
