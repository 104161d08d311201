// mzsim command-line front end: validate, simulate, report.

#include "mzsim/error.hpp"
#include "mzsim/project_io.hpp"
#include "mzsim/report.hpp"
#include "mzsim/simulation.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace mzsim;

namespace {

enum Exit : int {
    kOk = 0,
    kSchema = 1,
    kSemantic = 2,
    kNonConvergence = 3,
    kWeatherGap = 4,
    kMissingSeries = 5,
    kUsage = 64,
};

int exit_code(ErrorCode c) {
    switch (c) {
    case ErrorCode::Schema: return kSchema;
    case ErrorCode::NonConvergence:
    case ErrorCode::SingularJacobian:
    case ErrorCode::SingularSystem: return kNonConvergence;
    case ErrorCode::WeatherGap: return kWeatherGap;
    case ErrorCode::MissingSeries: return kMissingSeries;
    default: return kSemantic;
    }
}

std::string issue_line(const std::string& file, const ValidationIssue& i) {
    const char* sev = i.severity == Severity::Error ? "error" : "warning";
    if (i.line > 0) return fmt::format("{}:{}: {}: {}: {}", file, i.line, sev, i.entity, i.message);
    return fmt::format("{}: {}: {}: {}", file, sev, i.entity, i.message);
}

fs::path default_output_dir() {
    if (const char* env = std::getenv("MZSIM_OUTPUT_DIR"); env && *env) return env;
    return "mzsim-out";
}

// ---------------------------------------------------------------------------
// validate

struct ValidateOptions {
    std::string project;
    bool json = false;
};

int cmd_validate(const ValidateOptions& o) {
    nlohmann::ordered_json report;
    report["project"] = o.project;
    report["issues"] = nlohmann::json::array();
    int code = kOk;
    std::vector<std::string> lines;
    try {
        const Project p = load_project(o.project);
        const ProjectCheck check = check_project(p);
        for (const auto& i : check.report.issues) {
            lines.push_back(issue_line(o.project, i));
            report["issues"].push_back({{"severity", i.severity == Severity::Error ? "error" : "warning"},
                                        {"entity", i.entity},
                                        {"message", i.message},
                                        {"line", i.line}});
        }
        if (!check.report.ok()) code = kSemantic;
        report["zones"] = p.building.zones.size();
        report["components"] = p.building.components.size();
        report["bindings"] = p.bindings.size();
    } catch (const Error& e) {
        code = exit_code(e.code());
        lines.push_back(fmt::format("error: {}", e.what()));
        report["issues"].push_back({{"severity", "error"}, {"entity", "file"}, {"message", e.what()}, {"line", 0}});
    }
    report["ok"] = code == kOk;
    report["exit_code"] = code;
    if (o.json) {
        std::cout << report.dump(2) << "\n";
    } else {
        for (const auto& l : lines) std::cerr << l << "\n";
        if (code == kOk) std::cout << fmt::format("{}: ok\n", o.project);
    }
    return code;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::vector<std::string> projects;
    std::string weather;
    std::string out;
    std::string from, to;
    double step = 0.0;
    std::string coupling;
    bool expert = false;
    bool seedless = false;
    bool svg = false;
    int jobs = 1;
    double comfort = 28.0;
};

void write_charts(const fs::path& dir, const std::vector<SeriesTable>& tables, const std::vector<std::string>& only) {
    for (const auto& t : tables) {
        for (const auto& c : t.columns) {
            const bool wanted = only.empty() ? (t.group == "zones" || t.group == "hvac")
                                             : std::find(only.begin(), only.end(), c.name) != only.end();
            if (wanted) write_text_file(dir / "charts" / (c.name + ".svg"), svg_chart(t, c));
        }
    }
}

struct JobResult {
    int code = kOk;
    std::string out, err;
};

JobResult run_project(const SimulateOptions& o, const std::string& project_path, const fs::path& out_dir) {
    JobResult r;
    try {
        const Project p = load_project(project_path);
        const ProjectCheck check = check_project(p);
        for (const auto& i : check.report.issues) r.err += issue_line(project_path, i) + "\n";
        if (!check.report.ok()) {
            r.code = kSemantic;
            return r;
        }
        const auto non_default = check.bindings->non_default_choices();
        if (!non_default.empty() && !o.expert) {
            std::string list;
            for (const auto& c : non_default)
                list += fmt::format("{}{}={}", list.empty() ? "" : ", ", to_string(slot_of(c.variant)), variant_id(c.variant));
            r.err += fmt::format("warning: {}: non-default model bindings without --expert: {}\n", project_path, list);
        }

        SimulationConfig cfg = p.simulation;
        bool have_period = p.has_period;
        if (!o.from.empty()) cfg.start = parse_timestamp(o.from);
        if (!o.to.empty()) cfg.end = parse_timestamp(o.to);
        if (!o.from.empty() && !o.to.empty()) have_period = true;
        if (!have_period) throw Error(ErrorCode::Semantic, "no simulation period: give start/end in the project or --from/--to");
        if (o.step > 0.0) cfg.step = o.step;
        if (!o.coupling.empty()) cfg.coupling = parse_coupling(o.coupling);

        fs::path weather_path = o.weather;
        if (weather_path.empty()) {
            if (p.weather.empty()) throw Error(ErrorCode::Semantic, "no weather file: give --weather or simulation.weather");
            weather_path = p.base_dir / p.weather;
        }
        const WeatherSeries weather = load_weather(weather_path);

        const auto t0 = std::chrono::steady_clock::now();
        const ResultSet rs = simulate(p.building, *check.bindings, weather, cfg);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& w : rs.warnings) r.err += fmt::format("warning: {}: {}\n", project_path, w);

        ReportOptions ropt;
        ropt.comfort_threshold = o.comfort;
        write_outputs(out_dir, rs, ropt);
        if (o.svg) write_charts(out_dir, result_tables(rs), {});

        const double days = double(rs.time.size()) * rs.step / 86400.0;
        std::string line = fmt::format("{}: simulated {:.2f} d ({} steps of {:.0f} s) in {:.2f} s", project_path, days,
                                       rs.time.size(), rs.step, wall);
        for (std::size_t z = 0; z < rs.zone_ids.size(); ++z) {
            const auto& v = rs.zone_temperature[z];
            double sum = 0.0, hi = -1e300;
            for (double x : v) sum += x, hi = std::max(hi, x);
            line += fmt::format("; zone {} mean {:.2f} C max {:.2f} C", rs.zone_ids[z], sum / double(v.size()), hi);
        }
        double kwh = 0.0;
        for (const auto& unit : rs.hvac)
            for (const auto& o2 : unit) kwh += o2.electric * rs.step / 3.6e6;
        line += fmt::format("; HVAC electric {:.3f} kWh; outputs in {}", kwh, out_dir.string());
        r.out = line + "\n";
    } catch (const Error& e) {
        r.code = exit_code(e.code());
        r.err += fmt::format("error: {}: {}\n", project_path, e.what());
    } catch (const std::exception& e) {
        r.code = kSemantic;
        r.err += fmt::format("error: {}: {}\n", project_path, e.what());
    }
    return r;
}

int cmd_simulate(const SimulateOptions& o) {
    const fs::path base = o.out.empty() ? default_output_dir() : fs::path(o.out);
    const std::size_t n = o.projects.size();
    std::vector<JobResult> results(n);
    auto dir_for = [&](std::size_t i) { return n == 1 ? base : base / fs::path(o.projects[i]).stem(); };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) results[i] = run_project(o, o.projects[i], dir_for(i));
    };
    const auto threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(o.jobs, 1)), 1, n);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = kOk;
    for (const auto& r : results) {
        std::cerr << r.err;
        std::cout << r.out;
        if (code == kOk) code = r.code;
    }
    return code;
}

// ---------------------------------------------------------------------------
// report

struct ReportCmdOptions {
    std::string dir;
    bool svg = false;
    std::vector<std::string> series;
    double comfort = 28.0;
};

int cmd_report(const ReportCmdOptions& o) {
    try {
        const auto tables = load_tables(o.dir);
        bool has_zones = false;
        for (const auto& t : tables) has_zones |= t.group == "zones";
        if (!has_zones) throw Error(ErrorCode::MissingSeries, fmt::format("missing series group 'zones' in {}", o.dir));
        for (const auto& name : o.series) {
            bool found = false;
            for (const auto& t : tables) found |= t.find(name) != nullptr;
            if (!found) throw Error(ErrorCode::MissingSeries, fmt::format("missing series '{}'", name));
        }
        ReportOptions ropt;
        ropt.comfort_threshold = o.comfort;
        const std::string text = summary_text(tables, ropt);
        write_text_file(fs::path(o.dir) / "summary.txt", text);
        if (o.svg) write_charts(o.dir, tables, o.series);
        std::cout << text;
        return kOk;
    } catch (const Error& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return exit_code(e.code());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multizone building thermal, airflow and moisture simulation"};
    app.set_version_flag("--version", std::string("mzsim ") + MZSIM_VERSION);
    app.require_subcommand(1);

    ValidateOptions vo;
    auto* validate = app.add_subcommand("validate", "Check a project file");
    validate->add_option("project", vo.project, "Project file (YAML)")->required();
    validate->add_flag("--json-report", vo.json, "Print a machine-readable report on stdout");

    SimulateOptions so;
    auto* sim = app.add_subcommand("simulate", "Run one or more projects");
    sim->add_option("projects", so.projects, "Project files")->required();
    sim->add_option("-w,--weather", so.weather, "Weather CSV (default: simulation.weather of the project)");
    sim->add_option("-o,--out", so.out, "Output directory (default: $MZSIM_OUTPUT_DIR or ./mzsim-out)");
    sim->add_option("--from", so.from, "Start timestamp, YYYY-MM-DDTHH:MM:SS");
    sim->add_option("--to", so.to, "End timestamp");
    sim->add_option("--step", so.step, "Force one time step for the run, s")->check(CLI::PositiveNumber);
    sim->add_option("--coupling", so.coupling, "Thermal/airflow coupling: ping_pong or onion");
    sim->add_flag("--expert", so.expert, "Silence the warning on non-default model bindings");
    sim->add_flag("--seedless", so.seedless, "Accepted for compatibility; runs are always deterministic");
    sim->add_flag("--svg", so.svg, "Also write SVG charts of zone and HVAC series");
    sim->add_option("-j,--jobs", so.jobs, "Projects run concurrently")->check(CLI::PositiveNumber);
    sim->add_option("--comfort-threshold", so.comfort, "Comfort threshold for the summary, C");

    ReportCmdOptions ro;
    auto* rep = app.add_subcommand("report", "Summarize a simulation output directory");
    rep->add_option("dir", ro.dir, "Output directory of a simulate run")->required();
    rep->add_flag("--svg", ro.svg, "Write SVG line charts under <dir>/charts");
    rep->add_option("--series", ro.series, "Series to chart (repeatable); default all zone and HVAC series");
    rep->add_option("--comfort-threshold", ro.comfort, "Comfort threshold, C");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (*validate) return cmd_validate(vo);
    if (*sim) return cmd_simulate(so);
    return cmd_report(ro);
}
