// Writes smooth synthetic weather in the mzsim CSV format.

#include "mzsim/error.hpp"
#include "mzsim/project_io.hpp"
#include "mzsim/weather.hpp"

#include <CLI11.hpp>
#include <iostream>

using namespace mzsim;

int main(int argc, char** argv) {
    CLI::App app{"Synthetic clear-sky weather generator"};
    SyntheticWeather w;
    Site site;
    std::string start = "2024-01-01T00:00:00";
    std::string out;
    double cloud = -1.0;
    app.add_option("--start", start, "First timestamp");
    app.add_option("--days", w.days, "Number of days")->check(CLI::PositiveNumber);
    app.add_option("--step", w.step, "Seconds between records")->check(CLI::PositiveNumber);
    app.add_option("--latitude", site.latitude, "Site latitude, degrees");
    app.add_option("--longitude", site.longitude, "Site longitude, degrees");
    app.add_option("--time-zone", site.time_zone_offset, "Hours from UTC");
    app.add_option("--mean", w.mean_temperature, "Mean dry-bulb, C");
    app.add_option("--amplitude", w.amplitude, "Daily half swing, K");
    app.add_option("--rh", w.relative_humidity, "Relative humidity at the mean temperature, %");
    app.add_option("--wind", w.wind_speed, "Wind speed, m/s");
    app.add_option("--wind-dir", w.wind_direction, "Wind direction, degrees from north");
    app.add_option("--clearness", w.clearness, "Clearness index, 0 for no sun");
    app.add_option("--cloud", cloud, "Cloud cover fraction (omitted when negative)");
    app.add_option("-o,--out", out, "Output file (default stdout)");
    CLI11_PARSE(app, argc, argv);

    try {
        w.start = parse_timestamp(start);
        if (cloud >= 0.0) w.cloud_cover = cloud;
        const std::string csv = format_weather_csv(synthetic_weather(site, w));
        if (out.empty())
            std::cout << csv;
        else
            write_text_file(out, csv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
