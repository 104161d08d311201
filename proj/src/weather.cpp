#include "mzsim/weather.hpp"

#include "mzsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fmt/format.h>
#include <numbers>

namespace mzsim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double sind(double x) { return std::sin(x * kDeg); }
double cosd(double x) { return std::cos(x * kDeg); }

}  // namespace

// ---------------------------------------------------------------------------
// timestamps

Timestamp parse_timestamp(std::string_view text) {
    std::string s(text);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    char sep = 0;
    int n = std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &y, &mo, &d, &sep, &h, &mi, &sec);
    if (n < 6 || (sep != 'T' && sep != ' '))
        throw Error(ErrorCode::InvalidInput, fmt::format("invalid timestamp '{}'", text));
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h < 0 || h > 24 || mi < 0 || mi > 59 || sec < 0 || sec > 59)
        throw Error(ErrorCode::InvalidInput, fmt::format("invalid timestamp '{}'", text));
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hms.hours().count(),
                       hms.minutes().count(), hms.seconds().count());
}

int day_of_year(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const sys_days jan1{ymd.year() / January / 1};
    return static_cast<int>((day - jan1).count()) + 1;
}

double hours_of_day(Timestamp t) {
    using namespace std::chrono;
    return static_cast<double>((t - floor<days>(t)).count()) / 3600.0;
}

int month_index(Timestamp t) {
    using namespace std::chrono;
    return static_cast<int>(static_cast<unsigned>(year_month_day{floor<days>(t)}.month())) - 1;
}

// ---------------------------------------------------------------------------
// psychrometrics

double saturation_pressure(double t_c) {
    // Magnus form over water
    return 610.94 * std::exp(17.625 * t_c / (t_c + 243.04));
}

double humidity_ratio_from_rh(double t_c, double rh_percent) {
    const double pv = std::clamp(rh_percent, 0.0, 100.0) / 100.0 * saturation_pressure(t_c);
    return 0.621945 * pv / (kAtmosphericPressure - pv);
}

double saturation_humidity_ratio(double t_c) { return humidity_ratio_from_rh(t_c, 100.0); }

void check_record(const WeatherRecord& r) {
    const auto when = format_timestamp(r.timestamp);
    if (r.wind_speed < 0.0) throw Error(ErrorCode::InvalidInput, fmt::format("{}: negative wind speed", when));
    if (r.global_horizontal < 0.0)
        throw Error(ErrorCode::InvalidInput, fmt::format("{}: negative global irradiance", when));
    if (r.diffuse_horizontal) {
        if (*r.diffuse_horizontal < 0.0)
            throw Error(ErrorCode::InvalidInput, fmt::format("{}: negative diffuse irradiance", when));
        if (*r.diffuse_horizontal > r.global_horizontal + 1e-9)
            throw Error(ErrorCode::InvalidInput, fmt::format("{}: diffuse exceeds global irradiance", when));
    }
    if (r.cloud_cover && (*r.cloud_cover < 0.0 || *r.cloud_cover > 1.0))
        throw Error(ErrorCode::InvalidInput, fmt::format("{}: cloud cover outside [0, 1]", when));
    if (r.humidity_ratio < 0.0 || r.humidity_ratio > 0.1)
        throw Error(ErrorCode::InvalidInput, fmt::format("{}: humidity ratio outside [0, 0.1]", when));
}

// ---------------------------------------------------------------------------
// solar geometry

double solar_declination(int n) { return 23.45 * sind(360.0 * (284.0 + n) / 365.0); }

double equation_of_time(int n) {
    const double b = 360.0 * (n - 1) / 365.0;
    return 229.18 * (0.000075 + 0.001868 * cosd(b) - 0.032077 * sind(b) - 0.014615 * cosd(2 * b) -
                     0.04089 * sind(2 * b));
}

double extraterrestrial_normal(int n) { return kSolarConstant * (1.0 + 0.033 * cosd(360.0 * n / 365.0)); }

SolarPosition solar_position(double latitude, double declination, double hour_angle) {
    SolarPosition p;
    p.declination = declination;
    p.hour_angle = hour_angle;
    const double sin_alt =
        sind(latitude) * sind(declination) + cosd(latitude) * cosd(declination) * cosd(hour_angle);
    p.altitude = std::asin(std::clamp(sin_alt, -1.0, 1.0)) / kDeg;
    const double east = -cosd(declination) * sind(hour_angle);
    const double north = sind(declination) * cosd(latitude) - cosd(declination) * sind(latitude) * cosd(hour_angle);
    double az = std::atan2(east, north) / kDeg;
    if (az < 0.0) az += 360.0;
    p.azimuth = az;
    return p;
}

SolarPosition solar_position(const Site& site, Timestamp t) {
    const int n = day_of_year(t);
    const double solar_time =
        hours_of_day(t) + (4.0 * (site.longitude - 15.0 * site.time_zone_offset) + equation_of_time(n)) / 60.0;
    return solar_position(site.latitude, solar_declination(n), 15.0 * (solar_time - 12.0));
}

double diffuse_fraction(double kt) {
    // Erbs-type piecewise correlation
    if (kt <= 0.22) return 1.0 - 0.09 * kt;
    if (kt <= 0.80)
        return 0.9511 - 0.1604 * kt + 4.388 * kt * kt - 16.638 * kt * kt * kt + 12.336 * kt * kt * kt * kt;
    return 0.165;
}

IrradianceSplit split_diffuse(const WeatherRecord& r, const SolarPosition& pos, const DiffuseModel& model,
                              int day_of_year) {
    bool measured = model.kind == DiffuseModel::Kind::Measured ||
                    (model.kind == DiffuseModel::Kind::Auto && r.diffuse_horizontal.has_value());
    if (model.kind == DiffuseModel::Kind::Measured && !r.diffuse_horizontal)
        throw Error(ErrorCode::MissingField,
                    fmt::format("{}: MEASURED diffuse model needs diffuse_horiz", format_timestamp(r.timestamp)));

    IrradianceSplit out;
    if (measured) out.diffuse_horizontal = *r.diffuse_horizontal;
    if (pos.altitude <= 0.0 || r.global_horizontal <= 0.0) {
        if (!measured) out.diffuse_horizontal = 0.0;
        return out;
    }

    const double sin_alt = sind(pos.altitude);
    const double e0n = extraterrestrial_normal(day_of_year);
    if (!measured) {
        const double kt = std::clamp(r.global_horizontal / (e0n * sin_alt), 0.0, 1.0);
        out.diffuse_horizontal = diffuse_fraction(kt) * r.global_horizontal;
    }
    const double beam_h = std::max(0.0, r.global_horizontal - out.diffuse_horizontal);
    out.direct_normal = std::min(beam_h / sin_alt, e0n);
    return out;
}

SurfaceIrradiance surface_irradiance(double direct_normal, double diffuse_horizontal, const SolarPosition& pos,
                                     double tilt, double azimuth, double albedo) {
    SurfaceIrradiance s;
    const double sin_alt = std::max(0.0, sind(pos.altitude));
    if (pos.altitude > 0.0) {
        const double cos_inc =
            cosd(pos.altitude) * sind(tilt) * cosd(pos.azimuth - azimuth) + sin_alt * cosd(tilt);
        s.direct = direct_normal * std::max(0.0, cos_inc);
    }
    s.diffuse_sky = diffuse_horizontal * (1.0 + cosd(tilt)) / 2.0;
    const double global_h = direct_normal * sin_alt + diffuse_horizontal;
    s.reflected_ground = albedo * global_h * (1.0 - cosd(tilt)) / 2.0;
    s.diffuse_sky = std::max(0.0, s.diffuse_sky);
    s.reflected_ground = std::max(0.0, s.reflected_ground);
    return s;
}

double sky_temperature(const WeatherRecord& r, const SkyModel& model) {
    const double t_air = r.dry_bulb + kKelvin;
    const char* variant = model.kind == SkyModel::Kind::Air        ? "AIR"
                          : model.kind == SkyModel::Kind::Swinbank ? "SWINBANK"
                                                                   : "DEW_POINT";
    double emissivity = 1.0;
    switch (model.kind) {
    case SkyModel::Kind::Air:
        return t_air;
    case SkyModel::Kind::Swinbank:
        emissivity = std::pow(0.0552 * std::pow(t_air, 1.5) / t_air, 4.0);
        break;
    case SkyModel::Kind::DewPoint:
        if (!r.dew_point)
            throw Error(ErrorCode::MissingField, fmt::format("{}: sky model {} needs dew_point",
                                                             format_timestamp(r.timestamp), variant));
        emissivity = std::clamp(0.741 + 0.0062 * *r.dew_point, 0.0, 1.0);
        break;
    }
    if (model.cloud_correction) {
        if (!r.cloud_cover)
            throw Error(ErrorCode::MissingField, fmt::format("{}: sky model {} with cloud correction needs cloud_cover",
                                                             format_timestamp(r.timestamp), variant));
        emissivity += (1.0 - emissivity) * *r.cloud_cover;
    }
    return std::pow(emissivity, 0.25) * t_air;
}

bool is_windward(double surface_azimuth, double wind_direction) {
    double d = std::fmod(std::fabs(surface_azimuth - wind_direction), 360.0);
    d = std::min(d, 360.0 - d);
    return d <= 90.0;
}

double outdoor_film_coefficient(const OutdoorConvectionModel& m, double v, double surface_azimuth,
                                double wind_direction) {
    if (v < 0.0) throw Error(ErrorCode::InvalidInput, fmt::format("negative wind speed {}", v));
    const bool windward = is_windward(surface_azimuth, wind_direction);
    switch (m.kind) {
    case OutdoorConvectionModel::Kind::Constant:
        return m.h;
    case OutdoorConvectionModel::Kind::LinearWind:
        return m.linear_a + m.linear_b * v;
    case OutdoorConvectionModel::Kind::Ito: {
        double local = windward ? (v > 2.0 ? 0.25 * v : 0.5 * v) : 0.3 + 0.05 * v;
        return m.ito_coefficient * std::pow(local, m.ito_exponent);
    }
    case OutdoorConvectionModel::Kind::ColeSturrock:
        return windward ? m.cole_windward_a + m.cole_windward_b * v : m.cole_leeward;
    }
    return m.h;
}

// ---------------------------------------------------------------------------
// series

WeatherSeries::WeatherSeries(std::vector<WeatherRecord> records) : records_(std::move(records)) {
    if (records_.empty()) throw Error(ErrorCode::InvalidInput, "weather series is empty");
    long res = 0;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        check_record(records_[i]);
        if (i == 0) continue;
        const long dt = (records_[i].timestamp - records_[i - 1].timestamp).count();
        if (dt <= 0)
            throw Error(ErrorCode::InvalidInput, fmt::format("weather timestamps not increasing at {}",
                                                             format_timestamp(records_[i].timestamp)));
        res = res == 0 ? dt : std::min(res, dt);
    }
    resolution_ = res == 0 ? 3600 : res;
}

void WeatherSeries::require_coverage(Timestamp from, Timestamp to) const {
    const std::chrono::seconds res{resolution_};
    auto gap = [&](Timestamp t) {
        return Error(ErrorCode::WeatherGap, fmt::format("weather missing at {}", format_timestamp(t)));
    };
    if (from < records_.front().timestamp) throw gap(from);
    for (std::size_t i = 1; i < records_.size(); ++i) {
        const Timestamp prev = records_[i - 1].timestamp;
        const Timestamp next = records_[i].timestamp;
        if (next - prev <= res) continue;
        if (next <= from || prev >= to) continue;
        throw gap(std::max(prev + res, from));
    }
    if (to > records_.back().timestamp) throw gap(std::max(records_.back().timestamp + res, from));
}

WeatherRecord WeatherSeries::at(Timestamp t) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), t,
                               [](const WeatherRecord& r, Timestamp x) { return r.timestamp < x; });
    if (it != records_.end() && it->timestamp == t) return *it;
    if (it == records_.begin() || it == records_.end())
        throw Error(ErrorCode::WeatherGap, fmt::format("weather missing at {}", format_timestamp(t)));
    const WeatherRecord& a = *(it - 1);
    const WeatherRecord& b = *it;
    const double f = static_cast<double>((t - a.timestamp).count()) / static_cast<double>((b.timestamp - a.timestamp).count());
    auto lerp = [f](double x, double y) { return x + f * (y - x); };
    auto lerp_opt = [&](const std::optional<double>& x, const std::optional<double>& y) -> std::optional<double> {
        if (x && y) return lerp(*x, *y);
        return std::nullopt;
    };
    WeatherRecord r;
    r.timestamp = t;
    r.dry_bulb = lerp(a.dry_bulb, b.dry_bulb);
    r.humidity_ratio = lerp(a.humidity_ratio, b.humidity_ratio);
    r.wind_speed = lerp(a.wind_speed, b.wind_speed);
    double dir_delta = std::remainder(b.wind_direction - a.wind_direction, 360.0);
    r.wind_direction = std::fmod(a.wind_direction + f * dir_delta + 360.0, 360.0);
    r.global_horizontal = lerp(a.global_horizontal, b.global_horizontal);
    r.diffuse_horizontal = lerp_opt(a.diffuse_horizontal, b.diffuse_horizontal);
    if (r.diffuse_horizontal) r.diffuse_horizontal = std::min(*r.diffuse_horizontal, r.global_horizontal);
    r.cloud_cover = lerp_opt(a.cloud_cover, b.cloud_cover);
    r.dew_point = lerp_opt(a.dew_point, b.dew_point);
    return r;
}

std::vector<WeatherRecord> synthetic_weather(const Site& site, const SyntheticWeather& w) {
    if (w.days < 1 || w.step <= 0 || 86400 % w.step != 0)
        throw Error(ErrorCode::InvalidInput, "synthetic weather needs days >= 1 and a step dividing a day");
    const double humidity = humidity_ratio_from_rh(w.mean_temperature, w.relative_humidity);
    const long n = w.days * 86400L / w.step;
    std::vector<WeatherRecord> out;
    out.reserve(static_cast<std::size_t>(n + 1));
    for (long k = 0; k <= n; ++k) {
        WeatherRecord r;
        r.timestamp = w.start + std::chrono::seconds(k * w.step);
        const double h = hours_of_day(r.timestamp);
        r.dry_bulb = w.mean_temperature + w.amplitude * std::cos(2.0 * std::numbers::pi * (h - 15.0) / 24.0);
        r.humidity_ratio = std::min(humidity, saturation_humidity_ratio(r.dry_bulb));
        r.wind_speed = w.wind_speed;
        r.wind_direction = w.wind_direction;
        r.cloud_cover = w.cloud_cover;
        if (w.clearness > 0.0) {
            const SolarPosition pos = solar_position(site, r.timestamp);
            const double sin_alt = std::sin(pos.altitude * std::numbers::pi / 180.0);
            if (sin_alt > 0.0) r.global_horizontal = w.clearness * extraterrestrial_normal(day_of_year(r.timestamp)) * sin_alt;
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace mzsim
