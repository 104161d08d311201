#pragma once

#include "mzsim/building.hpp"
#include "mzsim/model_catalog.hpp"
#include "mzsim/timestamp.hpp"

#include <optional>
#include <vector>

namespace mzsim {

inline constexpr double kSolarConstant = 1367.0;       // W/m2
inline constexpr double kStefanBoltzmann = 5.670374419e-8;
inline constexpr double kKelvin = 273.15;
inline constexpr double kAtmosphericPressure = 101325.0;  // Pa

struct WeatherRecord {
    Timestamp timestamp{};
    double dry_bulb = 20.0;        // C
    double humidity_ratio = 0.008;  // kg/kg
    double wind_speed = 0.0;        // m/s
    double wind_direction = 0.0;    // degrees from north, direction the wind comes from
    double global_horizontal = 0.0;  // W/m2
    std::optional<double> diffuse_horizontal;
    std::optional<double> cloud_cover;  // [0, 1]
    std::optional<double> dew_point;    // C
};

/// Throws Error(InvalidInput) on a record violating its invariants.
void check_record(const WeatherRecord& r);

// Psychrometrics at standard pressure.
double saturation_pressure(double t_c);  // Pa
double humidity_ratio_from_rh(double t_c, double rh_percent);
double saturation_humidity_ratio(double t_c);

struct SolarPosition {
    double altitude = 0.0;     // degrees
    double azimuth = 0.0;      // degrees from north, clockwise
    double declination = 0.0;  // degrees
    double hour_angle = 0.0;   // degrees, negative before solar noon
};

double solar_declination(int day_of_year);
/// Equation of time in minutes.
double equation_of_time(int day_of_year);
SolarPosition solar_position(double latitude, double declination, double hour_angle);
SolarPosition solar_position(const Site& site, Timestamp t);
/// Extraterrestrial normal irradiance including orbital eccentricity.
double extraterrestrial_normal(int day_of_year);

/// Diffuse fraction of global horizontal irradiance from the clearness index.
double diffuse_fraction(double clearness_index);

struct IrradianceSplit {
    double direct_normal = 0.0;
    double diffuse_horizontal = 0.0;
};

IrradianceSplit split_diffuse(const WeatherRecord& r, const SolarPosition& pos, const DiffuseModel& model,
                              int day_of_year);

struct SurfaceIrradiance {
    double direct = 0.0;
    double diffuse_sky = 0.0;
    double reflected_ground = 0.0;

    double total() const { return direct + diffuse_sky + reflected_ground; }
};

/// Isotropic-sky irradiance on a plane of given tilt and azimuth (degrees).
SurfaceIrradiance surface_irradiance(double direct_normal, double diffuse_horizontal, const SolarPosition& pos,
                                     double tilt, double azimuth, double albedo);

/// Sky temperature in kelvin.
double sky_temperature(const WeatherRecord& r, const SkyModel& model);

/// Exterior convective film coefficient, W/(m2 K).
double outdoor_film_coefficient(const OutdoorConvectionModel& model, double wind_speed, double surface_azimuth,
                                double wind_direction);
bool is_windward(double surface_azimuth, double wind_direction);

/// Weather series with linear interpolation. Records must be strictly increasing.
class WeatherSeries {
public:
    explicit WeatherSeries(std::vector<WeatherRecord> records);

    const std::vector<WeatherRecord>& records() const { return records_; }
    /// Smallest spacing between consecutive records, seconds.
    long resolution() const { return resolution_; }
    /// Throws Error(WeatherGap) naming the first missing timestamp in [from, to].
    void require_coverage(Timestamp from, Timestamp to) const;
    WeatherRecord at(Timestamp t) const;

private:
    std::vector<WeatherRecord> records_;
    long resolution_ = 3600;
};

/// Smooth clear-sky weather for tests and demonstrations: sinusoidal
/// dry-bulb (minimum at 03:00, maximum at 15:00), constant humidity ratio,
/// wind and cloud cover, global irradiance proportional to the
/// extraterrestrial horizontal value.
struct SyntheticWeather {
    Timestamp start{};
    int days = 1;
    long step = 3600;  // s between records
    double mean_temperature = 28.0;
    double amplitude = 4.0;
    double relative_humidity = 70.0;  // at the mean temperature, sets the humidity ratio
    double wind_speed = 2.0;
    double wind_direction = 90.0;
    double clearness = 0.7;  // 0 gives no sun
    std::optional<double> cloud_cover;
};

/// Records from start to start + days, both ends included.
std::vector<WeatherRecord> synthetic_weather(const Site& site, const SyntheticWeather& spec);

}  // namespace mzsim
