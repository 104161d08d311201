#pragma once

#include "mzsim/building.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mzsim {

/// Cooling delivered by a split unit over one step (mean powers, W).
struct HvacOutput {
    double total = 0.0;
    double sensible = 0.0;
    double latent = 0.0;
    double electric = 0.0;
    double on_fraction = 0.0;  // of the step
    double unmet = 0.0;        // sensible load the unit could not meet (ideal model)
};

struct CyclingState {
    bool on = false;
    double time_since_on = 0.0;  // s
    double on_time = 0.0;        // s, accumulated
};

/// Rejects non-positive capacities, SHR outside (0, 1], deadband <= 0, tau <= 0.
void check_unit(const SplitUnitSpec& unit);

double nominal_cop(const SplitUnitSpec& unit);

/// Ideal control: meets the sensible load up to the rated sensible capacity,
/// with constant SHR and nominal COP.
HvacOutput model0_ideal(double sensible_load, const SplitUnitSpec& unit, double dt = 3600.0);

/// Thermostat with hysteresis around the setpoint.
bool thermostat_step(bool was_on, double air_temperature, double setpoint, double deadband);

/// Q_ss (1 - exp(-t / tau)).
double transient_capacity(double steady, double t_since_on, double tau);
/// Energy of the transient over [0, t]: Q_ss (t - tau (1 - exp(-t / tau))).
double transient_energy(double steady, double t, double tau);

struct CyclingStep {
    HvacOutput output;
    CyclingState state;
};

/// On/off unit with a first-order capacity ramp. The thermostat reads the air
/// temperature at the start of the step; the output is the mean over the step.
/// Electric power is the rated draw whenever the compressor runs.
CyclingStep model1_step(const CyclingState& state, double air_temperature, const SplitUnitSpec& unit,
                        double dt = 60.0);

struct HvacConditions {
    double outdoor_temperature = 35.0;  // C
    double indoor_temperature = 27.0;   // C
    double indoor_humidity_ratio = 0.011;
};

bool has_performance_map(const SplitUnitSpec& unit);

/// Steady capacities and power from the affine performance map.
struct MapPoint {
    double outdoor_temperature = 0.0;
    double indoor_temperature = 0.0;
    double indoor_humidity_ratio = 0.0;
    double total = 0.0;
    double sensible = 0.0;
    double electric = 0.0;
};

MapPoint evaluate_map(const SplitUnitSpec& unit, const HvacConditions& c);

/// Like model1_step with steady values from the performance map. Throws
/// Error(UnfittedMap) when the unit has no map.
CyclingStep model2_step(const CyclingState& state, const HvacConditions& conditions, const SplitUnitSpec& unit,
                        double dt = 60.0);

struct PerformanceFit {
    std::vector<double> total, sensible, electric;  // {c0, c_Tout, c_Tin, c_win}
    double rms_total = 0.0, rms_sensible = 0.0, rms_electric = 0.0;
};

/// Ordinary least squares per quantity. Throws Error(RankDeficient) with fewer
/// than four points or a degenerate design.
PerformanceFit fit_performance_map(std::span<const MapPoint> points);

struct HvacSummary {
    double electric_kwh = 0.0;
    double cooling_kwh = 0.0;
    double sensible_kwh = 0.0;
    std::optional<double> mean_cop;  // none without electric energy
    double on_time_fraction = 0.0;
    double horizon_s = 0.0;
    std::vector<double> daily_electric_kwh;  // per started day of the series
    std::vector<double> daily_cooling_kwh;
};

HvacSummary summarize(std::span<const HvacOutput> series, double dt);

/// COP against fractional on-time, sampled over windows of a cycling run.
struct CopCurve {
    std::vector<double> on_fraction;  // ascending
    std::vector<double> cop;

    bool empty() const { return on_fraction.empty(); }
    /// Linear interpolation, clamped at the ends.
    double at(double on_fraction) const;
};

/// Builds the curve from a model 1/2 series split into windows of `window` s.
/// Windows with no electric use are skipped; equal on-fractions are averaged.
CopCurve cop_curve(std::span<const HvacOutput> series, double dt, double window = 3600.0);

/// Rescales the electric power of an ideal-model series so that each step runs
/// at the COP the curve gives for its on-fraction.
std::vector<HvacOutput> apply_cop_correction(std::span<const HvacOutput> ideal_series, const CopCurve& curve);

}  // namespace mzsim
