#pragma once

#include "mzsim/building.hpp"
#include "mzsim/model_catalog.hpp"

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace mzsim {

/// One face of a wall or window as seen from inside a zone.
struct InteriorSurface {
    double area = 1.0;
    SurfaceClass surface_class = SurfaceClass::VerticalWall;
    double sw_absorptance = 0.6;
    double sw_reflectance = 0.4;
    double lw_emissivity = 0.9;
};

/// Convective film coefficient between an interior surface and the zone air.
/// `delta_t` is surface minus air temperature.
double indoor_film_coefficient(const IndoorConvectionModel& model, double delta_t, SurfaceClass surface_class);

/// Linearized long-wave coupling inside one zone.
struct LongwaveCoupling {
    bool uses_star_node = true;
    std::vector<double> star_conductance;  // W/K, surface to radiant star node
    Eigen::MatrixXd pair_conductance;      // W/K, symmetric, zero diagonal (DETAILED)
};

double linearized_radiative_coefficient(double emissivity, double t_ref_kelvin);

/// Throws Error(InvalidInput) for DETAILED on a zone with fewer than two surfaces.
LongwaveCoupling longwave_indoor(std::span<const InteriorSurface> surfaces, const IndoorLongwaveModel& model);

/// Surface groups used by the pooled short-wave model.
enum class SurfaceGroup { Floors, Walls, Windows, Separations };
SurfaceGroup group_of(SurfaceClass cls);

/// Share of the radiation leaving surface j that reaches surface i: receiving
/// area over the area visible from j. Floors do not see other floors; a zone
/// whose surfaces are all floors falls back to every surface seeing every other.
Eigen::MatrixXd shortwave_redistribution(std::span<const InteriorSurface> surfaces);

/// Absorbed short-wave power per surface, W. Direct radiation lands on the
/// floors, diffuse on every surface, by area. The enclosure is lossless: the
/// part of the incident power not absorbed is reflected. Throws
/// Error(NoFloorSurface) when direct > 0 and the zone has no floor.
std::vector<double> shortwave_distribution(std::span<const InteriorSurface> surfaces, double direct, double diffuse,
                                           const IndoorShortwaveModel& model);

}  // namespace mzsim
