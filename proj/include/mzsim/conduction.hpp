#pragma once

#include "mzsim/building.hpp"
#include "mzsim/model_catalog.hpp"

#include <complex>
#include <span>
#include <vector>

namespace mzsim {

/// Thermal network of one wall under the electrical analogy: capacities on
/// nodes, conductances on branches.
struct RCNetwork {
    enum class Role { Inner, Outer, Internal };

    struct Node {
        double capacity = 0.0;  // J/K
        Role role = Role::Internal;
    };
    struct Branch {
        std::size_t a = 0;
        std::size_t b = 0;
        double conductance = 0.0;  // W/K
    };

    std::vector<Node> nodes;
    std::vector<Branch> branches;

    /// Inner faces the first layer (zone_a side), outer faces the last layer.
    std::size_t inner() const;
    std::size_t outer() const;
    double total_capacity() const;
};

/// Thermal conductance of the layered slab, surface to surface (no films).
double wall_ua(std::span<const WallLayer> layers, double area);
/// Heat capacity of the slab, J/K.
double wall_capacity(std::span<const WallLayer> layers, double area);

RCNetwork discretize_wall(std::span<const WallLayer> layers, double area, const ConductionModel& scheme);
/// Capacity-free single branch of conductance U * A.
RCNetwork window_network(double u_value, double area);

/// Steady heat flow from inner to outer face with both faces held at fixed
/// temperatures, W.
double steady_flux(const RCNetwork& net, double t_inner, double t_outer);

/// Per unit area response of a slab under sinusoidal forcing.
struct PeriodicResponse {
    std::complex<double> transmittance;      // W/(m2 K), flux out of the outer face per inner amplitude
    std::complex<double> inner_admittance;   // outer face held at zero
    std::complex<double> outer_admittance;   // inner face held at zero
};

/// Analytic layered slab response from the product of per-layer transfer
/// matrices. period_s <= 0 is not accepted; use a very long period for the steady limit.
PeriodicResponse analytic_periodic_response(std::span<const WallLayer> layers, double period_s);

/// Same quantities computed from a discretized network in the frequency
/// domain, normalised by `area`.
PeriodicResponse network_periodic_response(const RCNetwork& net, double area, double period_s);

}  // namespace mzsim
