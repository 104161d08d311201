#pragma once

#include "mzsim/building.hpp"
#include "mzsim/model_catalog.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace mzsim {

inline constexpr double kGravity = 9.81;
/// Below this pressure difference (Pa) power-law links are linearized.
inline constexpr double kLinearizationPressure = 1e-4;

/// Ideal-gas air density at standard pressure, kg/m3.
double air_density(double t_kelvin);
double wind_pressure(double cp, double rho_out, double wind_speed);

struct LinkDerivative {
    double flow = 0.0;        // kg/s, positive from upstream side a to b
    double derivative = 0.0;  // d flow / d dp
};

/// Signed power-law crack flow, kg/s. Linear through zero for |dp| < kLinearizationPressure.
double crack_flow(double coefficient, double exponent, double dp);
LinkDerivative crack_flow_derivative(double coefficient, double exponent, double dp);

struct OpeningFlow {
    double a_to_b = 0.0;  // kg/s, >= 0
    double b_to_a = 0.0;  // kg/s, >= 0
    std::optional<double> neutral_height;  // above the opening bottom
    double derivative = 0.0;  // d (a_to_b - b_to_a) / d dp_bottom

    double net() const { return a_to_b - b_to_a; }
};

/// Bidirectional flow through a large vertical opening. The pressure
/// difference p_a - p_b varies linearly with height from dp_bottom. The local
/// flux is linear in p where |p| < kLinearizationPressure.
OpeningFlow large_opening_flow(double width, double height, double discharge_coefficient, double rho_a,
                               double rho_b, double dp_bottom);

/// Node index used for the outside in airflow networks and flow fields.
inline constexpr int kOutsideNode = -1;

struct AirflowLink {
    enum class Kind { Crack, LargeOpening };
    Kind kind = Kind::Crack;
    CrackSpec crack;
    LargeOpeningSpec opening;
    int from = kOutsideNode;  // zone index or kOutsideNode
    int to = 0;
    double elevation = 0.0;  // crack height or opening bottom above datum, m
    std::optional<double> cp;  // wind pressure coefficient on the outside end
    EntityId component = 0;
};

struct AirflowNetwork {
    std::size_t zone_count = 0;
    std::vector<AirflowLink> links;
};

/// Links from the building's crack and large-opening components.
AirflowNetwork build_airflow_network(const Building& b);

struct AirflowConditions {
    std::vector<double> zone_temperatures;  // K
    double outside_temperature = 293.15;     // K
    double wind_speed = 0.0;                 // m/s
};

struct LinkFlow {
    double forward = 0.0;   // from -> to, kg/s >= 0
    double backward = 0.0;  // to -> from, kg/s >= 0
    std::optional<double> neutral_height;

    double net() const { return forward - backward; }
};

struct FlowSolution {
    std::vector<double> pressures;  // zone reference pressures at datum, Pa
    std::vector<LinkFlow> flows;
    std::vector<double> residuals;  // per zone net inflow, kg/s
    int iterations = 0;

    double max_residual() const;
};

struct NetworkEquations {
    Eigen::VectorXd residual;  // per zone net inflow
    Eigen::MatrixXd jacobian;  // d residual / d pressure
    std::vector<LinkFlow> flows;
};

NetworkEquations evaluate_network(const AirflowNetwork& net, const AirflowConditions& cond,
                                  const Eigen::VectorXd& pressures);

/// Newton-Raphson on zone reference pressures with under-relaxation. Throws
/// Error(NonConvergence) reporting the worst residual, or Error(SingularJacobian).
FlowSolution solve_pressures(const AirflowNetwork& net, const AirflowConditions& cond,
                             const AirflowModel& options = {});

/// Directed mass flow between zone indices (or kOutsideNode).
struct DirectedFlow {
    int from = kOutsideNode;
    int to = 0;
    double mass = 0.0;  // kg/s >= 0
};

std::vector<DirectedFlow> directed_flows(const AirflowNetwork& net, const FlowSolution& sol);
/// Fixed flows: zone infiltration (air changes with the outside) and
/// per-link prescribed exchange, both balanced.
std::vector<DirectedFlow> prescribed_flows(const Building& b, double rho_out);

}  // namespace mzsim
