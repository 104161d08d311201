#include "fixtures.hpp"

#include "mzsim/error.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <gtest/gtest.h>
#include <random>

using namespace mzsim;
using fixture::layer;

namespace {

std::vector<ConductionModel> all_schemes() {
    std::vector<ConductionModel> out = {{ConductionModel::Kind::R2C}, {ConductionModel::Kind::R3C2}};
    for (int n = 1; n <= 4; ++n) out.push_back({ConductionModel::Kind::PerLayer, n});
    return out;
}

}  // namespace

TEST(WallUa, SeriesLaw) {
    const std::vector<WallLayer> one = {layer(0.2, 1.0, 1000, 1000)};
    EXPECT_NEAR(wall_ua(one, 10.0), 50.0, 1e-12);
    const std::vector<WallLayer> two = {layer(0.2, 1.0, 1000, 1000), layer(0.2, 1.0, 1000, 1000)};
    EXPECT_NEAR(wall_ua(two, 10.0), 25.0, 1e-12);
    EXPECT_NEAR(wall_ua(fixture::light_wall(), 1.0), 1.0 / (0.025 + 2.5 + 0.015 / 0.35), 1e-12);
    EXPECT_NEAR(wall_ua(fixture::light_wall(), 1.0), 0.3894, 1e-3);
}

TEST(Discretize, R2CSplitsCapacity) {
    const auto layers = fixture::heavy_wall();
    const auto net = discretize_wall(layers, 8.0, {ConductionModel::Kind::R2C});
    ASSERT_EQ(net.nodes.size(), 2u);
    ASSERT_EQ(net.branches.size(), 1u);
    double c = 0.0;
    for (const auto& l : layers) c += l.density * l.specific_heat * l.thickness;
    EXPECT_NEAR(net.nodes[0].capacity, 8.0 * c / 2.0, 1e-6);
    EXPECT_NEAR(net.nodes[1].capacity, 8.0 * c / 2.0, 1e-6);
    EXPECT_NEAR(net.branches[0].conductance, wall_ua(layers, 8.0), 1e-12);
}

TEST(Discretize, ThreeResistanceSplit) {
    const auto layers = fixture::light_wall();
    const double ua = wall_ua(layers, 2.0);
    const auto net = discretize_wall(layers, 2.0, {ConductionModel::Kind::R3C2});
    ASSERT_EQ(net.branches.size(), 3u);
    EXPECT_NEAR(net.branches[0].conductance, 4.0 * ua, 1e-12);
    EXPECT_NEAR(net.branches[1].conductance, 2.0 * ua, 1e-12);
    EXPECT_NEAR(net.branches[2].conductance, 4.0 * ua, 1e-12);
    EXPECT_EQ(net.nodes[net.inner()].capacity, 0.0);
    EXPECT_EQ(net.nodes[net.outer()].capacity, 0.0);
}

TEST(Discretize, PerLayerOneOnHomogeneousSlab) {
    const std::vector<WallLayer> slab = {layer(0.2, 1.0, 2000, 900)};
    const auto net = discretize_wall(slab, 5.0, {ConductionModel::Kind::PerLayer, 1});
    int capacity_nodes = 0;
    for (const auto& n : net.nodes) capacity_nodes += n.capacity > 0.0;
    EXPECT_EQ(capacity_nodes, 1);
    ASSERT_EQ(net.branches.size(), 2u);
    for (const auto& br : net.branches) EXPECT_NEAR(br.conductance, 2.0 * wall_ua(slab, 5.0), 1e-9);
}

TEST(Discretize, SteadyFluxAndCapacityEveryScheme) {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> area(0.5, 40.0), temp(-20.0, 50.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto layers = fixture::random_layers(rng);
        const double a = area(rng), ti = temp(rng), to = temp(rng);
        const double ua = wall_ua(layers, a);
        for (const auto& scheme : all_schemes()) {
            const auto net = discretize_wall(layers, a, scheme);
            const double expected = ua * (ti - to);
            // the library solve and an independent dense reduction
            EXPECT_NEAR(steady_flux(net, ti, to), expected, 1e-9 * std::max(1.0, std::fabs(expected)));
            EXPECT_NEAR(fixture::dense_steady_flux(net, ti, to), expected, 1e-9 * std::max(1.0, std::fabs(expected)));
            EXPECT_NEAR(net.total_capacity(), wall_capacity(layers, a), 1e-9 * wall_capacity(layers, a));
            // series conductance of the chain
            double r = 0.0;
            for (const auto& br : net.branches) r += 1.0 / br.conductance;
            EXPECT_NEAR(1.0 / r, ua, 1e-9 * ua);
        }
    }
}

TEST(Discretize, WindowIsPureResistance) {
    const auto net = window_network(5.8, 2.0);
    EXPECT_EQ(net.total_capacity(), 0.0);
    EXPECT_NEAR(steady_flux(net, 25.0, 15.0), 5.8 * 2.0 * 10.0, 1e-9);
}

TEST(PeriodicResponse, SteadyLimit) {
    const auto layers = fixture::light_wall();
    const auto r = analytic_periodic_response(layers, 1e12);
    EXPECT_NEAR(std::abs(r.transmittance), wall_ua(layers, 1.0), 1e-6);
}

TEST(PeriodicResponse, ThickConcreteAttenuates) {
    const std::vector<WallLayer> slab = {layer(0.3, 1.75, 2400, 920)};
    const auto r = analytic_periodic_response(slab, 86400.0);
    EXPECT_LT(std::abs(r.transmittance), wall_ua(slab, 1.0));
}

TEST(PeriodicResponse, SingleLayerClosedForm) {
    // k gamma / sinh(gamma L) for one homogeneous slab
    const WallLayer l = layer(0.2, 1.2, 2000, 900);
    const double w = 2.0 * std::numbers::pi / 86400.0;
    const std::complex<double> g = std::sqrt(std::complex<double>(0.0, w * l.density * l.specific_heat / l.conductivity));
    const auto expected = l.conductivity * g / std::sinh(g * l.thickness);
    const std::vector<WallLayer> slab = {l};
    const auto r = analytic_periodic_response(slab, 86400.0);
    EXPECT_NEAR(std::abs(r.transmittance - expected), 0.0, 1e-12 * std::abs(expected));
}

TEST(PeriodicResponse, NetworkMatchesDenseOracle) {
    const auto layers = fixture::heavy_wall();
    for (const auto& scheme : all_schemes()) {
        const auto net = discretize_wall(layers, 3.0, scheme);
        const auto lib = network_periodic_response(net, 3.0, 86400.0).transmittance;
        const auto oracle = fixture::dense_transmittance(net, 3.0, 86400.0);
        EXPECT_NEAR(std::abs(lib - oracle), 0.0, 1e-10 * std::abs(oracle));
    }
}

TEST(PeriodicResponse, FineNetworkConvergesToAnalytic) {
    const auto layers = fixture::heavy_wall();
    const auto exact = analytic_periodic_response(layers, 86400.0).transmittance;
    const auto net = discretize_wall(layers, 1.0, {ConductionModel::Kind::PerLayer, 60});
    const auto approx = network_periodic_response(net, 1.0, 86400.0).transmittance;
    EXPECT_LT(std::abs(approx - exact) / std::abs(exact), 1e-3);
}

TEST(PeriodicResponse, PerLayerThreeWithinFivePercent) {
    const auto layers = fixture::heavy_wall();
    const double exact = std::abs(analytic_periodic_response(layers, 86400.0).transmittance);
    auto error = [&](ConductionModel m) {
        const auto net = discretize_wall(layers, 1.0, m);
        return std::fabs(std::abs(network_periodic_response(net, 1.0, 86400.0).transmittance) - exact);
    };
    const double e_r2c = error({ConductionModel::Kind::R2C});
    const double e_3r2c = error({ConductionModel::Kind::R3C2});
    const double e_pl3 = error({ConductionModel::Kind::PerLayer, 3});
    EXPECT_LT(e_pl3 / exact, 0.05);
    EXPECT_GE(e_r2c, e_3r2c);
    EXPECT_GE(e_3r2c, e_pl3);
}

TEST(PeriodicResponse, RejectsNonPositivePeriod) {
    EXPECT_THROW(analytic_periodic_response(fixture::light_wall(), 0.0), Error);
}
