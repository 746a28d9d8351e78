#include <gtest/gtest.h>

#include <cmath>

#include "skewloc/analytic.hpp"

using namespace skewloc;

namespace {

const QuadratureConfig quad{};

double total_mass(const ProcessParams& p, double t, double x) {
    auto f = [&](double y) { return transition_density(p, t, x, y); };
    return integrate_piecewise(f, make_breaks(x - 20.0, x + 20.0, {0.0, x}), quad).value;
}

}  // namespace

TEST(Process, RejectsClosedSkewness) {
    EXPECT_THROW(ProcessParams::skew(1.0), ConfigError);
    EXPECT_THROW(ProcessParams::skew(-1.0), ConfigError);
    EXPECT_THROW(ProcessParams::oscillating(0.0, 1.0), ConfigError);
    EXPECT_THROW(ProcessParams::oscillating(1.0, 1.0, NAN), ConfigError);
    try {
        ProcessParams::skew(1.0);
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("open interval"), std::string::npos);
    }
}

TEST(Process, SkewCoordinates) {
    const auto p = ProcessParams::oscillating(1.0, 2.0);
    EXPECT_DOUBLE_EQ(p.beta(), -1.0 / 3.0);
    EXPECT_DOUBLE_EQ(p.localtime_ratio(), 4.0 / 3.0);
    EXPECT_DOUBLE_EQ(p.sigma(0.0), 2.0);
    for (double x : {-3.0, -0.5, 0.0, 0.25, 4.0}) EXPECT_DOUBLE_EQ(p.from_skew_state(p.to_skew_state(x)), x);
    const auto c = ProcessParams::skew(0.5).canonical_oscillating();
    EXPECT_DOUBLE_EQ(c.sigma_minus(), 1.5);
    EXPECT_DOUBLE_EQ(c.sigma_plus(), 0.5);
    EXPECT_DOUBLE_EQ(c.beta(), 0.5);
}

TEST(Density, SkewReducesToGaussianAtZeroBeta) {
    for (double y : {-2.0, -0.1, 0.0, 1.3}) {
        EXPECT_NEAR(skew_density(0.0, 0.7, 0.4, y), gaussian_density(0.7, y - 0.4), 1e-15);
    }
    EXPECT_THROW(skew_density(0.5, 0.0, 0.0, 1.0), ConfigError);
    EXPECT_THROW(skew_density(1.0, 1.0, 0.0, 1.0), ConfigError);
}

TEST(Density, IntegratesToOne) {
    for (const auto& p : {ProcessParams::skew(0.5), ProcessParams::skew(-0.7), ProcessParams::oscillating(1.0, 2.0),
                          ProcessParams::oscillating(2.0, 3.0)}) {
        for (double x : {-1.0, 0.0, 0.3}) EXPECT_NEAR(total_mass(p, 0.7, x), 1.0, 1e-10);
    }
}

TEST(Density, CdfMatchesDensity) {
    for (const auto& p : {ProcessParams::skew(0.5), ProcessParams::oscillating(1.0, 2.0)}) {
        for (double x : {-0.8, 0.0, 1.1}) {
            for (double y : {-1.5, -0.2, 0.0, 0.4, 2.0}) {
                auto f = [&](double z) { return transition_density(p, 0.6, x, z); };
                const double lo = -30.0;
                const double v = integrate_piecewise(f, make_breaks(lo, y, {0.0, x}), quad).value;
                EXPECT_NEAR(transition_cdf(p, 0.6, x, y), v, 1e-10) << x << ' ' << y;
            }
        }
    }
}

TEST(Density, SkewMassOnEachSide) {
    // From the threshold the process is positive with probability (1 + beta) / 2.
    EXPECT_NEAR(1.0 - skew_cdf(0.5, 1.0, 0.0, 0.0), 0.75, 1e-14);
    EXPECT_NEAR(skew_cdf(-0.3, 2.0, 0.0, 0.0), 0.65, 1e-14);
}

TEST(JointDensity, BmIntegratesToOne) {
    auto inner = [](double y) {
        auto f = [y](double l) { return joint_density_bm(1.0, y, l); };
        return integrate(f, 0.0, 15.0, quad.inner()).value;
    };
    EXPECT_NEAR(integrate_piecewise(inner, make_breaks(-15.0, 15.0, {0.0}), quad).value, 1.0, 1e-9);
}

TEST(JointDensity, ObmMarginalIsTransitionDensity) {
    const auto p = ProcessParams::oscillating(1.0, 2.0);
    for (double y : {-1.3, 0.4, 2.2}) {
        auto f = [&](double l) { return joint_density_obm(p, 1.0, y, l); };
        EXPECT_NEAR(integrate(f, 0.0, 40.0, quad).value, transition_density(p, 1.0, 0.0, y), 1e-10);
    }
    EXPECT_THROW(joint_density_obm(p, 1.0, 0.0, 1.0), ConfigError);
}

TEST(Transform, StationaryIdentityForG) {
    for (auto [sm, sp] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}) {
        const auto p = ProcessParams::oscillating(sm, sp);
        const double v =
            stationary_average(p, [&](double x) { return transform_H(p, kernels::g(), x, quad.inner()); }, quad.scaled(10));
        EXPECT_NEAR(v, 1.0, 1e-6) << sm << ',' << sp;
    }
}

TEST(Transform, WeightedKernelMatchesG) {
    for (auto [sm, sp] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}) {
        const auto p = ProcessParams::oscillating(sm, sp);
        for (double x : {-2.0, -0.3, 1e-9, 0.7, 3.0}) {
            EXPECT_NEAR(transform_H(p, kernels::h1x2(), x, quad), transform_H(p, kernels::g(), x, quad), 1e-9) << x;
        }
    }
}

TEST(Transform, CrossingProbabilityForBm) {
    // H_{h0}(x) for BM is P(sign change over unit time) = Phi(-|x|).
    const auto p = ProcessParams::oscillating(1.0, 1.0);
    for (double x : {-1.2, 0.3, 2.5}) EXPECT_NEAR(transform_H(p, kernels::h0(), x, quad), std_normal_cdf(-std::abs(x)), 1e-10);
}

TEST(LocalTime, BmMomentsFromThreshold) {
    const auto p = ProcessParams::oscillating(1.0, 1.0);
    auto one = [](double) { return 1.0; };
    EXPECT_NEAR(localtime_moment(p, one, 1, 0.0, quad), sqrt_2_over_pi, 1e-10);
    EXPECT_NEAR(localtime_moment(p, one, 2, 0.0, quad), 1.0, 1e-10);
    EXPECT_NEAR(localtime_moment(p, one, 0, 0.7, quad), 1.0, 1e-10);
}

TEST(LocalTime, BmFirstMomentAwayFromThreshold) {
    // Tanaka: E L_1 = E|x + B_1| - |x|.
    const auto p = ProcessParams::oscillating(1.0, 1.0);
    for (double x : {0.5, 2.0, -1.0}) {
        const double a = std::abs(x);
        const double e_abs = 2.0 * std_normal_pdf(a) + a * (1.0 - 2.0 * std_normal_cdf(-a));
        EXPECT_NEAR(localtime_moment(p, [](double) { return 1.0; }, 1, x, quad), e_abs - a, 1e-9) << x;
    }
}

TEST(LocalTime, SkewFirstMomentIndependentOfBeta) {
    for (double b : {-0.5, 0.0, 0.5}) {
        EXPECT_NEAR(localtime_moment(ProcessParams::skew(b), [](double) { return 1.0; }, 1, 0.0, quad), sqrt_2_over_pi,
                    1e-10);
    }
}

TEST(LocalTime, StationarySecondMoment) {
    const auto p = ProcessParams::oscillating(1.0, 1.0);
    auto l2 = [&](double x) { return localtime_moment(p, [](double) { return 1.0; }, 2, x, quad.inner()); };
    EXPECT_NEAR(stationary_average(p, l2, quad.scaled(10)), 8.0 / (3.0 * sqrt_2pi), 1e-7);
}
