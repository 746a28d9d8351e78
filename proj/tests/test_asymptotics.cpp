#include <gtest/gtest.h>

#include <cmath>

#include "skewloc/asymptotics.hpp"

using namespace skewloc;

namespace {

const QuadratureConfig quad{};
const SeriesConfig series{};

double weighted_closed_form(double sm, double sp) {
    return 16.0 / (3.0 * sqrt_2pi) * (sm * sm + sp * sp) / (sm + sp);
}

}  // namespace

TEST(LimitConstant, Crossing) {
    EXPECT_NEAR(limit_constant(ProcessParams::oscillating(1, 1), kernels::h0()), 0.797884560802865, 1e-9);
    EXPECT_NEAR(limit_constant(ProcessParams::oscillating(1, 2), kernels::h0()), 2.0 / 3.0 * sqrt_2_over_pi, 1e-9);
    EXPECT_NEAR(limit_constant(ProcessParams::skew(0.5), kernels::h0()), sqrt_2_over_pi * 0.75, 1e-9);
}

TEST(LimitConstant, Weighted) {
    for (auto [sm, sp] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}) {
        EXPECT_NEAR(limit_constant(ProcessParams::oscillating(sm, sp), kernels::h1x2()), 1.0, 1e-9);
    }
    EXPECT_NEAR(limit_constant(ProcessParams::skew(0.5), kernels::h1x2()), 0.75, 1e-9);
    EXPECT_NEAR(limit_constant(ProcessParams::skew(-0.3), kernels::h1x2()), 0.91, 1e-9);
}

TEST(ClosedForm, Values) {
    const auto w = closed_form_constants(EstimatorFormula::weighted_obm, ProcessParams::oscillating(1, 1));
    EXPECT_EQ(w.limit_constant, 1.0);
    EXPECT_NEAR(*w.clt_constant, 16.0 / (3.0 * sqrt_2pi), 1e-15);
    EXPECT_NEAR(*w.clt_constant, 2.127693, 1e-6);
    const auto c = closed_form_constants(EstimatorFormula::crossing_obm, ProcessParams::oscillating(1, 2));
    EXPECT_NEAR(c.limit_constant, 0.531923, 5e-7);
    EXPECT_FALSE(c.clt_constant.has_value());
    EXPECT_THROW(closed_form_constants(EstimatorFormula::crossing_sbm, ProcessParams::oscillating(1, 2)), ConfigError);
}

TEST(Kappa, CenteredUnderStationaryMeasure) {
    for (const auto& p : {ProcessParams::oscillating(1, 2), ProcessParams::skew(0.5)}) {
        const double v = stationary_average(p, [&](double x) { return kappa(p, kernels::h0(), x, quad.inner()); },
                                            quad.scaled(100));
        EXPECT_NEAR(v, 0.0, 1e-7);
    }
}

TEST(Kappa, WeightedSkewFunction) {
    // Closed form of the centered transform for 2h1 on an SBM.
    for (double b : {-0.5, 0.5}) {
        const auto p = ProcessParams::skew(b);
        for (double y : {-2.0, -0.4, 0.3, 1.5}) {
            EXPECT_NEAR(kappa(p, kernels::h1x2(), y), weighted_skew_kappa(b, y), 1e-9) << b << ' ' << y;
        }
    }
}

TEST(Series, WeightedKernelVanishes) {
    for (const auto& p : {ProcessParams::oscillating(1, 1), ProcessParams::oscillating(1, 2)}) {
        for (double x : {-2.0, -0.5, 0.0, 0.5, 2.0}) EXPECT_NEAR(q_series(p, kernels::h1x2(), x), 0.0, 1e-6) << x;
    }
}

TEST(Series, WeightedSkewSeriesZeroAtThreshold) {
    for (double b : {-0.5, 0.5}) {
        const auto s = weighted_skew_series(b, 0.0);
        EXPECT_NEAR(s.value, 0.0, 1e-4);
        EXPECT_GT(s.truncation_j, 0);
    }
}

TEST(Series, CrossingSeriesNonZeroAtThreshold) {
    // The h0 series does not vanish at the threshold (see the weighted case above).
    EXPECT_LT(q_series(ProcessParams::skew(0.5), kernels::h0(), 0.0), -0.2);
    EXPECT_GT(q_series(ProcessParams::skew(-0.5), kernels::h0(), 0.0), 0.2);
}

TEST(TripleIntegral, Oracles) {
    const auto bm = ProcessParams::oscillating(1, 1);
    EXPECT_NEAR(triple_integral(bm, kernels::h1x2()), 4.0 / (3.0 * sqrt_2pi), 1e-6);
    EXPECT_NEAR(triple_integral(bm, kernels::h0()), 0.5, 1e-7);
    EXPECT_NEAR(triple_integral(ProcessParams::oscillating(1, 2), kernels::h0()), 1.0 / 3.0, 1e-7);
}

TEST(CltConstant, WeightedMatchesClosedForm) {
    for (auto [sm, sp] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}) {
        const auto r = clt_constant_obm(ProcessParams::oscillating(sm, sp), kernels::h1x2());
        EXPECT_NEAR(r.clt_constant, weighted_closed_form(sm, sp), 1e-6) << sm << ',' << sp;
        EXPECT_NEAR(r.terms[0] + r.terms[1] + r.terms[2] + r.terms[3], r.clt_constant, 1e-12);
        EXPECT_LT(r.err_estimate, 1e-4);
    }
}

TEST(CltConstant, CrossingFormulaAgrees) {
    const auto p = ProcessParams::oscillating(1, 2);
    const auto generic = clt_constant_obm(p, kernels::h0());
    const auto special = crossing_constant_obm(p);
    EXPECT_NEAR(generic.clt_constant, special.clt_constant, 1e-7);
    EXPECT_NEAR(generic.limit_constant, special.limit_constant, 1e-9);
    EXPECT_GT(generic.clt_constant, 0.0);
}

TEST(CltConstant, SkewAtZeroIsBrownian) {
    for (const auto& k : {kernels::h0(), kernels::h1x2()}) {
        const auto a = clt_constant_sbm(0.0, k);
        const auto b = clt_constant_obm(ProcessParams::oscillating(1, 1), k);
        EXPECT_NEAR(a.clt_constant, b.clt_constant, a.err_estimate + b.err_estimate + 1e-9) << k.name;
    }
}

TEST(CltConstant, SkewTransportMatchesDirect) {
    const auto p = ProcessParams::skew(0.5);
    const auto a = clt_constant_sbm(p, kernels::h0());
    const auto b = clt_constant_sbm_direct(p, kernels::h0());
    EXPECT_NEAR(a.limit_constant, 0.598413, 5e-7);
    EXPECT_NEAR(a.clt_constant, b.clt_constant, 1e-7);
}

TEST(CltConstant, WeightedSkewFormula) {
    const auto f = weighted_constant_sbm(0.5);
    const auto r = clt_constant_sbm(0.5, kernels::h1x2());
    EXPECT_DOUBLE_EQ(f.limit_constant, 0.75);
    EXPECT_NEAR(f.clt_constant, r.clt_constant, 1e-7);
    EXPECT_NEAR(f.one_step_average, 0.0, 1e-10);
}

TEST(CltConstant, RejectsWrongProcess) {
    EXPECT_THROW(clt_constant_obm(ProcessParams::skew(0.2), kernels::h0()), ConfigError);
    EXPECT_THROW(clt_constant_sbm(ProcessParams::oscillating(1, 2), kernels::h0()), ConfigError);
}

TEST(Config, Validation) {
    SeriesConfig s;
    s.j_max = s.j_min;
    EXPECT_THROW(s.validate(), ConfigError);
    QuadratureConfig q;
    q.tail_sigmas = 3.0;
    EXPECT_THROW(q.validate(), ConfigError);
    EXPECT_THROW(limit_constant(ProcessParams::skew(0.1), kernels::h0(), q), ConfigError);
}

TEST(Admissibility, BuiltinKernelsPass) {
    EXPECT_TRUE(admissibility_warnings(kernels::h0(), 3.0).empty());
    EXPECT_TRUE(admissibility_warnings(kernels::h1x2(), 3.0).empty());
}

TEST(Admissibility, BrokenEnvelopeWarns) {
    BivariateKernel k = kernels::h0();
    k.name = "wide";
    k.eval = [](double, double) { return 1.0; };
    k.envelope = [](double) { return 1.0; };
    k.envelope_rate = 0.0;
    const auto w = admissibility_warnings(k, 3.0);
    EXPECT_FALSE(w.empty());
}
