#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dynregret/scenarios.hpp"

using namespace dynregret;

namespace {

ScenarioConfig base(ScenarioKind kind, int T, int d, double tau, std::uint64_t seed = 1) {
    ScenarioConfig c;
    c.kind = kind;
    c.T = T;
    c.d = d;
    c.tau = tau;
    c.seed = seed;
    return c;
}

} // namespace

TEST(DriftingQuadratic, ExactStepLengths) {
    const auto sc = drifting_quadratic(base(ScenarioKind::DriftingQuadratic, 100, 3, 0.5));
    const auto path = sc.minimizer_path();
    ASSERT_EQ(path.size(), 101u);
    EXPECT_NEAR(path_length(path), 10.0, 1e-9 * 10.0);
    EXPECT_NEAR(squared_path_length(path), 1.0, 1e-9);
    for (const Vector& c : sc.minimizers) EXPECT_TRUE(sc.set.contains(c));
}

TEST(DriftingQuadratic, RealizedPathMatchesStepTimesRounds) {
    for (double tau : {0.3, 0.8}) {
        const auto sc = drifting_quadratic(base(ScenarioKind::DriftingQuadratic, 400, 5, tau, 3));
        const double step = std::pow(400.0, -tau);
        EXPECT_NEAR(path_length(sc.minimizer_path()), 400 * step, 1e-9 * 400 * step);
    }
}

TEST(DriftingQuadratic, ZeroDriftGivesIdenticalOracles) {
    const auto sc = drifting_quadratic(base(ScenarioKind::DriftingQuadratic, 10, 2, 1e6));
    for (const auto& o : sc.oracles) {
        EXPECT_EQ(o.a(), sc.oracles.front().a());
        EXPECT_EQ(o.b(), sc.oracles.front().b());
    }
}

TEST(DriftingQuadratic, DeclaredConstantsAreHonest) {
    ScenarioConfig cfg = base(ScenarioKind::DriftingQuadratic, 30, 4, 0.5);
    cfg.vary_curvature = true;
    const auto sc = drifting_quadratic(cfg);
    SeededRng rng(1);
    for (const auto& o : sc.oracles) {
        const Vector ev = symmetric_eigenvalues(o.hessian(Vector::Zero(4)));
        EXPECT_GE(ev.minCoeff(), *sc.strong_convexity - 1e-12);
        EXPECT_LE(ev.maxCoeff(), *sc.smoothness + 1e-12);
        EXPECT_LE(o.gradient(sc.set.sample(rng)).norm(), *sc.gradient_bound + 1e-12);
    }
}

TEST(DriftingQuadratic, SharedMatrixGradientVariation) {
    const auto sc = drifting_quadratic(base(ScenarioKind::DriftingQuadratic, 50, 3, 0.5, 9));
    const VariationEstimate v = variation_estimates<QuadraticOracle>(sc.oracles, sc.set, {});
    ASSERT_TRUE(v.exact);
    double expected = 0.0;
    const Matrix& a = sc.oracles.front().a();
    for (std::size_t t = 1; t < sc.minimizers.size(); ++t)
        expected += 4.0 * (a * (sc.minimizers[t] - sc.minimizers[t - 1])).squaredNorm();
    EXPECT_NEAR(v.gradient, expected, 1e-12 * std::max(1.0, expected));
    const double lambda = *sc.strong_convexity;
    EXPECT_GE(v.gradient, lambda * lambda * squared_path_length(sc.minimizers) - 1e-9);
}

TEST(DriftingQuadratic, PathTooLongForSet) {
    ScenarioConfig cfg = base(ScenarioKind::DriftingQuadratic, 4, 2, 0.0);
    cfg.set.kind = SetSpec::Kind::Ball;
    cfg.set.radius = 1.0;
    try {
        drifting_quadratic(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PathEscapesSet);
    }
}

TEST(DriftingQuadratic, SameSeedSameParameters) {
    const auto a = drifting_quadratic(base(ScenarioKind::DriftingQuadratic, 20, 3, 0.5, 77));
    const auto b = drifting_quadratic(base(ScenarioKind::DriftingQuadratic, 20, 3, 0.5, 77));
    for (std::size_t t = 0; t < a.oracles.size(); ++t) {
        EXPECT_EQ(a.oracles[t].a(), b.oracles[t].a());
        EXPECT_EQ(a.oracles[t].b(), b.oracles[t].b());
    }
}

TEST(LowerBoundAdversary, MinimizersAndConstants) {
    const auto sc = lowerbound_adversary(base(ScenarioKind::LowerBoundAdversary, 50, 3, 0.1));
    EXPECT_EQ(*sc.strong_convexity, 4.0);
    EXPECT_EQ(*sc.smoothness, 4.0);
    ASSERT_TRUE(sc.gradient_bound.has_value());
    for (std::size_t t = 0; t < sc.oracles.size(); ++t) EXPECT_LE(sc.oracles[t].gradient(sc.minimizers[t]).norm(), 1e-14);
    const auto zero = lowerbound_adversary(base(ScenarioKind::LowerBoundAdversary, 20, 3, 0.0));
    EXPECT_EQ(path_length(zero.minimizers), 0.0);
    for (const Vector& m : zero.minimizers) EXPECT_EQ(m.norm(), 0.0);
}

TEST(LowerBoundAdversary, ExpectedSquaredPath) {
    const int T = 200, d = 3;
    const double tau = 0.1;
    double mean = 0.0;
    for (std::uint64_t s = 1; s <= 200; ++s)
        mean += squared_path_length(lowerbound_adversary(base(ScenarioKind::LowerBoundAdversary, T, d, tau, s)).minimizers) / 200.0;
    EXPECT_NEAR(mean, 2.0 * d * (T - 1) * tau * tau, 0.05 * 2.0 * d * (T - 1) * tau * tau);
}

TEST(MiniBatchLogistic, IdenticalBatchesHaveNoDrift) {
    ScenarioConfig cfg = base(ScenarioKind::MiniBatchLogistic, 20, 3, 0.5);
    cfg.fixed_batch = true;
    const auto sc = minibatch_logistic(cfg);
    EXPECT_EQ(path_length(sc.minimizers), 0.0);
    EXPECT_EQ(squared_path_length(sc.minimizers), 0.0);
}

TEST(MiniBatchLogistic, StrongRegularizationKeepsMinimizersSmall) {
    ScenarioConfig cfg = base(ScenarioKind::MiniBatchLogistic, 30, 3, 0.5);
    cfg.batch_size = 1;
    cfg.reg = 50.0;
    const auto sc = minibatch_logistic(cfg);
    for (std::size_t t = 0; t < sc.oracles.size(); ++t)
        EXPECT_LE(sc.minimizers[t].norm(), sc.oracles[t].max_feature_norm() / cfg.reg + 1e-12);
}

TEST(MiniBatchLogistic, LargerBatchesDriftLess) {
    std::vector<double> medians;
    for (int m : {4, 32, 256}) {
        std::vector<double> values;
        for (std::uint64_t s = 1; s <= 20; ++s) {
            ScenarioConfig cfg = base(ScenarioKind::MiniBatchLogistic, 15, 3, 0.5, s);
            cfg.batch_size = m;
            cfg.rotation_rate = 0.0;
            values.push_back(squared_path_length(minibatch_logistic(cfg).minimizers));
        }
        std::nth_element(values.begin(), values.begin() + 10, values.end());
        medians.push_back(values[10]);
    }
    EXPECT_GT(medians[0], medians[1]);
    EXPECT_GT(medians[1], medians[2]);
}

TEST(MiniBatchLogistic, MinimizersAreStationaryInsideBall) {
    const auto sc = minibatch_logistic(base(ScenarioKind::MiniBatchLogistic, 10, 4, 0.5));
    for (std::size_t t = 0; t < sc.oracles.size(); ++t) {
        if (sc.set.contains(sc.minimizers[t], -1e-6)) EXPECT_LE(sc.oracles[t].gradient(sc.minimizers[t]).norm(), 1e-9);
    }
}

TEST(SemiStrongDrift, ParallelShiftGivesLinearPath) {
    ScenarioConfig cfg = base(ScenarioKind::SemiStrongDrift, 60, 2, 0.5);
    cfg.rank = 1;
    cfg.drift = 0.02;
    cfg.beta_samples = 2000;
    auto sc = semistrong_drift(cfg);
    const PathMeasure m = semistrong_regularities(std::span<const SemiStrongOracle>(sc.oracles), sc.set, {});
    EXPECT_TRUE(m.exact);
    EXPECT_NEAR(m.total, 59 * 0.02, 1e-9);
}

TEST(SemiStrongDrift, ZeroDriftAndCertifiedBeta) {
    ScenarioConfig cfg = base(ScenarioKind::SemiStrongDrift, 10, 3, 0.5);
    cfg.rank = 2;
    cfg.drift = 0.0;
    const auto sc = semistrong_drift(cfg);
    const PathMeasure m = semistrong_regularities(std::span<const SemiStrongOracle>(sc.oracles), sc.set, {});
    EXPECT_EQ(m.total, 0.0);
    EXPECT_EQ(m.squared_total, 0.0);
    ASSERT_TRUE(sc.semi_strong.has_value());
    EXPECT_GT(*sc.semi_strong, 0.0);
    SeededRng rng(5);
    const auto& o = sc.oracles.front();
    const double f_min = o.value(sc.minimizers.front());
    for (int i = 0; i < 10'000; ++i) {
        const Vector x = sc.set.sample(rng);
        const double dist2 = (x - minimizer_set_project(o, sc.set, x)).squaredNorm();
        EXPECT_GE(o.value(x) - f_min, 0.5 * *sc.semi_strong * dist2 - 1e-12);
    }
}

TEST(SemiStrongDrift, RequiresRankDeficiency) {
    ScenarioConfig cfg = base(ScenarioKind::SemiStrongDrift, 5, 2, 0.5);
    cfg.rank = 2;
    try {
        semistrong_drift(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
}

TEST(SelfConcordantDrift, LocalDriftConditionEveryRound) {
    ScenarioConfig cfg = base(ScenarioKind::SelfConcordantDrift, 80, 3, 1.0);
    cfg.vary_curvature = true;
    const auto sc = selfconcordant_drift(cfg);
    for (std::size_t t = 0; t < sc.oracles.size(); ++t) {
        EXPECT_LE(sc.oracles[t].gradient(sc.minimizers[t]).norm(), 1e-8);
        if (t == 0) continue;
        const Vector h = sc.minimizers[t - 1] - sc.minimizers[t];
        EXPECT_LE(h.dot(sc.oracles[t].hessian(sc.minimizers[t]) * h), 1.0 / 144.0);
    }
    ASSERT_TRUE(sc.mu.has_value());
    EXPECT_GE(*sc.mu, 1.0 - 1e-12);
}

TEST(SelfConcordantDrift, ZeroDriftHasZeroLocalPath) {
    const auto sc = selfconcordant_drift(base(ScenarioKind::SelfConcordantDrift, 10, 2, 0.0));
    for (std::size_t t = 1; t < sc.minimizers.size(); ++t)
        EXPECT_NEAR((sc.minimizers[t] - sc.minimizers[t - 1]).norm(), 0.0, 1e-9);
}

TEST(MakeScenario, DispatchesByKind) {
    const AnyScenario any = make_scenario(base(ScenarioKind::LowerBoundAdversary, 5, 2, 0.1));
    EXPECT_TRUE(std::holds_alternative<Scenario<QuadraticOracle>>(any));
    EXPECT_EQ(parse_scenario_kind("selfconcordant_drift"), ScenarioKind::SelfConcordantDrift);
    EXPECT_THROW(parse_scenario_kind("nope"), Error);
}
