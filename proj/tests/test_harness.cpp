#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dynregret/dynregret.hpp"

using namespace dynregret;

namespace {

const char* kDrifting = R"(
[experiment]
seed = 7

[scenario]
kind = drifting_quadratic
T = 200
d = 3
tau = 0.5
set = ball
radius = 2

[learner]
variant = omgd
eta = auto
K = auto
)";

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

} // namespace

TEST(Config, ParsesSectionsAndAutoValues) {
    const ExperimentConfig cfg = parse_config(kDrifting);
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.scenario.kind, ScenarioKind::DriftingQuadratic);
    EXPECT_EQ(cfg.scenario.T, 200);
    EXPECT_EQ(cfg.scenario.set.kind, SetSpec::Kind::Ball);
    EXPECT_FALSE(cfg.eta.has_value());
    EXPECT_FALSE(cfg.inner.has_value());
    EXPECT_EQ(cfg.variant, LearnerVariant::OMGD);
}

TEST(Config, RejectsBadInput) {
    auto kind_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    EXPECT_EQ(kind_of("[scenario]\nkind=drifting_quadratic\n"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of("[experiment]\nseed=1\n[scenario]\nkind=unknown\n"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of("[experiment]\nseed=1\ncolour=blue\n"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of("[experiment]\nseed=1\n[scenario]\nT=ten\n"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of("[experiment]\nseed=1\n[learner]\neta=-1\n"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of("[experiment\nseed=1\n"), ErrorKind::ConfigError);
}

TEST(Config, OverridesAndSeedEnvironment) {
    ExperimentConfig cfg = parse_config(kDrifting);
    apply_override(cfg, "scenario.T", "50");
    EXPECT_EQ(cfg.scenario.T, 50);
    ASSERT_EQ(cfg.overrides.size(), 1u);
    EXPECT_THROW(apply_override(cfg, "scenario", "1"), Error);
    ::setenv("DYNREGRET_SEED", "99", 1);
    apply_seed_env(cfg);
    ::unsetenv("DYNREGRET_SEED");
    EXPECT_EQ(cfg.seed, 99u);
}

TEST(Run, CsvSchemaAndPrefixSums) {
    const RunResult res = run(parse_config(kDrifting));
    const auto lines = split_lines(rounds_csv(res));
    ASSERT_EQ(lines.size(), 201u);
    EXPECT_EQ(lines[0], "t,gap,cum_regret,p_inc,s_inc,p_cum,s_cum,inner_iters,inner_final_metric,f_xt,f_min,x_1,x_2,x_3");
    double cum = 0.0, p = 0.0, s = 0.0;
    for (const RoundRecord& r : res.rounds) {
        EXPECT_GE(r.gap, -1e-12);
        cum += r.gap;
        p += r.p_inc;
        s += r.s_inc;
        EXPECT_DOUBLE_EQ(r.cum_regret, cum);
        EXPECT_DOUBLE_EQ(r.p_cum, p);
        EXPECT_DOUBLE_EQ(r.s_cum, s);
    }
    EXPECT_NEAR(res.rounds.back().p_cum, res.regularity.P_star, 1e-12);
}

TEST(Run, RegretMatchesIndependentRecomputation) {
    const ExperimentConfig cfg = parse_config(kDrifting);
    const RunResult res = run(cfg);
    ScenarioConfig sc_cfg = cfg.scenario;
    sc_cfg.seed = cfg.seed;
    const auto sc = drifting_quadratic(sc_cfg);
    double regret = 0.0;
    for (std::size_t t = 0; t < res.rounds.size(); ++t)
        regret += sc.oracles[t].value(res.rounds[t].x) - sc.oracles[t].value(sc.minimizers[t]);
    EXPECT_NEAR(res.bounds.regret, regret, 1e-12 * std::max(1.0, regret));
}

TEST(Run, AutoInnerCountAndBoundsOnDriftingQuadratic) {
    const RunResult res = run(parse_config(kDrifting));
    EXPECT_TRUE(res.learner.eta_auto);
    EXPECT_TRUE(res.learner.inner_auto);
    EXPECT_NEAR(res.learner.config.eta, 1.0 / *res.smoothness, 1e-15);
    EXPECT_EQ(res.learner.config.inner_iterations, k_strongly(res.learner.config.eta, *res.strong_convexity));
    ASSERT_TRUE(res.bounds.bound_P && res.bounds.bound_S);
    EXPECT_TRUE(res.bounds.all_satisfied());
    EXPECT_LE(res.bounds.regret, *res.bounds.bound_S + 1e-9);
}

TEST(Run, ZeroDriftStartingAtMinimizerHasNoRegret) {
    ExperimentConfig cfg = parse_config(kDrifting);
    apply_override(cfg, "scenario.tau", "1e6");
    apply_override(cfg, "experiment.x1", "minimizer");
    const RunResult res = run(cfg);
    EXPECT_EQ(res.bounds.regret, 0.0);
    EXPECT_TRUE(res.bounds.all_satisfied());
    for (const auto& b : {res.bounds.bound_P, res.bounds.bound_S}) EXPECT_GE(*b, 0.0);
}

TEST(Run, DeterministicOutputBytes) {
    const ExperimentConfig cfg = parse_config(kDrifting);
    EXPECT_EQ(rounds_csv(run(cfg)), rounds_csv(run(cfg)));
    ExperimentConfig other = cfg;
    apply_override(other, "experiment.seed", "8");
    EXPECT_NE(rounds_csv(run(cfg)), rounds_csv(run(other)));
}

TEST(Run, SummaryEchoesConfigAndFlags) {
    const RunResult res = run(parse_config(kDrifting));
    const std::string text = summary_text(res);
    EXPECT_NE(text.find("seed: 7"), std::string::npos);
    EXPECT_NE(text.find("  | kind = drifting_quadratic"), std::string::npos);
    EXPECT_NE(text.find("satisfied: true"), std::string::npos);
    EXPECT_NE(text.find("K: " + std::to_string(res.learner.config.inner_iterations) + " (auto)"), std::string::npos);
}

TEST(Run, WritesOutputFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "dynregret_harness_test";
    std::filesystem::remove_all(dir);
    write_outputs(run(parse_config(kDrifting)), dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "rounds.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "summary.txt"));
    std::filesystem::remove_all(dir);
}

TEST(Run, NewtonLearnerOnBarrierDrift) {
    const RunResult res = run(parse_config(
        "[experiment]\nseed=3\n[scenario]\nkind=selfconcordant_drift\nT=60\nd=2\ntau=1\n[learner]\nvariant=omnu\nK=auto\n"));
    ASSERT_TRUE(res.learner.warmstart.has_value());
    ASSERT_TRUE(res.bounds.bound_selfconcordant.has_value());
    EXPECT_TRUE(res.bounds.all_satisfied());
    for (const RoundRecord& r : res.rounds) EXPECT_TRUE(r.in_domain);
}

TEST(Run, NewtonLearnerRejectsConstrainedSets) {
    try {
        run(parse_config("[experiment]\nseed=3\n[scenario]\nkind=drifting_quadratic\nT=5\n[learner]\nvariant=omnu\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
}

TEST(Run, LogisticAndSemiStrongScenariosRun) {
    const RunResult lg = run(parse_config(
        "[experiment]\nseed=2\n[scenario]\nkind=minibatch_logistic\nT=40\nd=3\n[learner]\nvariant=omgd\n"));
    EXPECT_TRUE(lg.bounds.all_satisfied());
    const RunResult ss = run(parse_config(
        "[experiment]\nseed=2\n[scenario]\nkind=semistrong_drift\nT=40\nd=3\nrank=1\nbeta_samples=1000\n"
        "[learner]\nvariant=ogd\n"));
    ASSERT_TRUE(ss.regularity.P_semi.has_value());
    EXPECT_TRUE(ss.bounds.all_satisfied());
}

TEST(RevealingSequence, RevealsOnlyAfterCommit) {
    const std::vector<QuadraticOracle> oracles(2, QuadraticOracle(Matrix::Identity(1, 1), Vector::Zero(1), 0.0));
    RevealingSequence<QuadraticOracle> feed(oracles);
    EXPECT_TRUE(feed.committed().empty());
    feed.commit(Vector::Ones(1));
    EXPECT_EQ(feed.committed().size(), 1u);
    feed.commit(Vector::Ones(1));
    EXPECT_THROW(feed.commit(Vector::Ones(1)), Error);
}

TEST(Sweep, GridCellsAndErrors) {
    const ExperimentConfig cfg = parse_config(kDrifting);
    std::vector<SweepAxis> axes{parse_sweep_axis("learner.K=1,2"), parse_sweep_axis("scenario.T=20,40")};
    const auto cells = sweep(cfg, axes);
    ASSERT_EQ(cells.size(), 4u);
    for (const auto& c : cells) EXPECT_TRUE(c.result.has_value());
    const auto lines = split_lines(sweep_csv(axes, cells));
    EXPECT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[1].substr(0, 5), "1,20,");

    const std::vector<SweepAxis> bad{parse_sweep_axis("scenario.T=0,10")};
    const auto mixed = sweep(cfg, bad);
    ASSERT_EQ(mixed.size(), 2u);
    EXPECT_FALSE(mixed[0].result.has_value());
    EXPECT_EQ(mixed[0].error_kind, "ConfigError");
    EXPECT_TRUE(mixed[1].result.has_value());
}

TEST(Sweep, EmptyGridGivesEmptyTable) {
    const ExperimentConfig cfg = parse_config(kDrifting);
    const std::vector<SweepAxis> axes{parse_sweep_axis("learner.K=")};
    const auto cells = sweep(cfg, axes);
    EXPECT_TRUE(cells.empty());
    EXPECT_EQ(split_lines(sweep_csv(axes, cells)).size(), 1u);
}

TEST(Verify, UnknownSuiteIsConfigError) {
    try {
        verify("nope");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
    const VerifyReport r = verify("gradients", 10);
    EXPECT_TRUE(r.passed) << format_report(r);
}
