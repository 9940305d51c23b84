#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dynregret/dynregret.hpp"

using namespace dynregret;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = detail::fmt(std::round(secs * 1000.0) / 1000.0) + " s";
    if (limit_seconds > 0) {
        timing += " / limit " + detail::fmt(limit_seconds) + " s";
        if (secs >= limit_seconds) {
            out.ok = false;
            out.detail += " [over time limit]";
        }
    }
    if (!out.ok) ++failures;
    std::printf("[%s] %2d %s: %s (%s)\n", out.ok ? "PASS" : "FAIL", id, name.c_str(), out.detail.c_str(), timing.c_str());
    std::fflush(stdout);
}

Outcome from_report(const VerifyReport& rep) {
    std::ostringstream os;
    os << rep.checked << " checks, " << rep.failures << " failures, worst margin " << detail::fmt(rep.worst_margin);
    for (const std::string& c : rep.counterexamples) os << "; " << c;
    return {rep.passed, os.str()};
}

ExperimentConfig config(const std::string& text) { return parse_config(text); }

std::string drifting(int T, double tau, std::uint64_t seed) {
    return "[experiment]\nseed=" + std::to_string(seed) +
           "\n[scenario]\nkind=drifting_quadratic\nd=5\nset=ball\nradius=2\nT=" + std::to_string(T) +
           "\ntau=" + detail::fmt(tau) + "\n[learner]\nvariant=omgd\neta=auto\nK=auto\n";
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main() {
    criterion(1, "projected-step contraction toward the minimizer", 5.0,
              [] { return from_report(verify_contraction(1000)); });

    criterion(2, "projected-step contraction toward the minimizer set", 10.0,
              [] { return from_report(verify_semi_contraction(500)); });

    criterion(3, "damped Newton decrement squaring and local decrement bound", 10.0, [] {
        const VerifyReport a = verify_newton(500);
        const VerifyReport b = verify_decrement_bound(500);
        Outcome oa = from_report(a), ob = from_report(b);
        return Outcome{a.passed && b.passed, "squaring: " + oa.detail + "; local bound: " + ob.detail};
    });

    criterion(4, "multi-gradient regret within both bounds, squared-path bound flat in T", 30.0, [] {
        Outcome out;
        std::ostringstream os;
        for (double tau : {0.3, 0.5, 0.8}) {
            ExperimentConfig cfg = config(drifting(1000, tau, 1));
            const RunResult res = run(cfg);
            const BoundReport& b = res.bounds;
            const bool ok = b.bound_P && b.bound_S && b.regret <= std::min(*b.bound_P, *b.bound_S) + 1e-9;
            out.ok = out.ok && ok;
            os << "tau " << tau << ": regret " << detail::fmt(b.regret) << " <= min(" << detail::fmt(b.bound_P) << ", "
               << detail::fmt(b.bound_S) << "), K " << res.learner.config.inner_iterations << "; ";
        }
        const RunResult small = run(config(drifting(1024, 0.5, 1)));
        const RunResult large = run(config(drifting(4096, 0.5, 1)));
        const double growth = *large.bounds.bound_S / *small.bounds.bound_S - 1.0;
        out.ok = out.ok && growth < 0.10;
        os << "bound_S T=1024 " << detail::fmt(small.bounds.bound_S) << ", T=4096 " << detail::fmt(large.bounds.bound_S)
           << " (growth " << detail::fmt(growth) << ")";
        out.detail = os.str();
        return out;
    });

    criterion(5, "exact path scaling of the drifting minimizer", 0.0, [] {
        ScenarioConfig cfg;
        cfg.kind = ScenarioKind::DriftingQuadratic;
        cfg.T = 100;
        cfg.d = 5;
        cfg.tau = 0.5;
        const auto sc = drifting_quadratic(cfg);
        const auto path = sc.minimizer_path();
        const double p = path_length(path), s = squared_path_length(path);
        const bool ok = std::abs(p - 10.0) <= 1e-9 * 10.0 && std::abs(s - 1.0) <= 1e-9;
        return Outcome{ok, "P* = " + detail::fmt(p) + ", S* = " + detail::fmt(s)};
    });

    criterion(6, "Gaussian adversary expected regret and squared path", 60.0, [] {
        const LowerBoundStats st = lower_bound_stats(50, 200, 3, 0.1);
        const double rel = std::abs(st.mean_squared_path - st.squared_path_expectation) / st.squared_path_expectation;
        const bool ok = st.mean_regret >= st.regret_target && rel <= 0.1;
        // Targets come from 2dT tau^2 and 2d(T-1) tau^2 evaluated at T=200, d=3, tau=0.1.
        return Outcome{ok, "mean regret " + detail::fmt(st.mean_regret) + " >= " + detail::fmt(st.regret_target) +
                               ", mean S* " + detail::fmt(st.mean_squared_path) + " vs " +
                               detail::fmt(st.squared_path_expectation) + " (rel " + detail::fmt(rel) + ")"};
    });

    criterion(7, "semi-strong drift: single-step and multi-step bounds", 0.0, [] {
        const std::string base = "[experiment]\nseed=4\n[scenario]\nkind=semistrong_drift\nT=500\nd=3\nrank=1\ntau=0.5\n";
        const RunResult ogd = run(config(base + "[learner]\nvariant=ogd\neta=auto\n"));
        const RunResult omgd = run(config(base + "[learner]\nvariant=omgd\neta=auto\nK=auto\n"));
        const bool ok_ogd = ogd.bounds.satisfied_P.value_or(false) && !ogd.bounds.bound_S;
        const bool ok_omgd = omgd.bounds.satisfied_P.value_or(false) && omgd.bounds.satisfied_S.value_or(false) &&
                             omgd.learner.config.inner_iterations ==
                                 k_semistrong(omgd.learner.config.eta, *omgd.semi_strong);
        return Outcome{ok_ogd && ok_omgd,
                       "ogd regret " + detail::fmt(ogd.bounds.regret) + " <= " + detail::fmt(ogd.bounds.bound_P) +
                           "; omgd (K " + std::to_string(omgd.learner.config.inner_iterations) + ") regret " +
                           detail::fmt(omgd.bounds.regret) + " <= min(" + detail::fmt(omgd.bounds.bound_P) + ", " +
                           detail::fmt(omgd.bounds.bound_S) + ")"};
    });

    criterion(8, "Newton learner on barrier drift with warm start", 60.0, [] {
        const ExperimentConfig cfg = config("[experiment]\nseed=6\nx1=0.5\n[scenario]\nkind=selfconcordant_drift\nT=300\nd=3\n"
                                            "tau=1\nvary_curvature=true\n[learner]\nvariant=omnu\nK=auto\nwarmstart=true\n");
        const RunResult res = run(cfg);
        bool domain_ok = true;
        for (const RoundRecord& r : res.rounds) domain_ok = domain_ok && r.in_domain;
        // Warm-start certificate checked against the known first minimizer.
        ScenarioConfig sc_cfg = cfg.scenario;
        sc_cfg.seed = cfg.seed;
        const auto sc = selfconcordant_drift(sc_cfg);
        const Vector h = res.rounds[1].x - sc.minimizers[0];
        const double local = h.dot(sc.oracles[0].hessian(sc.minimizers[0]) * h);
        const double mu = std::max(1.0, *sc.mu);
        const bool warm_ok = local <= 1.0 / (144.0 * mu);
        const bool k_ok = res.learner.config.inner_iterations == k_selfconcordant(*sc.mu);
        const bool ok = res.bounds.satisfied_selfconcordant.value_or(false) && domain_ok && warm_ok && k_ok &&
                        res.learner.warmstart->iterations > 0 &&
                        res.bounds.note.empty();
        return Outcome{ok, "regret " + detail::fmt(res.bounds.regret) + " <= " +
                               detail::fmt(res.bounds.bound_selfconcordant) + ", mu " + detail::fmt(*sc.mu) + ", K " +
                               std::to_string(res.learner.config.inner_iterations) + ", warm start " +
                               std::to_string(res.learner.warmstart->iterations) + " steps, local distance " +
                               detail::fmt(local) + (domain_ok ? ", all iterates feasible" : ", infeasible iterate")};
    });

    criterion(9, "gradient variation dominates squared path on shared-matrix quadratics", 0.0, [] {
        Outcome out;
        double worst = -std::numeric_limits<double>::infinity();
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const RunResult res = run(config(drifting(300, 0.4, seed)));
            const double lambda = *res.strong_convexity;
            const double margin = lambda * lambda * res.regularity.S_star - 1e-9 - res.regularity.G_T;
            worst = std::max(worst, margin);
            out.ok = out.ok && res.regularity.variation_exact && margin <= 0.0;
        }
        out.detail = "10 seeds, worst lambda^2 S* - G_T = " + detail::fmt(worst + 1e-9);
        return out;
    });

    criterion(10, "curvature ratio at most L/lambda", 0.0, [] {
        Outcome out;
        std::ostringstream os;
        const std::string cases[] = {
            "[experiment]\nseed=2\n[scenario]\nkind=drifting_quadratic\nT=200\nd=4\ntau=0.5\nvary_curvature=true\n"
            "curvature_min=0.2\ncurvature_max=3\n[learner]\nvariant=omgd\n",
            "[experiment]\nseed=2\n[scenario]\nkind=minibatch_logistic\nT=100\nd=3\nbatch_size=8\n[learner]\nvariant=omgd\n",
            "[experiment]\nseed=2\n[scenario]\nkind=lowerbound_adversary\nT=50\nd=3\ntau=0.1\n[learner]\nvariant=ogd\n"};
        for (const std::string& text : cases) {
            const RunResult res = run(config(text));
            const double cap = *res.smoothness / *res.strong_convexity;
            const bool ok = res.regularity.mu && *res.regularity.mu <= cap + 1e-9;
            out.ok = out.ok && ok;
            os << to_string(res.kind) << ": mu " << detail::fmt(res.regularity.mu) << " <= " << detail::fmt(cap) << "; ";
        }
        out.detail = os.str();
        return out;
    });

    criterion(11, "analytic gradients and Hessians match central differences", 0.0,
              [] { return from_report(verify_gradients(100)); });

    criterion(12, "equal seeds give byte-identical rounds.csv", 0.0, [] {
        Outcome out;
        std::ostringstream os;
        const std::filesystem::path configs = DYNREGRET_SOURCE_DIR "/configs";
        const std::filesystem::path tmp = std::filesystem::temp_directory_path() / "dynregret_acceptance";
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(configs))
            if (entry.path().extension() == ".ini") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const ExperimentConfig cfg = load_config(f.string());
            write_outputs(run(cfg), tmp / "a");
            write_outputs(run(cfg), tmp / "b");
            const bool same = read_file(tmp / "a" / "rounds.csv") == read_file(tmp / "b" / "rounds.csv");
            out.ok = out.ok && same;
            os << f.filename().string() << (same ? " identical; " : " DIFFERS; ");
        }
        std::filesystem::remove_all(tmp);
        out.ok = out.ok && !files.empty();
        out.detail = os.str();
        return out;
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
