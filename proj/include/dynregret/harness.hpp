#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "dynregret/config.hpp"
#include "dynregret/errors.hpp"
#include "dynregret/learners.hpp"
#include "dynregret/minimize.hpp"
#include "dynregret/regularity.hpp"
#include "dynregret/scenarios.hpp"

namespace dynregret {

struct RoundRecord {
    int t = 0;
    Vector x;
    double f_xt = 0.0;
    double f_min = 0.0;
    double gap = 0.0;
    double cum_regret = 0.0;
    double p_inc = 0.0;
    double s_inc = 0.0;
    double p_cum = 0.0;
    double s_cum = 0.0;
    int inner_iters = 0;
    /// OGD/OMGD: ‖x_{t+1} − x_t*‖ / ‖x_t − x_t*‖ (0 when x_t = x_t*). OMNU: λ_t(x_{t+1}).
    double inner_final_metric = 0.0;
    bool in_domain = true;
};

struct ResolvedLearner {
    LearnerConfig config;
    bool eta_auto = false;
    bool inner_auto = false;
    std::optional<WarmStart> warmstart;
    std::vector<std::string> notes;
};

struct RunResult {
    ExperimentConfig config;
    ScenarioKind kind{};
    FunctionClass function_class{};
    std::string set_description;
    int dim = 0;
    std::vector<RoundRecord> rounds;
    ResolvedLearner learner;
    RegularityReport regularity;
    BoundReport bounds;
    std::optional<double> strong_convexity, smoothness, semi_strong, gradient_bound;
    std::vector<std::string> notes;
    double wall_clock_seconds = 0.0;
};

/// Hands out f_t only after x_t has been committed, one round at a time.
template <typename O>
class RevealingSequence {
public:
    explicit RevealingSequence(const std::vector<O>& oracles) : oracles_(oracles) {}

    const O& commit(const Vector& x) {
        require(next_ < oracles_.size(), ErrorKind::InvalidArgument, "no rounds left to reveal");
        committed_.push_back(x);
        return oracles_[next_++];
    }

    const std::vector<Vector>& committed() const { return committed_; }

private:
    const std::vector<O>& oracles_;
    std::size_t next_ = 0;
    std::vector<Vector> committed_;
};

namespace detail {

inline Error at_round(const Error& e, int t) {
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(e.kind())) + ": ";
    if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
    return Error(e.kind(), "round " + std::to_string(t) + ": " + msg);
}

inline Vector parse_point(const std::string& text, int d) {
    std::vector<double> coords;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) coords.push_back(parse_double("experiment.x1", item));
    if (coords.size() == 1 && d > 1) coords.assign(static_cast<std::size_t>(d), coords[0]);
    require(static_cast<int>(coords.size()) == d, ErrorKind::ConfigError,
            "experiment.x1 has " + std::to_string(coords.size()) + " coordinates, expected " + std::to_string(d));
    return Eigen::Map<const Vector>(coords.data(), d);
}

template <typename O>
Vector initial_point(const ExperimentConfig& cfg, const Scenario<O>& sc) {
    const int d = sc.oracles.front().dim();
    const std::string mode = lower(trim(cfg.x1));
    if (mode == "center") return sc.set.center();
    if (mode == "minimizer") return sc.minimizers.front();
    return parse_point(cfg.x1, d);
}

template <typename O>
ResolvedLearner resolve_learner(const ExperimentConfig& cfg, const Scenario<O>& sc) {
    ResolvedLearner r;
    r.config.variant = cfg.variant;
    r.config.warmstart_threshold = cfg.warmstart_threshold;
    const bool newton = cfg.variant == LearnerVariant::OMNU;

    if (cfg.eta) {
        r.config.eta = *cfg.eta;
    } else if (newton) {
        r.config.eta = 1.0;
        r.notes.push_back("eta unused by the Newton learner");
    } else {
        if (!sc.smoothness) throw Error(ErrorKind::MissingConstant, "eta = auto needs a declared L");
        r.config.eta = 1.0 / *sc.smoothness;
        r.eta_auto = true;
    }

    if (cfg.variant == LearnerVariant::OGD) {
        r.config.inner_iterations = 1;
        if (cfg.inner && *cfg.inner != 1) r.notes.push_back("K ignored: OGD takes one step per round");
    } else if (cfg.inner) {
        r.config.inner_iterations = *cfg.inner;
    } else {
        r.inner_auto = true;
        switch (sc.function_class) {
        case FunctionClass::StronglyConvex:
            if (newton) {
                r.config.inner_iterations = k_selfconcordant(sc.mu.value_or(1.0));
            } else {
                if (!sc.strong_convexity) throw Error(ErrorKind::MissingConstant, "K = auto needs a declared lambda");
                r.config.inner_iterations = k_strongly(r.config.eta, *sc.strong_convexity);
            }
            break;
        case FunctionClass::SemiStronglyConvex:
            if (!sc.semi_strong) throw Error(ErrorKind::MissingConstant, "K = auto needs a certified beta");
            r.config.inner_iterations = k_semistrong(r.config.eta, *sc.semi_strong);
            break;
        case FunctionClass::SelfConcordant: {
            const double mu = sc.mu.value_or(1.0);
            if (mu < 1.0) r.notes.push_back("computed mu < 1 clamped to 1 for K");
            r.config.inner_iterations = k_selfconcordant(mu);
            break;
        }
        }
    }
    return r;
}

/// Probe points for sampled sup-norm variations: set samples (or a box
/// around the minimizers on unbounded sets), plus minimizers and iterates.
template <typename O>
std::vector<Vector> probe_points(const ExperimentConfig& cfg, const Scenario<O>& sc,
                                 const std::vector<Vector>& iterates) {
    SeededRng rng = SeededRng(cfg.seed).fork(0x9E0B);
    std::vector<Vector> probes;
    const int d = sc.oracles.front().dim();
    if (sc.set.bounded()) {
        for (int i = 0; i < cfg.probes; ++i) probes.push_back(sc.set.sample(rng));
    } else {
        Vector lo = sc.minimizers.front(), hi = sc.minimizers.front();
        for (const Vector& m : sc.minimizers) {
            lo = lo.cwiseMin(m);
            hi = hi.cwiseMax(m);
        }
        const double pad = sc.kind == ScenarioKind::SelfConcordantDrift ? 0.0 : 1.0;
        const FeasibleSet box = FeasibleSet::box(lo.array() - pad, hi.array() + pad);
        for (int i = 0; i < cfg.probes; ++i) probes.push_back(box.sample(rng));
        (void)d;
    }
    probes.insert(probes.end(), sc.minimizers.begin(), sc.minimizers.end());
    probes.insert(probes.end(), iterates.begin(), iterates.end());
    if constexpr (requires(const O& o, const Vector& x) { o.in_domain(x); }) {
        std::vector<Vector> kept;
        for (Vector& p : probes) {
            bool ok = true;
            for (const O& o : sc.oracles)
                if (!o.in_domain(p)) {
                    ok = false;
                    break;
                }
            if (ok) kept.push_back(std::move(p));
        }
        probes = std::move(kept);
    }
    return probes;
}

template <typename O>
RunResult run_scenario(const ExperimentConfig& cfg, Scenario<O>& sc) {
    require(!sc.oracles.empty(), ErrorKind::InvalidArgument, "scenario has no rounds");
    RunResult res;
    res.config = cfg;
    res.kind = sc.kind;
    res.function_class = sc.function_class;
    res.set_description = sc.set.describe();
    res.dim = sc.oracles.front().dim();
    res.strong_convexity = sc.strong_convexity;
    res.smoothness = sc.smoothness;
    res.semi_strong = sc.semi_strong;
    res.gradient_bound = sc.gradient_bound;
    res.notes = sc.notes;
    res.learner = resolve_learner(cfg, sc);

    const bool newton = cfg.variant == LearnerVariant::OMNU;
    if (newton && !sc.set.is_whole_space())
        throw Error(ErrorKind::ConfigError, "the Newton learner runs unconstrained; use set = whole");

    const int T = sc.rounds();
    const Vector x1 = initial_point(cfg, sc);
    require(x1.size() == res.dim, ErrorKind::ConfigError, "x1 dimension mismatch");
    LearnerState state(res.learner.config, newton ? x1 : sc.set.project(x1));

    // Regularity increments matching the function class.
    const std::vector<Vector> path(sc.minimizers.begin(), sc.minimizers.end());
    PathMeasure euclid = path_measure(path);
    PathMeasure matched = euclid;
    std::vector<Matrix> hessians;
    if constexpr (HessianOracle<O>) {
        if (sc.function_class != FunctionClass::SemiStronglyConvex) {
            for (int t = 0; t < T; ++t) hessians.push_back(sc.oracles[t].hessian(sc.minimizers[t]));
        }
    }
    if (sc.function_class == FunctionClass::SelfConcordant) {
        matched = hessian_regularities(path, hessians);
    }
    if constexpr (std::is_same_v<O, SemiStrongOracle>) {
        SeededRng rng = SeededRng(cfg.seed).fork(0x5E31);
        std::vector<Vector> probes;
        for (int i = 0; i < cfg.probes; ++i) probes.push_back(sc.set.bounded() ? sc.set.sample(rng) : gaussian_sample(rng, res.dim));
        matched = semistrong_regularities(std::span<const SemiStrongOracle>(sc.oracles), sc.set, probes);
    }

    RevealingSequence<O> feed(sc.oracles);
    std::vector<double> losses, minima;
    double cum = 0.0;
    for (int t = 1; t <= T; ++t) {
        RoundRecord rec;
        rec.t = t;
        rec.x = state.x;
        const O& f = feed.commit(state.x);
        const Vector& x_star = sc.minimizers[t - 1];
        try {
            if constexpr (requires(const O& o, const Vector& x) { o.in_domain(x); }) {
                rec.in_domain = f.in_domain(rec.x);
                if (!rec.in_domain)
                    throw Error(ErrorKind::DomainViolation, "iterate outside the barrier domain");
            }
            rec.f_xt = f.value(rec.x);
            rec.f_min = f.value(x_star);
            double gap = rec.f_xt - rec.f_min;
            if (gap < -kNegativeGapTolerance)
                throw Error(ErrorKind::NegativeGap, "gap " + std::to_string(gap));
            rec.gap = std::max(gap, 0.0);

            const double before = (rec.x - x_star).norm();
            switch (state.config.variant) {
            case LearnerVariant::OGD: ogd_round(state, f, sc.set); break;
            case LearnerVariant::OMGD: omgd_round(state, f, sc.set); break;
            case LearnerVariant::OMNU:
                if constexpr (HessianOracle<O>) {
                    if (t == 1 && cfg.warmstart) {
                        const double mu = sc.mu.value_or(hessians.size() >= 2 ? curvature_ratio(hessians) : 1.0);
                        WarmStart ws = omnu_warmstart(f, state.x, mu, cfg.warmstart_threshold);
                        state.x = ws.point;
                        state.inner_trace.assign(static_cast<std::size_t>(ws.iterations), 0.0);
                        state.inner_trace.push_back(ws.final_decrement);
                        ++state.round;
                        res.learner.warmstart = ws;
                    } else {
                        omnu_round(state, f);
                    }
                } else {
                    throw Error(ErrorKind::ConfigError, "the Newton learner needs Hessians");
                }
                break;
            }
            if (newton) {
                rec.inner_iters = static_cast<int>(state.inner_trace.size()) - 1;
                rec.inner_final_metric = state.inner_trace.back();
            } else {
                rec.inner_iters = static_cast<int>(state.inner_trace.size());
                rec.inner_final_metric = before > 0 ? (state.x - x_star).norm() / before : 0.0;
            }
        } catch (const Error& e) {
            throw at_round(e, t);
        }
        cum += rec.gap;
        rec.cum_regret = cum;
        rec.p_inc = matched.increments[t - 1];
        rec.s_inc = matched.squared_increments[t - 1];
        rec.p_cum = (t > 1 ? res.rounds.back().p_cum : 0.0) + rec.p_inc;
        rec.s_cum = (t > 1 ? res.rounds.back().s_cum : 0.0) + rec.s_inc;
        res.rounds.push_back(std::move(rec));
    }

    // Regularities.
    RegularityReport& reg = res.regularity;
    reg.P_star = euclid.total;
    reg.S_star = euclid.squared_total;
    reg.p_increments = matched.increments;
    reg.s_increments = matched.squared_increments;
    if (sc.function_class == FunctionClass::SemiStronglyConvex) {
        reg.P_semi = matched.total;
        reg.S_semi = matched.squared_total;
        reg.semi_exact = matched.exact;
    }
    if (sc.function_class == FunctionClass::SelfConcordant) {
        reg.P_hess = matched.total;
        reg.S_hess = matched.squared_total;
    } else if (!hessians.empty()) {
        try {
            PathMeasure hm = hessian_regularities(path, hessians);
            reg.P_hess = hm.total;
            reg.S_hess = hm.squared_total;
        } catch (const Error&) {
        }
    }
    if (hessians.size() >= 2) {
        try {
            reg.mu = curvature_ratio(hessians);
        } catch (const Error&) {
        }
    } else if (hessians.size() == 1) {
        reg.mu = 1.0;
    }
    std::vector<Vector> iterates = feed.committed();
    iterates.push_back(state.x);
    const std::vector<Vector> probes = probe_points(cfg, sc, iterates);
    VariationEstimate var = variation_estimates(std::span<const O>(sc.oracles), sc.set, probes);
    reg.F_T = var.functional;
    reg.G_T = var.gradient;
    reg.variation_exact = var.exact;
    reg.G_const = sc.gradient_bound;

    // Bounds.
    BoundInputs in;
    in.function_class = sc.function_class;
    in.learner = state.config;
    in.gradient_bound = sc.gradient_bound;
    in.strong_convexity = sc.strong_convexity;
    in.smoothness = sc.smoothness;
    in.semi_strong = sc.semi_strong;
    in.path = matched.total;
    in.squared_path = matched.squared_total;
    in.regret = cum;
    const Vector& first = res.rounds.front().x;
    if constexpr (std::is_same_v<O, SemiStrongOracle>) {
        in.initial_distance = (first - minimizer_set_project(sc.oracles.front(), sc.set, first)).norm();
    } else {
        in.initial_distance = (first - sc.minimizers.front()).norm();
    }
    for (int t = 0; t < T; ++t) in.minimizer_gradient_energy += sc.oracles[t].gradient(sc.minimizers[t]).squaredNorm();
    in.initial_gap = res.rounds.front().gap;
    try {
        res.bounds = regret_bounds(in);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::MissingConstant) throw;
        res.bounds.regret = cum;
        res.bounds.note = e.what();
    }
    if (sc.function_class == FunctionClass::SelfConcordant && newton) {
        const int k_needed = k_selfconcordant(sc.mu.value_or(1.0));
        if (state.config.inner_iterations < k_needed || !cfg.warmstart) {
            res.bounds.note = "K below the prescribed count or no warm start: bound reported but not certified";
        }
    }
    return res;
}

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("none"); }

inline std::string fmt(const std::optional<bool>& v) {
    return v ? (*v ? std::string("true") : std::string("false")) : std::string("none");
}

} // namespace detail

/// Runs the configured experiment: generates the scenario from the seed,
/// plays T rounds under the commit-then-reveal protocol and evaluates all
/// regularities and applicable bounds.
inline RunResult run(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioConfig sc_cfg = cfg.scenario;
    sc_cfg.seed = cfg.seed;
    AnyScenario any = make_scenario(sc_cfg);
    RunResult res = std::visit([&](auto& sc) { return detail::run_scenario(cfg, sc); }, any);
    res.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

inline std::string rounds_csv(const RunResult& res) {
    std::ostringstream os;
    os << "t,gap,cum_regret,p_inc,s_inc,p_cum,s_cum,inner_iters,inner_final_metric,f_xt,f_min";
    for (int i = 1; i <= res.dim; ++i) os << ",x_" << i;
    os << '\n';
    for (const RoundRecord& r : res.rounds) {
        using detail::fmt;
        os << r.t << ',' << fmt(r.gap) << ',' << fmt(r.cum_regret) << ',' << fmt(r.p_inc) << ',' << fmt(r.s_inc) << ','
           << fmt(r.p_cum) << ',' << fmt(r.s_cum) << ',' << r.inner_iters << ',' << fmt(r.inner_final_metric) << ','
           << fmt(r.f_xt) << ',' << fmt(r.f_min);
        for (Eigen::Index i = 0; i < r.x.size(); ++i) os << ',' << fmt(r.x[i]);
        os << '\n';
    }
    return os.str();
}

inline std::string summary_text(const RunResult& res) {
    using detail::fmt;
    std::ostringstream os;
    auto kv = [&](int indent, const std::string& key, const std::string& value) {
        os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << key << ": " << value << '\n';
    };
    kv(0, "seed", std::to_string(res.config.seed));
    kv(0, "wall_clock_seconds", fmt(res.wall_clock_seconds));
    os << "config:\n";
    std::istringstream src(res.config.source_text);
    for (std::string line; std::getline(src, line);) os << "  | " << line << '\n';
    if (!res.config.overrides.empty()) {
        os << "overrides:\n";
        for (const auto& [k, v] : res.config.overrides) kv(1, k, v);
    }
    os << "scenario:\n";
    kv(1, "kind", std::string(to_string(res.kind)));
    kv(1, "function_class", std::string(to_string(res.function_class)));
    kv(1, "set", res.set_description);
    kv(1, "T", std::to_string(res.rounds.size()));
    kv(1, "d", std::to_string(res.dim));
    kv(1, "lambda", fmt(res.strong_convexity));
    kv(1, "L", fmt(res.smoothness));
    kv(1, "beta", fmt(res.semi_strong));
    kv(1, "G", fmt(res.gradient_bound));
    for (const std::string& n : res.notes) kv(1, "note", n);
    os << "learner:\n";
    kv(1, "variant", std::string(to_string(res.learner.config.variant)));
    kv(1, "eta", fmt(res.learner.config.eta) + (res.learner.eta_auto ? " (auto)" : ""));
    kv(1, "K", std::to_string(res.learner.config.inner_iterations) + (res.learner.inner_auto ? " (auto)" : ""));
    if (res.learner.warmstart) {
        os << "  warmstart:\n";
        kv(2, "iterations", std::to_string(res.learner.warmstart->iterations));
        kv(2, "final_decrement", fmt(res.learner.warmstart->final_decrement));
        kv(2, "threshold", fmt(res.learner.warmstart->threshold));
    }
    for (const std::string& n : res.learner.notes) kv(1, "note", n);
    const RegularityReport& r = res.regularity;
    os << "regularity:\n";
    kv(1, "P_star", fmt(r.P_star));
    kv(1, "S_star", fmt(r.S_star));
    kv(1, "P_semi", fmt(r.P_semi));
    kv(1, "S_semi", fmt(r.S_semi));
    if (r.P_semi) kv(1, "semi_exact", r.semi_exact ? "true" : "false");
    kv(1, "P_hess", fmt(r.P_hess));
    kv(1, "S_hess", fmt(r.S_hess));
    kv(1, "F_T", fmt(r.F_T));
    kv(1, "G_T", fmt(r.G_T));
    kv(1, "variation_exact", r.variation_exact ? "true" : "false");
    kv(1, "mu", fmt(r.mu));
    const BoundReport& b = res.bounds;
    os << "bounds:\n";
    kv(1, "regret", fmt(b.regret));
    kv(1, "gamma", fmt(b.gamma));
    kv(1, "alpha_star", fmt(b.alpha_star));
    if (b.bound_P) {
        os << "  bound_P:\n";
        kv(2, "value", fmt(b.bound_P));
        kv(2, "source", b.bound_P_source);
        kv(2, "satisfied", fmt(b.satisfied_P));
    }
    if (b.bound_S) {
        os << "  bound_S:\n";
        kv(2, "value", fmt(b.bound_S));
        kv(2, "source", b.bound_S_source);
        kv(2, "satisfied", fmt(b.satisfied_S));
    }
    if (b.bound_selfconcordant) {
        os << "  bound_selfconcordant:\n";
        kv(2, "value", fmt(b.bound_selfconcordant));
        kv(2, "satisfied", fmt(b.satisfied_selfconcordant));
    }
    if (!b.note.empty()) kv(1, "note", b.note);
    kv(1, "all_satisfied", b.all_satisfied() ? "true" : "false");
    return os.str();
}

inline void write_outputs(const RunResult& res, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir / "rounds.csv", std::ios::binary) << rounds_csv(res);
    std::ofstream(out_dir / "summary.txt", std::ios::binary) << summary_text(res);
}

} // namespace dynregret
