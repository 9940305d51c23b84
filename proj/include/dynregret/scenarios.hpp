#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dynregret/errors.hpp"
#include "dynregret/feasible_set.hpp"
#include "dynregret/linalg.hpp"
#include "dynregret/minimize.hpp"
#include "dynregret/newton.hpp"
#include "dynregret/oracles.hpp"
#include "dynregret/regularity.hpp"
#include "dynregret/rng.hpp"

namespace dynregret {

enum class ScenarioKind { DriftingQuadratic, LowerBoundAdversary, MiniBatchLogistic, SemiStrongDrift, SelfConcordantDrift };

constexpr std::string_view to_string(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::DriftingQuadratic: return "drifting_quadratic";
    case ScenarioKind::LowerBoundAdversary: return "lowerbound_adversary";
    case ScenarioKind::MiniBatchLogistic: return "minibatch_logistic";
    case ScenarioKind::SemiStrongDrift: return "semistrong_drift";
    case ScenarioKind::SelfConcordantDrift: return "selfconcordant_drift";
    }
    return "unknown";
}

inline ScenarioKind parse_scenario_kind(std::string_view s) {
    for (ScenarioKind k : {ScenarioKind::DriftingQuadratic, ScenarioKind::LowerBoundAdversary,
                           ScenarioKind::MiniBatchLogistic, ScenarioKind::SemiStrongDrift,
                           ScenarioKind::SelfConcordantDrift})
        if (to_string(k) == s) return k;
    throw Error(ErrorKind::ConfigError, "unknown scenario kind '" + std::string(s) + "'");
}

struct SetSpec {
    enum class Kind { Default, WholeSpace, Ball, Box } kind = Kind::Default;
    double radius = 1.0;
    double center = 0.0;
    double lower = -1.0;
    double upper = 1.0;

    FeasibleSet make(int d) const {
        switch (kind) {
        case Kind::WholeSpace: return FeasibleSet::whole_space(d);
        case Kind::Ball: return FeasibleSet::ball(Vector::Constant(d, center), radius);
        case Kind::Box: return FeasibleSet::box(Vector::Constant(d, lower), Vector::Constant(d, upper));
        case Kind::Default: break;
        }
        throw Error(ErrorKind::ConfigError, "set kind must be resolved before use");
    }
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::DriftingQuadratic;
    int T = 100;
    int d = 2;
    /// Drift exponent (step T^{−τ}) for drifting_quadratic and semistrong_drift,
    /// minimizer scale for lowerbound_adversary, fraction of the per-round
    /// local-norm allowance for selfconcordant_drift.
    double tau = 0.5;
    std::uint64_t seed = 1;
    SetSpec set;

    /// Explicit per-round drift step; overrides T^{−τ} when set.
    std::optional<double> drift;
    double curvature_min = 0.5;
    double curvature_max = 2.0;
    bool vary_curvature = false;
    int batch_size = 16;
    double reg = 0.1;
    double rotation_rate = 0.01;
    double label_noise = 0.05;
    double feature_scale = 1.0;
    bool fixed_batch = false;
    int rank = 1;
    int beta_samples = 10'000;
    /// Radius of the ball G is evaluated over for unconstrained scenarios (0 = auto).
    double bounding_radius = 0.0;
    double barrier_quadratic = 0.5;
};

template <typename O>
struct Scenario {
    ScenarioKind kind{};
    FunctionClass function_class{};
    FeasibleSet set = FeasibleSet::whole_space(1);
    std::vector<O> oracles;
    /// x_t* per round (for semi-strong: the projection of the set center onto X_t*).
    std::vector<Vector> minimizers;
    /// Comparator position before round 1, when the generator defines one.
    std::optional<Vector> anchor;
    std::optional<double> strong_convexity;
    std::optional<double> smoothness;
    std::optional<double> semi_strong;
    std::optional<double> gradient_bound;
    std::optional<double> mu;
    std::vector<std::string> notes;

    int rounds() const { return static_cast<int>(oracles.size()); }

    /// Anchor followed by the per-round minimizers.
    std::vector<Vector> minimizer_path() const {
        std::vector<Vector> path;
        if (anchor) path.push_back(*anchor);
        path.insert(path.end(), minimizers.begin(), minimizers.end());
        return path;
    }
};

namespace detail {

inline void validate(const ScenarioConfig& cfg) {
    require(cfg.T >= 1, ErrorKind::ConfigError, "T must be >= 1");
    require(cfg.d >= 1, ErrorKind::ConfigError, "d must be >= 1");
    require(cfg.tau >= 0 && !std::isnan(cfg.tau), ErrorKind::ConfigError, "tau must be >= 0");
    require(cfg.curvature_min > 0 && cfg.curvature_max >= cfg.curvature_min, ErrorKind::ConfigError,
            "need 0 < curvature_min <= curvature_max");
}

inline SetSpec resolve(SetSpec spec, SetSpec::Kind fallback, double radius = 1.0) {
    if (spec.kind == SetSpec::Kind::Default) {
        spec.kind = fallback;
        spec.radius = radius;
    }
    return spec;
}

inline double drift_step(const ScenarioConfig& cfg) {
    if (cfg.drift) return *cfg.drift;
    return std::pow(static_cast<double>(cfg.T), -cfg.tau);
}

/// Random walk with fixed step length that stays at least `margin` inside
/// the set. A step that would exit is reflected (ball: about the outward
/// normal; box: the offending coordinates), then reversed, then redrawn.
class ReflectingWalk {
public:
    ReflectingWalk(const FeasibleSet& set, double margin) : set_(set), margin_(margin) {}

    bool inside(const Vector& p) const {
        if (set_.is_whole_space()) return true;
        if (set_.is_ball()) {
            const auto& b = std::get<Ball>(set_.variant());
            return (p - b.center).norm() <= b.radius - margin_;
        }
        const auto& b = std::get<Box>(set_.variant());
        return ((p.array() >= b.lower.array() + margin_) && (p.array() <= b.upper.array() - margin_)).all();
    }

    Vector step(SeededRng& rng, const Vector& from, double length) const {
        if (length == 0.0) return from;
        for (int attempt = 0; attempt < 64; ++attempt) {
            Vector dir = random_direction(rng, static_cast<int>(from.size()));
            Vector cand = from + length * dir;
            if (inside(cand)) return cand;
            cand = from + length * reflect(from, cand, dir);
            if (inside(cand)) return cand;
            cand = from - length * dir;
            if (inside(cand)) return cand;
        }
        throw Error(ErrorKind::PathEscapesSet, "could not keep the minimizer path inside the set");
    }

private:
    Vector reflect(const Vector& from, const Vector& cand, Vector dir) const {
        if (set_.is_ball()) {
            const auto& b = std::get<Ball>(set_.variant());
            Vector n = from - b.center;
            const double len = n.norm();
            if (len > 0) {
                n /= len;
                dir -= 2.0 * dir.dot(n) * n;
            }
            return dir;
        }
        const auto& b = std::get<Box>(set_.variant());
        for (Eigen::Index i = 0; i < dir.size(); ++i)
            if (cand[i] < b.lower[i] + margin_ || cand[i] > b.upper[i] - margin_) dir[i] = -dir[i];
        return dir;
    }

    const FeasibleSet& set_;
    double margin_;
};

inline void check_path_room(const FeasibleSet& set, double step) {
    if (set.is_whole_space() || step == 0.0) return;
    double width = 0.0;
    if (set.is_ball()) width = 2.0 * std::get<Ball>(set.variant()).radius;
    else {
        const auto& b = std::get<Box>(set.variant());
        width = (b.upper - b.lower).minCoeff();
    }
    // Inner region (margin = step) must fit at least two steps across.
    if (width - 2.0 * step < 2.0 * step)
        throw Error(ErrorKind::PathEscapesSet, "set is too small for drift step " + std::to_string(step));
}

inline std::pair<double, double> extreme_eigs(const Matrix& a) {
    const Vector ev = symmetric_eigenvalues(a);
    return {ev.minCoeff(), ev.maxCoeff()};
}

} // namespace detail

/// f_t(x) = (x − c_t)ᵀ A_t (x − c_t) with ‖c_t − c_{t−1}‖ = T^{−τ} exactly,
/// including the step from the anchor c_0 (the set center) to c_1.
inline Scenario<QuadraticOracle> drifting_quadratic(const ScenarioConfig& cfg) {
    detail::validate(cfg);
    SeededRng rng(cfg.seed);
    Scenario<QuadraticOracle> sc;
    sc.kind = ScenarioKind::DriftingQuadratic;
    sc.function_class = FunctionClass::StronglyConvex;
    sc.set = detail::resolve(cfg.set, SetSpec::Kind::Ball, 2.0).make(cfg.d);
    const double step = detail::drift_step(cfg);
    detail::check_path_room(sc.set, step);
    detail::ReflectingWalk walk(sc.set, step);

    Matrix a = random_spd(rng, cfg.d, cfg.curvature_min, cfg.curvature_max);
    Vector c = sc.set.center();
    sc.anchor = c;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int t = 1; t <= cfg.T; ++t) {
        if (cfg.vary_curvature && t > 1) a = random_spd(rng, cfg.d, cfg.curvature_min, cfg.curvature_max);
        c = walk.step(rng, c, step);
        auto [emin, emax] = detail::extreme_eigs(a);
        lo = std::min(lo, emin);
        hi = std::max(hi, emax);
        sc.oracles.push_back(QuadraticOracle::centered(a, c));
        sc.minimizers.push_back(c);
    }
    sc.strong_convexity = 2.0 * lo;
    sc.smoothness = 2.0 * hi;
    if (sc.set.bounded()) {
        double g = 0.0;
        for (const auto& o : sc.oracles) g = std::max(g, gradient_bound(o, sc.set));
        sc.gradient_bound = g;
    } else {
        sc.notes.push_back("unbounded set: no gradient bound G");
    }
    return sc;
}

/// f_t(x) = 2‖x − τε_t‖² with ε_t ~ N(0, I) drawn independently per round.
inline Scenario<QuadraticOracle> lowerbound_adversary(const ScenarioConfig& cfg) {
    detail::validate(cfg);
    SeededRng rng(cfg.seed);
    Scenario<QuadraticOracle> sc;
    sc.kind = ScenarioKind::LowerBoundAdversary;
    sc.function_class = FunctionClass::StronglyConvex;
    sc.set = detail::resolve(cfg.set, SetSpec::Kind::WholeSpace).make(cfg.d);
    const Matrix a = 2.0 * Matrix::Identity(cfg.d, cfg.d);
    double reach = 0.0;
    for (int t = 1; t <= cfg.T; ++t) {
        const Vector center = cfg.tau * gaussian_sample(rng, cfg.d);
        reach = std::max(reach, center.norm());
        sc.oracles.push_back(QuadraticOracle::centered(a, center));
        sc.minimizers.push_back(sc.set.is_whole_space() ? center : minimizer(sc.oracles.back(), sc.set));
    }
    sc.strong_convexity = 4.0;
    sc.smoothness = 4.0;
    if (sc.set.bounded()) {
        double g = 0.0;
        for (const auto& o : sc.oracles) g = std::max(g, gradient_bound(o, sc.set));
        sc.gradient_bound = g;
    } else {
        const double radius = cfg.bounding_radius > 0 ? cfg.bounding_radius : std::max(reach, 1e-12);
        const FeasibleSet ball = FeasibleSet::ball(Vector::Zero(cfg.d), radius);
        double g = 0.0;
        for (const auto& o : sc.oracles) g = std::max(g, gradient_bound(o, ball));
        sc.gradient_bound = g;
        sc.notes.push_back("G evaluated over the ball of radius " + std::to_string(radius) +
                           " around the origin; the lower-bound check uses expectations, not G");
    }
    return sc;
}

/// Mini-batches of m labelled points whose true separator rotates by
/// `rotation_rate` radians per round; labels flip with probability
/// `label_noise`.
inline Scenario<LogisticOracle> minibatch_logistic(const ScenarioConfig& cfg) {
    detail::validate(cfg);
    require(cfg.batch_size >= 1, ErrorKind::ConfigError, "batch_size must be >= 1");
    require(cfg.reg > 0, ErrorKind::ConfigError, "reg must be > 0");
    SeededRng rng(cfg.seed);
    Scenario<LogisticOracle> sc;
    sc.kind = ScenarioKind::MiniBatchLogistic;
    sc.function_class = FunctionClass::StronglyConvex;
    sc.set = detail::resolve(cfg.set, SetSpec::Kind::Ball, 5.0).make(cfg.d);

    const Matrix basis = random_rotation(rng, cfg.d);
    const Vector u = basis.col(0);
    const Vector v = cfg.d >= 2 ? Vector(basis.col(1)) : Vector(basis.col(0));
    auto draw_batch = [&](int t) {
        const double angle = cfg.d >= 2 ? cfg.rotation_rate * t : 0.0;
        const Vector w = std::cos(angle) * u + std::sin(angle) * v;
        Matrix z(cfg.batch_size, cfg.d);
        Vector y(cfg.batch_size);
        for (int i = 0; i < cfg.batch_size; ++i) {
            const Vector zi = cfg.feature_scale * gaussian_sample(rng, cfg.d);
            z.row(i) = zi.transpose();
            double label = w.dot(zi) >= 0 ? 1.0 : -1.0;
            if (rng.uniform() < cfg.label_noise) label = -label;
            y[i] = label;
        }
        return LogisticOracle(z, y, cfg.reg);
    };

    std::optional<LogisticOracle> fixed;
    double smooth = 0.0;
    double g = 0.0;
    for (int t = 1; t <= cfg.T; ++t) {
        if (cfg.fixed_batch && !fixed) fixed = draw_batch(t);
        LogisticOracle o = cfg.fixed_batch ? *fixed : draw_batch(t);
        smooth = std::max(smooth, *o.constants().smoothness);
        if (sc.set.bounded()) g = std::max(g, gradient_bound(o, sc.set));
        sc.minimizers.push_back(minimizer(o, sc.set));
        sc.oracles.push_back(std::move(o));
    }
    sc.strong_convexity = cfg.reg;
    sc.smoothness = smooth;
    if (sc.set.bounded()) sc.gradient_bound = g;
    else sc.notes.push_back("unbounded set: no gradient bound G");
    return sc;
}

/// f_t(x) = (Ex)ᵀG(Ex) + b_tᵀx where E = [R 0] acts on the first `rank`
/// coordinates. X_t* = {x : x_{1..r} = p_t} ∩ X; p_t walks with step T^{−τ}
/// (or `drift`), which shifts the parallel minimizer sets by exactly that
/// amount each round.
inline Scenario<SemiStrongOracle> semistrong_drift(const ScenarioConfig& cfg) {
    detail::validate(cfg);
    require(cfg.rank >= 1 && cfg.rank < cfg.d, ErrorKind::ConfigError, "semistrong_drift needs 1 <= rank < d");
    SeededRng rng(cfg.seed);
    Scenario<SemiStrongOracle> sc;
    sc.kind = ScenarioKind::SemiStrongDrift;
    sc.function_class = FunctionClass::SemiStronglyConvex;
    sc.set = detail::resolve(cfg.set, SetSpec::Kind::Box).make(cfg.d);
    const int r = cfg.rank;

    const Matrix g = random_spd(rng, r, cfg.curvature_min, cfg.curvature_max);
    const Matrix rot = random_rotation(rng, r);
    Matrix e = Matrix::Zero(r, cfg.d);
    e.leftCols(r) = rot;

    FeasibleSet sub_set = sc.set.is_box()
                              ? FeasibleSet::box(std::get<Box>(sc.set.variant()).lower.head(r),
                                                 std::get<Box>(sc.set.variant()).upper.head(r))
                          : sc.set.is_ball() ? FeasibleSet::ball(sc.set.center().head(r),
                                                                 std::get<Ball>(sc.set.variant()).radius)
                                             : FeasibleSet::whole_space(r);
    const double step = detail::drift_step(cfg);
    detail::check_path_room(sub_set, step);
    detail::ReflectingWalk walk(sub_set, step);

    SeededRng beta_rng = rng.fork(0xBE7A);
    Vector p = sub_set.center();
    double beta = std::numeric_limits<double>::infinity();
    double smooth = 0.0;
    double gbound = 0.0;
    for (int t = 1; t <= cfg.T; ++t) {
        if (t > 1) p = walk.step(rng, p, step);
        const Vector w = -2.0 * g * rot * p;
        SemiStrongOracle o(g, e, e.transpose() * w);
        try {
            certify_semi_strong(o, sc.set, beta_rng, cfg.beta_samples);
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::EmptyMinimizerSet)
                throw Error(ErrorKind::MinimumNotAttained, "round " + std::to_string(t) + ": " + err.what());
            throw;
        }
        beta = std::min(beta, *o.beta());
        smooth = std::max(smooth, *o.constants().smoothness);
        if (sc.set.bounded()) gbound = std::max(gbound, gradient_bound(o, sc.set));
        sc.minimizers.push_back(minimizer(o, sc.set));
        sc.oracles.push_back(std::move(o));
    }
    sc.semi_strong = beta;
    sc.smoothness = smooth;
    if (sc.set.bounded()) sc.gradient_bound = gbound;
    else sc.notes.push_back("unbounded set: no gradient bound G");
    return sc;
}

/// Quadratic-plus-log-barrier losses on the open box |x_i| < 1. The
/// minimizer m_t is chosen first and b_t solved so that ∇f_t(m_t) = 0; the
/// step from m_{t−1} is scaled so ‖m_{t−1} − m_t‖²_t = τ·0.9/144 (τ ∈ [0,1]).
inline Scenario<SelfConcordantOracle> selfconcordant_drift(const ScenarioConfig& cfg) {
    detail::validate(cfg);
    require(cfg.tau <= 1.0, ErrorKind::ConfigError, "selfconcordant_drift needs tau in [0, 1]");
    require(cfg.barrier_quadratic >= 0, ErrorKind::ConfigError, "barrier_quadratic must be >= 0");
    SeededRng rng(cfg.seed);
    Scenario<SelfConcordantOracle> sc;
    sc.kind = ScenarioKind::SelfConcordantDrift;
    sc.function_class = FunctionClass::SelfConcordant;
    sc.set = FeasibleSet::whole_space(cfg.d);
    const int d = cfg.d;
    constexpr double kInnerLimit = 0.9; // minimizers stay in |x_i| <= 0.9
    const double allowance = cfg.tau * 0.9 / 144.0;

    Matrix normals(2 * d, d);
    normals.setZero();
    for (int i = 0; i < d; ++i) {
        normals(2 * i, i) = 1.0;
        normals(2 * i + 1, i) = -1.0;
    }
    const Vector offsets = Vector::Ones(2 * d);

    auto quad = [&]() -> Matrix {
        return cfg.barrier_quadratic * random_spd(rng, d, cfg.curvature_min, cfg.curvature_max);
    };
    auto hessian_at = [&](const Matrix& a, const Vector& x) -> Matrix {
        const Vector s = offsets - normals * x;
        return 2.0 * a + normals.transpose() * s.cwiseInverse().cwiseAbs2().asDiagonal() * normals;
    };
    auto make = [&](const Matrix& a, const Vector& m) {
        const Vector s = offsets - normals * m;
        const Vector b = a * m + 0.5 * normals.transpose() * s.cwiseInverse();
        return SelfConcordantOracle(a, b, 0.0, normals, offsets, m);
    };

    Matrix a = quad();
    Vector m = Vector::Zero(d);
    std::vector<Matrix> hessians;
    for (int t = 1; t <= cfg.T; ++t) {
        if (t > 1) {
            if (cfg.vary_curvature) a = quad();
            if (allowance > 0) {
                Vector u = random_direction(rng, d);
                auto max_step = [&](const Vector& dir) {
                    double s = std::numeric_limits<double>::infinity();
                    for (int i = 0; i < d; ++i) {
                        if (dir[i] > 0) s = std::min(s, (kInnerLimit - m[i]) / dir[i]);
                        if (dir[i] < 0) s = std::min(s, (-kInnerLimit - m[i]) / dir[i]);
                    }
                    return std::max(0.0, s);
                };
                if (max_step(u) < max_step(-u)) u = -u;
                const double s_max = max_step(u);
                auto local = [&](double s) {
                    const Vector next = m + s * u;
                    const Vector h = s * u;
                    return h.dot(hessian_at(a, next) * h);
                };
                double lo = 0.0;
                double hi = s_max;
                if (local(hi) > allowance) {
                    for (int it = 0; it < 200; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        (local(mid) > allowance ? hi : lo) = mid;
                    }
                } else {
                    lo = s_max;
                }
                m = m + lo * u;
            }
        }
        SelfConcordantOracle o = make(a, m);
        const Vector x_star = minimizer(o);
        if (o.gradient(x_star).norm() > 1e-8)
            throw Error(ErrorKind::ConditionUnsatisfiable, "minimizer solve did not reach a stationary point");
        hessians.push_back(o.hessian(x_star));
        if (t > 1) {
            const Vector h = sc.minimizers.back() - x_star;
            if (h.dot(hessians.back() * h) > 1.0 / 144.0)
                throw Error(ErrorKind::ConditionUnsatisfiable,
                            "round " + std::to_string(t) + " violates the 1/144 local drift condition");
        }
        sc.minimizers.push_back(x_star);
        sc.oracles.push_back(std::move(o));
    }
    sc.mu = hessians.size() >= 2 ? curvature_ratio(hessians) : 1.0;
    sc.notes.push_back("barrier domain |x_i| < 1; learner runs unconstrained inside it");
    return sc;
}

using AnyScenario = std::variant<Scenario<QuadraticOracle>, Scenario<LogisticOracle>, Scenario<SemiStrongOracle>,
                                 Scenario<SelfConcordantOracle>>;

inline AnyScenario make_scenario(const ScenarioConfig& cfg) {
    switch (cfg.kind) {
    case ScenarioKind::DriftingQuadratic: return drifting_quadratic(cfg);
    case ScenarioKind::LowerBoundAdversary: return lowerbound_adversary(cfg);
    case ScenarioKind::MiniBatchLogistic: return minibatch_logistic(cfg);
    case ScenarioKind::SemiStrongDrift: return semistrong_drift(cfg);
    case ScenarioKind::SelfConcordantDrift: return selfconcordant_drift(cfg);
    }
    throw Error(ErrorKind::ConfigError, "unknown scenario kind");
}

} // namespace dynregret
