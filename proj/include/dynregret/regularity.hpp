#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynregret/errors.hpp"
#include "dynregret/feasible_set.hpp"
#include "dynregret/learners.hpp"
#include "dynregret/linalg.hpp"
#include "dynregret/minimize.hpp"
#include "dynregret/oracles.hpp"

namespace dynregret {

/// Per-round increments (entry 0 is the first round and always 0) and their totals.
struct PathMeasure {
    double total = 0.0;         // P-type: Σ ‖·‖
    double squared_total = 0.0; // S-type: Σ ‖·‖²
    std::vector<double> increments;
    std::vector<double> squared_increments;
    bool exact = true;

    void push(double inc, double sq_inc) {
        increments.push_back(inc);
        squared_increments.push_back(sq_inc);
        total += inc;
        squared_total += sq_inc;
    }
};

/// Euclidean path length and squared path length of a comparator sequence.
inline PathMeasure path_measure(std::span<const Vector> points) {
    PathMeasure m;
    if (points.empty()) return m;
    m.push(0.0, 0.0);
    for (std::size_t t = 1; t < points.size(); ++t) {
        const double step = (points[t] - points[t - 1]).norm();
        m.push(step, step * step);
    }
    return m;
}

/// Σ_{t≥2} ‖x_t* − x_{t−1}*‖.
inline double path_length(std::span<const Vector> minimizers) {
    require(!minimizers.empty(), ErrorKind::InvalidArgument, "path_length needs at least one point");
    return path_measure(minimizers).total;
}

/// Σ_{t≥2} ‖x_t* − x_{t−1}*‖².
inline double squared_path_length(std::span<const Vector> minimizers) {
    require(!minimizers.empty(), ErrorKind::InvalidArgument, "squared_path_length needs at least one point");
    return path_measure(minimizers).squared_total;
}

/// Path measures in the local norm of the current round,
/// ‖h‖_t = √(hᵀ ∇²f_t(x_t*) h).
inline PathMeasure hessian_regularities(std::span<const Vector> minimizers, std::span<const Matrix> hessians) {
    require(minimizers.size() == hessians.size(), ErrorKind::DimensionMismatch, "one Hessian per minimizer");
    PathMeasure m;
    if (minimizers.empty()) return m;
    cholesky_factor(hessians[0]);
    m.push(0.0, 0.0);
    for (std::size_t t = 1; t < minimizers.size(); ++t) {
        cholesky_factor(hessians[t]);
        const Vector h = minimizers[t] - minimizers[t - 1];
        const double sq = std::max(0.0, h.dot(hessians[t] * h));
        m.push(std::sqrt(sq), sq);
    }
    return m;
}

/// μ = max_t λ_max(H_{t−1}^{-1/2} H_t H_{t−1}^{-1/2}).
inline double curvature_ratio(std::span<const Matrix> hessians) {
    require(hessians.size() >= 2, ErrorKind::InvalidArgument, "mu needs at least two rounds");
    double mu = 0.0;
    for (std::size_t t = 1; t < hessians.size(); ++t) mu = std::max(mu, max_generalized_eig(hessians[t], hessians[t - 1]));
    return mu;
}

/// Projection-based path measures for semi-strongly convex sequences:
/// increments max_x ‖Π_{X_t*}(x) − Π_{X_{t−1}*}(x)‖ over the probe set.
/// Exact when every minimizer set is a singleton, or when consecutive sets
/// are parallel translates (shared Hessian, whole space or box with an
/// axis-aligned kernel); otherwise a flagged lower estimate.
inline PathMeasure semistrong_regularities(std::span<const SemiStrongOracle> oracles, const FeasibleSet& set,
                                           std::span<const Vector> probes) {
    PathMeasure m;
    if (oracles.empty()) return m;
    bool singletons = true;
    bool shared_kernel = true;
    for (const auto& o : oracles) {
        if (!o.free_coords().empty() || !o.axis_aligned_kernel()) singletons = false;
        const Matrix& h0 = oracles[0].hessian_matrix();
        if ((o.hessian_matrix() - h0).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h0.cwiseAbs().maxCoeff()))
            shared_kernel = false;
    }
    const bool translates = shared_kernel && (set.is_whole_space() ||
                                              (set.is_box() && oracles[0].axis_aligned_kernel()));
    m.exact = singletons || translates;

    std::vector<Vector> points(probes.begin(), probes.end());
    if (points.empty() || m.exact) points = {set.center()};

    std::vector<Vector> previous;
    for (const Vector& p : points) previous.push_back(minimizer_set_project(oracles[0], set, p));
    m.push(0.0, 0.0);
    for (std::size_t t = 1; t < oracles.size(); ++t) {
        double worst = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            Vector current = minimizer_set_project(oracles[t], set, points[i]);
            worst = std::max(worst, (current - previous[i]).norm());
            previous[i] = std::move(current);
        }
        m.push(worst, worst * worst);
    }
    return m;
}

struct VariationEstimate {
    double functional = 0.0; // F_T
    double gradient = 0.0;   // G_T
    std::vector<double> functional_increments;
    std::vector<double> gradient_increments;
    bool exact = true;
};

namespace detail {

inline bool same_matrix(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff());
}

/// max_{x∈X} |v0 + gᵀx| for an affine difference.
inline std::optional<double> affine_sup(double v0, const Vector& g, const FeasibleSet& set) {
    if (set.is_ball()) {
        const auto& b = std::get<Ball>(set.variant());
        return std::abs(v0 + g.dot(b.center)) + b.radius * g.norm();
    }
    if (set.is_box() && set.dim() <= 16) {
        double best = 0.0;
        for (const Vector& v : set.vertices()) best = std::max(best, std::abs(v0 + g.dot(v)));
        return best;
    }
    if (set.is_whole_space() && g.norm() == 0.0) return std::abs(v0);
    return std::nullopt;
}

} // namespace detail

/// F_T = Σ max_x |f_t(x) − f_{t−1}(x)| and G_T = Σ max_x ‖∇f_t(x) − ∇f_{t−1}(x)‖².
/// Consecutive quadratics sharing A have an affine value difference and a
/// constant gradient difference −2Δb, so both increments are exact; every
/// other pair uses the sampled maximum over `probes`.
template <FunctionOracle O>
VariationEstimate variation_estimates(std::span<const O> oracles, const FeasibleSet& set,
                                      std::span<const Vector> probes) {
    VariationEstimate v;
    if (oracles.empty()) return v;
    v.functional_increments.push_back(0.0);
    v.gradient_increments.push_back(0.0);
    for (std::size_t t = 1; t < oracles.size(); ++t) {
        const O& cur = oracles[t];
        const O& prev = oracles[t - 1];
        std::optional<double> f_inc;
        std::optional<double> g_inc;
        if constexpr (std::is_same_v<O, QuadraticOracle>) {
            if (detail::same_matrix(cur.a(), prev.a())) {
                const Vector db = cur.b() - prev.b();
                g_inc = 4.0 * db.squaredNorm();
                f_inc = detail::affine_sup(cur.c() - prev.c(), -2.0 * db, set);
            }
        }
        if (!f_inc || !g_inc) {
            v.exact = false;
            double f_best = 0.0;
            double g_best = 0.0;
            for (const Vector& p : probes) {
                f_best = std::max(f_best, std::abs(cur.value(p) - prev.value(p)));
                g_best = std::max(g_best, (cur.gradient(p) - prev.gradient(p)).squaredNorm());
            }
            if (!f_inc) f_inc = f_best;
            if (!g_inc) g_inc = g_best;
        }
        v.functional_increments.push_back(*f_inc);
        v.gradient_increments.push_back(*g_inc);
        v.functional += *f_inc;
        v.gradient += *g_inc;
    }
    return v;
}

// --- dynamic regret ------------------------------------------------------------

inline constexpr double kNegativeGapTolerance = 1e-9;

struct RegretTally {
    double total = 0.0;
    std::vector<double> gaps;
};

/// Σ f_t(x_t) − f_t(x_t*). Gaps in [−1e-9, 0) are round-off and clamp to 0;
/// anything lower means the comparator was not a minimizer.
inline RegretTally dynamic_regret(std::span<const double> losses_at_xt, std::span<const double> losses_at_min) {
    require(losses_at_xt.size() == losses_at_min.size(), ErrorKind::DimensionMismatch, "loss sequences differ in length");
    RegretTally r;
    for (std::size_t t = 0; t < losses_at_xt.size(); ++t) {
        double gap = losses_at_xt[t] - losses_at_min[t];
        if (gap < -kNegativeGapTolerance)
            throw Error(ErrorKind::NegativeGap, "round " + std::to_string(t + 1) + " gap " + std::to_string(gap));
        gap = std::max(gap, 0.0);
        r.gaps.push_back(gap);
        r.total += gap;
    }
    return r;
}

// --- reports -------------------------------------------------------------------

struct RegularityReport {
    double P_star = 0.0;
    double S_star = 0.0;
    std::optional<double> P_semi, S_semi;
    bool semi_exact = true;
    std::optional<double> P_hess, S_hess;
    double F_T = 0.0;
    double G_T = 0.0;
    bool variation_exact = true;
    std::optional<double> mu;
    std::optional<double> G_const;
    std::vector<double> p_increments;
    std::vector<double> s_increments;
};

enum class FunctionClass { StronglyConvex, SemiStronglyConvex, SelfConcordant };

constexpr std::string_view to_string(FunctionClass c) {
    switch (c) {
    case FunctionClass::StronglyConvex: return "strongly_convex";
    case FunctionClass::SemiStronglyConvex: return "semi_strongly_convex";
    case FunctionClass::SelfConcordant: return "self_concordant";
    }
    return "unknown";
}

/// Everything the regret bounds read. `path` and `squared_path` are the
/// regularities matching the function class (Euclidean, projection-based or
/// Hessian-weighted); `initial_distance` is ‖x₁ − x₁*‖ or ‖x₁ − Π_{X₁*}(x₁)‖;
/// `minimizer_gradient_energy` is Σ‖∇f_t(x_t*)‖² (G_T* for semi-strong).
struct BoundInputs {
    FunctionClass function_class = FunctionClass::StronglyConvex;
    LearnerConfig learner;
    std::optional<double> gradient_bound;
    std::optional<double> strong_convexity;
    std::optional<double> smoothness;
    std::optional<double> semi_strong;
    double path = 0.0;
    double squared_path = 0.0;
    double initial_distance = 0.0;
    double minimizer_gradient_energy = 0.0;
    double initial_gap = 0.0;
    double regret = 0.0;
};

inline constexpr double kBoundSlack = 1e-9;

struct BoundReport {
    std::optional<double> gamma;
    std::optional<double> alpha_star;
    std::optional<double> bound_P;
    std::optional<double> bound_S;
    std::optional<double> bound_selfconcordant;
    double regret = 0.0;
    std::optional<bool> satisfied_P;
    std::optional<bool> satisfied_S;
    std::optional<bool> satisfied_selfconcordant;
    std::string bound_P_source;
    std::string bound_S_source;
    std::string note;

    /// Tightest evaluated bound, if any.
    std::optional<double> tightest() const {
        std::optional<double> best;
        for (const auto& b : {bound_P, bound_S, bound_selfconcordant})
            if (b && (!best || *b < *best)) best = b;
        return best;
    }

    bool all_satisfied() const {
        for (const auto& s : {satisfied_P, satisfied_S, satisfied_selfconcordant})
            if (s && !*s) return false;
        return true;
    }
};

namespace detail {
inline double need(const std::optional<double>& v, const char* name) {
    if (!v) throw Error(ErrorKind::MissingConstant, std::string("bound requires ") + name);
    return *v;
}

/// min over α > 0 of C₁/(2α) + (L+α)C₂ is L·C₂ + √(2C₁C₂), attained at
/// α* = √(C₁/(2C₂)); C₁ = 0 is the α → 0 limit.
inline void fill_squared_bound(BoundReport& r, double c1, double smoothness, double sq_path, double d1) {
    const double c2 = 2.0 * sq_path + d1 * d1;
    r.alpha_star = (c1 > 0 && c2 > 0) ? std::sqrt(c1 / (2.0 * c2)) : 0.0;
    r.bound_S = smoothness * c2 + std::sqrt(2.0 * c1 * c2);
}
} // namespace detail

/// Evaluates every regret bound that applies to the function class and
/// learner configuration, and sets the satisfied flags
/// (regret ≤ bound + 1e-9).
inline BoundReport regret_bounds(const BoundInputs& in) {
    BoundReport r;
    r.regret = in.regret;
    const LearnerConfig& lc = in.learner;
    const double d1 = in.initial_distance;

    switch (in.function_class) {
    case FunctionClass::StronglyConvex:
    case FunctionClass::SemiStronglyConvex: {
        const bool semi = in.function_class == FunctionClass::SemiStronglyConvex;
        if (lc.variant == LearnerVariant::OMNU) {
            r.note = "no gradient-descent bound for the Newton learner";
            break;
        }
        const double L = detail::need(in.smoothness, "L");
        const double G = detail::need(in.gradient_bound, "G");
        const double curv = semi ? detail::need(in.semi_strong, "beta") : detail::need(in.strong_convexity, "lambda");
        if (lc.eta > 1.0 / L * (1.0 + 1e-12)) {
            r.note = "eta exceeds 1/L; no bound is certified";
            break;
        }
        const double inv_eta = 1.0 / lc.eta;
        const double gamma = semi ? std::sqrt(1.0 - curv / (inv_eta + curv))
                                  : std::sqrt(std::max(0.0, 1.0 - 2.0 * curv / (inv_eta + curv)));
        r.gamma = gamma;
        const int k_needed = semi ? k_semistrong(lc.eta, curv) : k_strongly(lc.eta, curv);
        if (lc.variant == LearnerVariant::OMGD && lc.inner_iterations >= k_needed) {
            r.bound_P = 2.0 * G * (in.path + d1);
            r.bound_P_source = semi ? "multi-gradient, semi-strong (2G form)" : "multi-gradient, strongly convex (2G form)";
            detail::fill_squared_bound(r, in.minimizer_gradient_energy, L, in.squared_path, d1);
            r.bound_S_source = semi ? "multi-gradient, semi-strong (squared path)" : "multi-gradient, strongly convex (squared path)";
        } else {
            r.bound_P = G * (in.path + d1) / (1.0 - gamma);
            r.bound_P_source = semi ? "single-gradient, semi-strong (1/(1-gamma) form)"
                                    : "single-gradient, strongly convex (1/(1-gamma) form)";
        }
        break;
    }
    case FunctionClass::SelfConcordant: {
        if (lc.variant != LearnerVariant::OMNU) {
            r.note = "self-concordant bound requires the Newton learner";
            break;
        }
        r.bound_selfconcordant = std::min(in.path / 3.0, 4.0 * in.squared_path) + in.initial_gap + 1.0 / 36.0;
        break;
    }
    }

    if (r.bound_P) r.satisfied_P = in.regret <= *r.bound_P + kBoundSlack;
    if (r.bound_S) r.satisfied_S = in.regret <= *r.bound_S + kBoundSlack;
    if (r.bound_selfconcordant) r.satisfied_selfconcordant = in.regret <= *r.bound_selfconcordant + kBoundSlack;
    return r;
}

} // namespace dynregret
