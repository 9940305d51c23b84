#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "dynregret/errors.hpp"
#include "dynregret/feasible_set.hpp"
#include "dynregret/linalg.hpp"
#include "dynregret/newton.hpp"
#include "dynregret/oracles.hpp"
#include "dynregret/rng.hpp"

namespace dynregret {

inline constexpr long kMaxInnerIterations = 1'000'000;
inline constexpr double kFixedPointTolerance = 1e-10;
inline constexpr double kNewtonTolerance = 1e-10;

namespace detail {

/// Projected gradient with step 1/L until ‖x − Π(x − ∇f(x)/L)‖ ≤ tol.
template <FunctionOracle O>
Vector projected_gradient_minimize(const O& oracle, const FeasibleSet& set, const Vector& start, double smoothness,
                                   double tol) {
    require(smoothness > 0, ErrorKind::MissingConstant, "projected gradient needs L > 0");
    Vector x = set.project(start);
    for (long k = 0; k < kMaxInnerIterations; ++k) {
        Vector y = set.project(x - oracle.gradient(x) / smoothness);
        const double moved = (y - x).norm();
        x = std::move(y);
        if (moved <= tol) return x;
    }
    throw Error(ErrorKind::NoConvergence, "projected gradient did not reach the fixed-point tolerance");
}

/// Fixed-point tolerance tightened by the inverse condition number so the
/// distance to the true minimizer stays near 1e-10.
inline double fixed_point_tolerance(const DeclaredConstants& k) {
    if (k.strong_convexity && k.smoothness && *k.smoothness > 0)
        return kFixedPointTolerance * std::min(1.0, *k.strong_convexity / *k.smoothness);
    return kFixedPointTolerance;
}

/// Damped Newton until the decrement drops to `tol`; the final step is
/// still taken, which lands at the round-off floor.
template <HessianOracle O>
Vector damped_newton_minimize(const O& oracle, Vector x, double tol = kNewtonTolerance) {
    for (long k = 0; k < kMaxInnerIterations; ++k) {
        NewtonStep step = damped_newton_step(oracle, x);
        x = std::move(step.next);
        if (step.decrement <= tol) return x;
    }
    throw Error(ErrorKind::NoConvergence, "damped Newton did not reach the decrement tolerance");
}

} // namespace detail

// --- minimizer -------------------------------------------------------------

inline Vector minimizer(const QuadraticOracle& oracle, const FeasibleSet& set) {
    require_same_dim(oracle.dim(), set.dim(), "oracle vs set");
    const DeclaredConstants k = oracle.constants();
    std::optional<Vector> free_min;
    if (k.strong_convexity) free_min = oracle.unconstrained_minimizer();
    if (set.is_whole_space()) {
        require(free_min.has_value(), ErrorKind::NotPositiveDefinite, "singular quadratic has no unique minimizer");
        return *free_min;
    }
    if (free_min && set.contains(*free_min)) return *free_min;
    // Isotropic A over a ball: the minimizer is the projection of A⁻¹b.
    if (free_min && set.is_ball() && oracle.isotropic()) return set.project(*free_min);
    const Vector start = free_min ? set.project(*free_min) : set.center();
    return detail::projected_gradient_minimize(oracle, set, start, *k.smoothness, detail::fixed_point_tolerance(k));
}

inline Vector minimizer(const LogisticOracle& oracle, const FeasibleSet& set) {
    require_same_dim(oracle.dim(), set.dim(), "oracle vs set");
    const Vector free_min = detail::damped_newton_minimize(oracle, Vector::Zero(oracle.dim()), 1e-12);
    if (set.is_whole_space() || set.contains(free_min)) return free_min;
    const DeclaredConstants k = oracle.constants();
    return detail::projected_gradient_minimize(oracle, set, set.project(free_min), *k.smoothness,
                                               detail::fixed_point_tolerance(k));
}

/// The barrier domain is the feasible region; damped Newton from the
/// oracle's interior point never leaves it.
inline Vector minimizer(const SelfConcordantOracle& oracle) {
    return detail::damped_newton_minimize(oracle, oracle.interior_point(), kNewtonTolerance);
}

// --- semi-strong minimizer sets ---------------------------------------------

/// Euclidean projection of x onto X* = {x ∈ X : f(x) = min_X f}.
///
/// Supported when the unconstrained minimizer set {x : Hx = −b} meets X
/// (then X* is their intersection):
///   * whole space: closed form x − H⁺(Hx + b);
///   * box with an axis-aligned kernel: fix the bound coordinates, clamp
///     the free ones;
///   * anything else: Dykstra's alternating projections between the affine
///     set and X, checked to 1e-10 feasibility.
inline Vector minimizer_set_project(const SemiStrongOracle& oracle, const FeasibleSet& set, const Vector& x) {
    require_same_dim(x.size(), oracle.dim(), "projection argument");
    require_same_dim(oracle.dim(), set.dim(), "oracle vs set");
    const Matrix& h = oracle.hessian_matrix();
    const Vector& b = oracle.b();
    auto affine_project = [&](const Vector& p) -> Vector { return p - oracle.hessian_pinv() * (h * p + b); };

    if (set.is_whole_space()) return affine_project(x);

    if (set.is_box() && oracle.axis_aligned_kernel()) {
        const Vector& anchor = oracle.affine_point();
        Vector p = set.project(x);
        for (int j : oracle.bound_coords()) p[j] = anchor[j];
        if (!set.contains(p, 1e-10))
            throw Error(ErrorKind::EmptyMinimizerSet, "unconstrained minimizer set does not meet the box");
        return p;
    }

    Vector current = x;
    Vector p_inc = Vector::Zero(x.size());
    Vector q_inc = Vector::Zero(x.size());
    Vector y = x;
    for (long k = 0; k < kMaxInnerIterations; ++k) {
        y = affine_project(current + p_inc);
        p_inc = current + p_inc - y;
        Vector next = set.project(y + q_inc);
        q_inc = y + q_inc - next;
        const double moved = (next - current).norm();
        current = std::move(next);
        if (moved <= 1e-15 * (1.0 + current.norm()) && (y - current).norm() <= 1e-12) break;
    }
    if ((h * current + b).norm() > 1e-10 * (1.0 + b.norm()) || !set.contains(current, 1e-10))
        throw Error(ErrorKind::EmptyMinimizerSet, "unconstrained minimizer set does not meet the feasible set");
    return current;
}

/// A point of X* (the projection of the set's center).
inline Vector minimizer(const SemiStrongOracle& oracle, const FeasibleSet& set) {
    return minimizer_set_project(oracle, set, set.center());
}

struct BetaCertificate {
    double sampled_min_ratio = std::numeric_limits<double>::infinity();
    std::optional<double> exact;
    double beta = 0.0;
    int samples = 0;
};

/// Estimates β as 0.9 × min 2(f(x) − min f)/‖x − Π_{X*}(x)‖² over sampled
/// points of X; capped by the exact smallest positive curvature when the
/// geometry makes that exact. Stores the result on the oracle.
inline BetaCertificate certify_semi_strong(SemiStrongOracle& oracle, const FeasibleSet& set, SeededRng& rng,
                                           int samples = 10'000) {
    BetaCertificate cert;
    const Vector x_star = minimizer(oracle, set);
    const double f_min = oracle.value(x_star);
    for (int i = 0; i < samples; ++i) {
        Vector x = set.bounded() ? set.sample(rng) : Vector(x_star + gaussian_sample(rng, oracle.dim()));
        const Vector p = minimizer_set_project(oracle, set, x);
        const double dist2 = (x - p).squaredNorm();
        if (dist2 < 1e-14) continue;
        cert.sampled_min_ratio = std::min(cert.sampled_min_ratio, 2.0 * (oracle.value(x) - f_min) / dist2);
        ++cert.samples;
    }
    if (set.is_whole_space() || (set.is_box() && oracle.axis_aligned_kernel())) cert.exact = oracle.positive_curvature();
    double beta = std::isfinite(cert.sampled_min_ratio) ? 0.9 * cert.sampled_min_ratio
                                                        : cert.exact.value_or(0.0);
    if (cert.exact) beta = std::min(beta, *cert.exact);
    require(beta > 0, ErrorKind::ConditionUnsatisfiable, "could not certify a positive semi-strong constant");
    cert.beta = beta;
    oracle.set_beta(beta);
    return cert;
}

// --- gradient bounds ---------------------------------------------------------

/// sup_{x ∈ X} ‖Mx + g‖. Exact over a box (the maximum of a convex function
/// sits at a vertex); ‖Mc + g‖ + ‖M‖₂·r over a ball.
inline double affine_gradient_bound(const Matrix& m, const Vector& g, const FeasibleSet& set) {
    const double op_norm = std::sqrt(std::max(0.0, symmetric_eigenvalues(m.transpose() * m).maxCoeff()));
    if (set.is_whole_space()) {
        if (op_norm <= 1e-15) return g.norm();
        throw Error(ErrorKind::Unbounded, "gradient is unbounded over the whole space");
    }
    if (set.is_box() && set.dim() <= 16) {
        double best = 0.0;
        for (const Vector& v : set.vertices()) best = std::max(best, (m * v + g).norm());
        return best;
    }
    const Vector c = set.center();
    const double radius = set.is_ball() ? std::get<Ball>(set.variant()).radius : set.max_distance_from(c);
    return (m * c + g).norm() + op_norm * radius;
}

inline double gradient_bound(const QuadraticOracle& oracle, const FeasibleSet& set) {
    return affine_gradient_bound(oracle.gradient_matrix(), oracle.gradient_offset(), set);
}

inline double gradient_bound(const SemiStrongOracle& oracle, const FeasibleSet& set) {
    return affine_gradient_bound(oracle.gradient_matrix(), oracle.gradient_offset(), set);
}

/// ‖∇f(x)‖ ≤ max_i ‖z_i‖ + reg·max_{x∈X} ‖x‖ since each sigmoid weight is ≤ 1.
inline double gradient_bound(const LogisticOracle& oracle, const FeasibleSet& set) {
    if (set.is_whole_space()) throw Error(ErrorKind::Unbounded, "logistic gradient is unbounded over the whole space");
    return oracle.max_feature_norm() + oracle.reg() * set.max_distance_from(Vector::Zero(set.dim()));
}

} // namespace dynregret
