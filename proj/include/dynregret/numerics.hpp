#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <utility>

#include "dynregret/errors.hpp"
#include "dynregret/feasible_set.hpp"
#include "dynregret/linalg.hpp"
#include "dynregret/rng.hpp"

namespace dynregret {

template <typename F>
concept ScalarField = requires(const F& f, const Vector& x) {
    { f(x) } -> std::convertible_to<double>;
};

namespace detail {
template <ScalarField F>
double eval_finite(const F& f, const Vector& x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "stencil evaluation is not finite");
    return v;
}
} // namespace detail

/// Central-difference gradient, entry i = (f(x+h·e_i) − f(x−h·e_i)) / 2h.
template <ScalarField F>
Vector finite_diff_gradient(const F& f, const Vector& x, double h = 1e-5) {
    const Eigen::Index d = x.size();
    Vector g(d);
    Vector probe = x;
    for (Eigen::Index i = 0; i < d; ++i) {
        probe[i] = x[i] + h;
        const double fp = detail::eval_finite(f, probe);
        probe[i] = x[i] - h;
        const double fm = detail::eval_finite(f, probe);
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Second-order central stencil on f. The default step is larger than the
/// gradient one because the round-off term scales like eps/h².
template <ScalarField F>
Matrix finite_diff_hessian(const F& f, const Vector& x, double h = 1e-4) {
    const Eigen::Index d = x.size();
    Matrix hess(d, d);
    const double f0 = detail::eval_finite(f, x);
    Vector p = x;
    for (Eigen::Index i = 0; i < d; ++i) {
        p[i] = x[i] + h;
        const double fp = detail::eval_finite(f, p);
        p[i] = x[i] - h;
        const double fm = detail::eval_finite(f, p);
        p[i] = x[i];
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
        for (Eigen::Index j = 0; j < i; ++j) {
            auto at = [&](double si, double sj) {
                Vector q = x;
                q[i] += si * h;
                q[j] += sj * h;
                return detail::eval_finite(f, q);
            };
            const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    return hess;
}

struct GridMinimum {
    Vector point;
    double value;
};

/// Grid search over the bounding box of `set` (grid points are projected
/// onto the set), followed by repeated zooming: each level re-grids a
/// window of ±2 cells around the incumbent until the cell width falls
/// below 1e-10. Intended for d ≤ 3 as an independent reference solver.
template <ScalarField F>
GridMinimum brute_force_min(const F& f, const FeasibleSet& set, int resolution = 41) {
    const int d = set.dim();
    require(d >= 1 && d <= 3, ErrorKind::InvalidArgument, "brute_force_min supports 1 <= d <= 3");
    auto [box_lo, box_hi] = set.bounding_box();
    const int n = std::max(resolution, 9);

    Vector lo = box_lo;
    Vector hi = box_hi;
    GridMinimum best{set.center(), std::numeric_limits<double>::infinity()};

    for (int level = 0; level < 400; ++level) {
        const Vector cell = (hi - lo) / static_cast<double>(n - 1);
        long total = 1;
        for (int i = 0; i < d; ++i) total *= n;
        Vector p(d);
        for (long idx = 0; idx < total; ++idx) {
            long rest = idx;
            for (int i = 0; i < d; ++i) {
                p[i] = lo[i] + static_cast<double>(rest % n) * cell[i];
                rest /= n;
            }
            const Vector q = set.project(p);
            const double v = f(q);
            if (std::isfinite(v) && v < best.value) best = {q, v};
        }
        if (cell.maxCoeff() < 1e-10) break;
        lo = (best.point - 2.0 * cell).cwiseMax(box_lo);
        hi = (best.point + 2.0 * cell).cwiseMin(box_hi);
    }
    require(std::isfinite(best.value), ErrorKind::NonFiniteValue, "no finite grid value found");
    return best;
}

} // namespace dynregret
