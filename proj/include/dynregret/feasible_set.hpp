#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dynregret/errors.hpp"
#include "dynregret/linalg.hpp"
#include "dynregret/rng.hpp"

namespace dynregret {

struct WholeSpace {
    int dim;
};

struct Ball {
    Vector center;
    double radius;
};

struct Box {
    Vector lower;
    Vector upper;
};

/// Closed convex constraint region with an exact Euclidean projection.
class FeasibleSet {
public:
    using Variant = std::variant<WholeSpace, Ball, Box>;

    static FeasibleSet whole_space(int d) {
        require(d >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
        return FeasibleSet(WholeSpace{d});
    }

    static FeasibleSet ball(Vector center, double radius) {
        require(center.size() >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
        require(radius > 0 && std::isfinite(radius), ErrorKind::InvalidArgument, "ball radius must be > 0");
        require(center.allFinite(), ErrorKind::InvalidArgument, "ball center must be finite");
        return FeasibleSet(Ball{std::move(center), radius});
    }

    static FeasibleSet box(Vector lower, Vector upper) {
        require_same_dim(lower.size(), upper.size(), "box bounds");
        require(lower.size() >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
        require(lower.allFinite() && upper.allFinite(), ErrorKind::InvalidArgument, "box bounds must be finite");
        require((lower.array() < upper.array()).all(), ErrorKind::InvalidArgument,
                "box requires lower < upper elementwise");
        return FeasibleSet(Box{std::move(lower), std::move(upper)});
    }

    const Variant& variant() const { return set_; }
    bool is_whole_space() const { return std::holds_alternative<WholeSpace>(set_); }
    bool is_ball() const { return std::holds_alternative<Ball>(set_); }
    bool is_box() const { return std::holds_alternative<Box>(set_); }
    bool bounded() const { return !is_whole_space(); }

    int dim() const {
        return std::visit(
            [](const auto& s) -> int {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, WholeSpace>) return s.dim;
                else if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(s.center.size());
                else return static_cast<int>(s.lower.size());
            },
            set_);
    }

    Vector project(const Vector& x) const {
        require_same_dim(x.size(), dim(), "projection dimension");
        return std::visit(
            [&](const auto& s) -> Vector {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, WholeSpace>) {
                    return x;
                } else if constexpr (std::is_same_v<T, Ball>) {
                    const Vector offset = x - s.center;
                    const double n = offset.norm();
                    if (n <= s.radius) return x;
                    return s.center + offset * (s.radius / n);
                } else {
                    return x.cwiseMax(s.lower).cwiseMin(s.upper);
                }
            },
            set_);
    }

    bool contains(const Vector& x, double tol = 1e-12) const {
        return (project(x) - x).norm() <= tol;
    }

    /// Axis-aligned bounding box; UnboundedSet for the whole space.
    std::pair<Vector, Vector> bounding_box() const {
        if (const auto* b = std::get_if<Ball>(&set_)) {
            const Vector r = Vector::Constant(b->center.size(), b->radius);
            return {b->center - r, b->center + r};
        }
        if (const auto* b = std::get_if<Box>(&set_)) return {b->lower, b->upper};
        throw Error(ErrorKind::UnboundedSet, "whole space has no bounding box");
    }

    Vector center() const {
        if (const auto* b = std::get_if<Ball>(&set_)) return b->center;
        if (const auto* b = std::get_if<Box>(&set_)) return 0.5 * (b->lower + b->upper);
        return Vector::Zero(dim());
    }

    /// Largest distance from `point` to any element of the set.
    double max_distance_from(const Vector& point) const {
        if (const auto* b = std::get_if<Ball>(&set_)) return (point - b->center).norm() + b->radius;
        if (const auto* b = std::get_if<Box>(&set_)) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < point.size(); ++i) {
                const double m = std::max(std::abs(point[i] - b->lower[i]), std::abs(point[i] - b->upper[i]));
                s += m * m;
            }
            return std::sqrt(s);
        }
        throw Error(ErrorKind::UnboundedSet, "distance over the whole space is unbounded");
    }

    /// Corners of a box; empty for other variants.
    std::vector<Vector> vertices() const {
        std::vector<Vector> out;
        const auto* b = std::get_if<Box>(&set_);
        if (b == nullptr) return out;
        const int d = dim();
        require(d <= 20, ErrorKind::InvalidArgument, "vertex enumeration limited to d <= 20");
        for (unsigned long mask = 0; mask < (1UL << d); ++mask) {
            Vector v(d);
            for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1UL ? b->upper[i] : b->lower[i];
            out.push_back(std::move(v));
        }
        return out;
    }

    /// Uniform sample from a bounded set (rejection-free for both variants).
    Vector sample(SeededRng& rng) const {
        if (const auto* b = std::get_if<Box>(&set_)) {
            Vector v(b->lower.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(b->lower[i], b->upper[i]);
            return v;
        }
        if (const auto* b = std::get_if<Ball>(&set_)) {
            const int d = dim();
            const double r = b->radius * std::pow(rng.uniform(), 1.0 / d);
            return b->center + r * random_direction(rng, d);
        }
        throw Error(ErrorKind::UnboundedSet, "cannot sample uniformly from the whole space");
    }

    std::string describe() const {
        if (is_whole_space()) return "whole_space(d=" + std::to_string(dim()) + ")";
        if (const auto* b = std::get_if<Ball>(&set_))
            return "ball(d=" + std::to_string(dim()) + ", radius=" + std::to_string(b->radius) + ")";
        return "box(d=" + std::to_string(dim()) + ")";
    }

private:
    explicit FeasibleSet(Variant v) : set_(std::move(v)) {}
    Variant set_;
};

} // namespace dynregret
