#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynregret/errors.hpp"
#include "dynregret/feasible_set.hpp"
#include "dynregret/linalg.hpp"

namespace dynregret {

/// Constants an oracle declares about itself. Absent means "not claimed".
struct DeclaredConstants {
    std::optional<double> strong_convexity; // λ
    std::optional<double> smoothness;       // L
    std::optional<double> semi_strong;      // β
};

template <typename O>
concept FunctionOracle = requires(const O& o, const Vector& x) {
    { o.dim() } -> std::convertible_to<int>;
    { o.value(x) } -> std::convertible_to<double>;
    { o.gradient(x) } -> std::convertible_to<Vector>;
    { o.constants() } -> std::convertible_to<DeclaredConstants>;
};

template <typename O>
concept HessianOracle = FunctionOracle<O> && requires(const O& o, const Vector& x) {
    { o.hessian(x) } -> std::convertible_to<Matrix>;
};

// ---------------------------------------------------------------------------

/// f(x) = xᵀAx − 2bᵀx + c with A symmetric positive semidefinite.
/// λ = 2λ_min(A) is declared only when it is positive.
class QuadraticOracle {
public:
    QuadraticOracle(Matrix a, Vector b, double c) : a_(std::move(a)), b_(std::move(b)), c_(c) {
        require(a_.rows() == a_.cols(), ErrorKind::DimensionMismatch, "quadratic A must be square");
        require_same_dim(a_.rows(), b_.size(), "quadratic b");
        require(a_.allFinite() && b_.allFinite() && std::isfinite(c_), ErrorKind::InvalidArgument,
                "quadratic coefficients must be finite");
        require(is_symmetric(a_), ErrorKind::InvalidArgument, "quadratic A must be symmetric");
        a_ = 0.5 * (a_ + a_.transpose());
        const Vector ev = symmetric_eigenvalues(a_);
        const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
        require(ev.minCoeff() >= -1e-12 * scale, ErrorKind::InvalidArgument, "quadratic A must be PSD");
        lambda_min_a_ = std::max(0.0, ev.minCoeff());
        lambda_max_a_ = std::max(0.0, ev.maxCoeff());
        isotropic_ = (a_ - a_(0, 0) * Matrix::Identity(a_.rows(), a_.cols())).cwiseAbs().maxCoeff() <= 1e-14 * scale;
    }

    /// f(x) = (x − center)ᵀ A (x − center) + offset.
    static QuadraticOracle centered(const Matrix& a, const Vector& center, double offset = 0.0) {
        const Vector b = a * center;
        return QuadraticOracle(a, b, center.dot(b) + offset);
    }

    int dim() const { return static_cast<int>(b_.size()); }

    double value(const Vector& x) const {
        require_same_dim(x.size(), b_.size(), "quadratic argument");
        return x.dot(a_ * x) - 2.0 * b_.dot(x) + c_;
    }
    Vector gradient(const Vector& x) const {
        require_same_dim(x.size(), b_.size(), "quadratic argument");
        return 2.0 * (a_ * x - b_);
    }
    Matrix hessian(const Vector& /*x*/) const { return 2.0 * a_; }

    DeclaredConstants constants() const {
        DeclaredConstants k;
        if (lambda_min_a_ > 0) k.strong_convexity = 2.0 * lambda_min_a_;
        k.smoothness = 2.0 * lambda_max_a_;
        return k;
    }

    /// A⁻¹b; NotPositiveDefinite when A is singular.
    Vector unconstrained_minimizer() const { return cholesky_solve(a_, b_); }

    const Matrix& a() const { return a_; }
    const Vector& b() const { return b_; }
    double c() const { return c_; }
    bool isotropic() const { return isotropic_; }

    /// Gradient written as M x + g.
    Matrix gradient_matrix() const { return 2.0 * a_; }
    Vector gradient_offset() const { return -2.0 * b_; }

private:
    Matrix a_;
    Vector b_;
    double c_;
    double lambda_min_a_ = 0.0;
    double lambda_max_a_ = 0.0;
    bool isotropic_ = false;
};

// ---------------------------------------------------------------------------

namespace detail {
inline double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
inline double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}
} // namespace detail

/// Mini-batch regularized logistic loss
///   f(x) = (1/m) Σ log(1 + exp(−y_i z_iᵀx)) + (reg/2)‖x‖².
/// Rows of `features` are the z_i, labels are ±1.
class LogisticOracle {
public:
    LogisticOracle(Matrix features, Vector labels, double reg)
        : z_(std::move(features)), y_(std::move(labels)), reg_(reg) {
        require(z_.rows() >= 1, ErrorKind::InvalidArgument, "logistic batch must be nonempty");
        require_same_dim(z_.rows(), y_.size(), "logistic labels");
        require(reg_ > 0 && std::isfinite(reg_), ErrorKind::InvalidArgument, "logistic regularizer must be > 0");
        for (Eigen::Index i = 0; i < y_.size(); ++i)
            require(y_[i] == 1.0 || y_[i] == -1.0, ErrorKind::InvalidArgument, "labels must be +1 or -1");
        max_feature_norm_ = z_.rowwise().norm().maxCoeff();
    }

    int dim() const { return static_cast<int>(z_.cols()); }
    Eigen::Index batch_size() const { return z_.rows(); }

    double value(const Vector& x) const {
        require_same_dim(x.size(), z_.cols(), "logistic argument");
        const Vector margins = z_ * x;
        double s = 0.0;
        for (Eigen::Index i = 0; i < margins.size(); ++i) s += detail::softplus(-y_[i] * margins[i]);
        return s / static_cast<double>(margins.size()) + 0.5 * reg_ * x.squaredNorm();
    }

    Vector gradient(const Vector& x) const {
        require_same_dim(x.size(), z_.cols(), "logistic argument");
        const Vector margins = z_ * x;
        Vector w(margins.size());
        for (Eigen::Index i = 0; i < margins.size(); ++i) w[i] = -y_[i] * detail::sigmoid(-y_[i] * margins[i]);
        return z_.transpose() * w / static_cast<double>(margins.size()) + reg_ * x;
    }

    Matrix hessian(const Vector& x) const {
        require_same_dim(x.size(), z_.cols(), "logistic argument");
        const Vector margins = z_ * x;
        Vector w(margins.size());
        for (Eigen::Index i = 0; i < margins.size(); ++i) {
            const double s = detail::sigmoid(margins[i]);
            w[i] = s * (1.0 - s);
        }
        Matrix h = z_.transpose() * w.asDiagonal() * z_ / static_cast<double>(margins.size());
        h.diagonal().array() += reg_;
        return h;
    }

    /// L = reg + max_i ‖z_i‖²/4, the usual analytic bound.
    DeclaredConstants constants() const {
        DeclaredConstants k;
        k.strong_convexity = reg_;
        k.smoothness = reg_ + 0.25 * max_feature_norm_ * max_feature_norm_;
        return k;
    }

    const Matrix& features() const { return z_; }
    const Vector& labels() const { return y_; }
    double reg() const { return reg_; }
    double max_feature_norm() const { return max_feature_norm_; }

private:
    Matrix z_;
    Vector y_;
    double reg_;
    double max_feature_norm_ = 0.0;
};

// ---------------------------------------------------------------------------

/// f(x) = (Ex)ᵀ G (Ex) + bᵀx with G symmetric positive definite and E
/// possibly rank deficient, so the minimizer set can be a whole affine set
/// (intersected with the feasible set).
class SemiStrongOracle {
public:
    SemiStrongOracle(Matrix g_matrix, Matrix e, Vector b)
        : g_(std::move(g_matrix)), e_(std::move(e)), b_(std::move(b)) {
        require(g_.rows() == g_.cols(), ErrorKind::DimensionMismatch, "g_matrix must be square");
        require_same_dim(g_.rows(), e_.rows(), "E rows vs g_matrix");
        require_same_dim(e_.cols(), b_.size(), "E columns vs b");
        require(is_symmetric(g_), ErrorKind::InvalidArgument, "g_matrix must be symmetric");
        cholesky_factor(g_);
        hess_ = 2.0 * e_.transpose() * g_ * e_;
        hess_ = 0.5 * (hess_ + hess_.transpose());
        hess_pinv_ = symmetric_pinv(hess_);
        smoothness_ = std::max(0.0, symmetric_eigenvalues(hess_).maxCoeff());
        positive_curvature_ = smallest_positive_eigenvalue(hess_);

        const Vector residual = hess_ * (hess_pinv_ * b_) - b_;
        require(residual.norm() <= 1e-9 * (1.0 + b_.norm()), ErrorKind::MinimumNotAttained,
                "b has a component in the kernel of E; f is unbounded below along it");
        affine_point_ = -hess_pinv_ * b_;

        // Kernel spanned by coordinate axes: the columns of E that vanish.
        const int d = dim();
        const double scale = std::max(1.0, e_.cwiseAbs().maxCoeff());
        for (int j = 0; j < d; ++j) {
            if (e_.col(j).cwiseAbs().maxCoeff() <= 1e-14 * scale) free_coords_.push_back(j);
            else bound_coords_.push_back(j);
        }
        if (!bound_coords_.empty()) {
            Matrix sub(bound_coords_.size(), bound_coords_.size());
            for (std::size_t i = 0; i < bound_coords_.size(); ++i)
                for (std::size_t k = 0; k < bound_coords_.size(); ++k) sub(i, k) = hess_(bound_coords_[i], bound_coords_[k]);
            try {
                cholesky_factor(sub);
                axis_aligned_kernel_ = true;
            } catch (const Error&) {
                axis_aligned_kernel_ = false;
            }
        } else {
            axis_aligned_kernel_ = true;
        }
    }

    int dim() const { return static_cast<int>(b_.size()); }

    double value(const Vector& x) const {
        require_same_dim(x.size(), b_.size(), "semi-strong argument");
        const Vector ex = e_ * x;
        return ex.dot(g_ * ex) + b_.dot(x);
    }
    Vector gradient(const Vector& x) const {
        require_same_dim(x.size(), b_.size(), "semi-strong argument");
        return hess_ * x + b_;
    }
    Matrix hessian(const Vector& /*x*/) const { return hess_; }

    DeclaredConstants constants() const {
        DeclaredConstants k;
        k.smoothness = smoothness_;
        k.semi_strong = beta_;
        return k;
    }

    /// Some point of the unconstrained minimizer set {x : Hx = −b}.
    const Vector& affine_point() const { return affine_point_; }
    const Matrix& hessian_matrix() const { return hess_; }
    const Matrix& hessian_pinv() const { return hess_pinv_; }
    const Matrix& g_matrix() const { return g_; }
    const Matrix& e_matrix() const { return e_; }
    const Vector& b() const { return b_; }

    /// Smallest positive eigenvalue of the Hessian. Over the whole space, or
    /// over a box when the kernel is axis aligned, this is the exact
    /// semi-strong constant.
    double positive_curvature() const { return positive_curvature_; }
    bool axis_aligned_kernel() const { return axis_aligned_kernel_; }
    const std::vector<int>& free_coords() const { return free_coords_; }
    const std::vector<int>& bound_coords() const { return bound_coords_; }

    std::optional<double> beta() const { return beta_; }
    void set_beta(double beta) {
        require(beta > 0 && std::isfinite(beta), ErrorKind::InvalidArgument, "beta must be > 0");
        beta_ = beta;
    }

    Matrix gradient_matrix() const { return hess_; }
    Vector gradient_offset() const { return b_; }

private:
    Matrix g_;
    Matrix e_;
    Vector b_;
    Matrix hess_;
    Matrix hess_pinv_;
    Vector affine_point_;
    double smoothness_ = 0.0;
    double positive_curvature_ = 0.0;
    bool axis_aligned_kernel_ = false;
    std::vector<int> free_coords_;
    std::vector<int> bound_coords_;
    std::optional<double> beta_;
};

// ---------------------------------------------------------------------------

/// f(x) = xᵀAx − 2bᵀx + c − Σ_i log(d_i − a_iᵀx) on the open polyhedron
/// {x : a_iᵀx < d_i}. Self-concordant as a sum of a convex quadratic and
/// logarithms of affine functions. Rows of `barrier_normals` are the a_i.
class SelfConcordantOracle {
public:
    SelfConcordantOracle(Matrix a, Vector b, double c, Matrix barrier_normals, Vector barrier_offsets,
                         Vector interior_point)
        : a_(std::move(a)), b_(std::move(b)), c_(c), normals_(std::move(barrier_normals)),
          offsets_(std::move(barrier_offsets)), anchor_(std::move(interior_point)) {
        require(a_.rows() == a_.cols(), ErrorKind::DimensionMismatch, "A must be square");
        require_same_dim(a_.rows(), b_.size(), "self-concordant b");
        require_same_dim(normals_.rows(), offsets_.size(), "barrier offsets");
        require(normals_.rows() == 0 || normals_.cols() == b_.size(), ErrorKind::DimensionMismatch,
                "barrier normals dimension");
        require_same_dim(anchor_.size(), b_.size(), "interior point");
        require(is_symmetric(a_), ErrorKind::InvalidArgument, "A must be symmetric");
        a_ = 0.5 * (a_ + a_.transpose());
        const Vector ev = symmetric_eigenvalues(a_);
        require(ev.minCoeff() >= -1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff()), ErrorKind::InvalidArgument,
                "A must be PSD");
        require(in_domain(anchor_), ErrorKind::DomainViolation, "interior point is outside the barrier domain");
        cholesky_factor(hessian(anchor_));
    }

    int dim() const { return static_cast<int>(b_.size()); }

    Vector slacks(const Vector& x) const {
        if (normals_.rows() == 0) return Vector();
        return offsets_ - normals_ * x;
    }

    bool in_domain(const Vector& x) const {
        if (x.size() != b_.size() || !x.allFinite()) return false;
        const Vector s = slacks(x);
        return s.size() == 0 || s.minCoeff() > 0.0;
    }

    /// +∞ outside the domain.
    double value(const Vector& x) const {
        require_same_dim(x.size(), b_.size(), "self-concordant argument");
        const Vector s = slacks(x);
        if (s.size() > 0 && !(s.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
        double v = x.dot(a_ * x) - 2.0 * b_.dot(x) + c_;
        for (Eigen::Index i = 0; i < s.size(); ++i) v -= std::log(s[i]);
        return v;
    }

    Vector gradient(const Vector& x) const {
        const Vector s = checked_slacks(x);
        Vector g = 2.0 * (a_ * x - b_);
        if (s.size() > 0) g += normals_.transpose() * s.cwiseInverse();
        return g;
    }

    Matrix hessian(const Vector& x) const {
        const Vector s = checked_slacks(x);
        Matrix h = 2.0 * a_;
        if (s.size() > 0) h += normals_.transpose() * s.cwiseInverse().cwiseAbs2().asDiagonal() * normals_;
        return h;
    }

    /// Self-concordant losses need not be strongly convex or smooth.
    DeclaredConstants constants() const { return {}; }

    const Vector& interior_point() const { return anchor_; }
    const Matrix& a() const { return a_; }
    const Vector& b() const { return b_; }
    double c() const { return c_; }
    const Matrix& barrier_normals() const { return normals_; }
    const Vector& barrier_offsets() const { return offsets_; }

private:
    Vector checked_slacks(const Vector& x) const {
        require_same_dim(x.size(), b_.size(), "self-concordant argument");
        const Vector s = slacks(x);
        if (s.size() > 0 && !(s.minCoeff() > 0.0))
            throw Error(ErrorKind::DomainViolation, "point lies outside the barrier domain");
        return s;
    }

    Matrix a_;
    Vector b_;
    double c_;
    Matrix normals_;
    Vector offsets_;
    Vector anchor_;
};

} // namespace dynregret
