#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dynregret/errors.hpp"
#include "dynregret/rng.hpp"

namespace dynregret {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Cholesky pivots at or below this are treated as a degenerate matrix.
inline constexpr double kPivotThreshold = 1e-12;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline bool is_symmetric(const Matrix& a, double rel_tol = 1e-12) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    require(a == b, ErrorKind::DimensionMismatch,
            std::string(what) + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

/// Lower-triangular L with A = L Lᵀ. Throws NotPositiveDefinite when a
/// pivot drops to kPivotThreshold or below.
inline Matrix cholesky_factor(const Matrix& a) {
    require(a.rows() == a.cols(), ErrorKind::DimensionMismatch, "cholesky of non-square matrix");
    const Eigen::Index n = a.rows();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw Error(ErrorKind::NotPositiveDefinite, "cholesky of non-symmetric matrix");
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > kPivotThreshold)) {
            throw Error(ErrorKind::NotPositiveDefinite,
                        "cholesky pivot " + std::to_string(j) + " = " + std::to_string(pivot));
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

inline Vector cholesky_solve_factored(const Matrix& l, const Vector& b) {
    require_same_dim(l.rows(), b.size(), "cholesky_solve dimension");
    Vector y = l.triangularView<Eigen::Lower>().solve(b);
    return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

inline Vector cholesky_solve(const Matrix& a, const Vector& b) {
    require_same_dim(a.rows(), b.size(), "cholesky_solve dimension");
    return cholesky_solve_factored(cholesky_factor(a), b);
}

inline Vector symmetric_eigenvalues(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

/// Largest generalized eigenvalue of the pencil (A, B), i.e.
/// λ_max(B^{-1/2} A B^{-1/2}). Both matrices must be positive definite.
/// B is whitened through its Cholesky factor, which yields the same
/// spectrum as the symmetric square-root form.
inline double max_generalized_eig(const Matrix& a, const Matrix& b) {
    require_same_dim(a.rows(), b.rows(), "max_generalized_eig dimension");
    cholesky_factor(a); // positive-definiteness check on A
    const Matrix l = cholesky_factor(b);
    const Matrix linv_a = l.triangularView<Eigen::Lower>().solve(a);
    const Matrix whitened = l.triangularView<Eigen::Lower>().solve(linv_a.transpose());
    return symmetric_eigenvalues(whitened).maxCoeff();
}

/// Smallest generalized eigenvalue of (A, B).
inline double min_generalized_eig(const Matrix& a, const Matrix& b) {
    return 1.0 / max_generalized_eig(b, a);
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix; eigenvalues
/// below rel_tol·λ_max are treated as zero.
inline Matrix symmetric_pinv(const Matrix& a, double rel_tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.transpose()));
    const Vector& ev = solver.eigenvalues();
    const double cutoff = rel_tol * std::max(1e-300, ev.cwiseAbs().maxCoeff());
    Vector inv = Vector::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev[i] > cutoff) inv[i] = 1.0 / ev[i];
    return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().transpose();
}

/// Smallest eigenvalue above rel_tol·λ_max of a symmetric PSD matrix.
inline double smallest_positive_eigenvalue(const Matrix& a, double rel_tol = 1e-10) {
    const Vector ev = symmetric_eigenvalues(a);
    const double cutoff = rel_tol * std::max(1e-300, ev.cwiseAbs().maxCoeff());
    double best = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev[i] > cutoff && (best == 0.0 || ev[i] < best)) best = ev[i];
    return best;
}

/// Haar-ish random orthogonal matrix from the QR factorization of a
/// Gaussian matrix with the sign convention fixed by diag(R) > 0.
inline Matrix random_rotation(SeededRng& rng, int d) {
    Matrix g(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
}

/// Symmetric matrix with eigenvalues drawn uniformly from [lo, hi]; the
/// extremes lo and hi are always included when d ≥ 2.
inline Matrix random_spd(SeededRng& rng, int d, double lo, double hi) {
    Vector ev(d);
    for (int i = 0; i < d; ++i) ev[i] = rng.uniform(lo, hi);
    ev[0] = lo;
    if (d >= 2) ev[1] = hi;
    const Matrix q = random_rotation(rng, d);
    Matrix a = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
}

} // namespace dynregret
