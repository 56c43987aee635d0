#pragma once

// Dense symmetric-positive-definite kernels and simultaneous
// diagonalization of definite matrix pairs.
//
// A definite pair (H, M) with both matrices SPD admits a simultaneous
// diagonalization X^T H X = diag(lambda), X^T M X = I.  It is computed by
// reducing through the Cholesky factor of the inner-product matrix M:
//
//     M = L L^T,   B = L^{-1} H L^{-T},   B = U diag(lambda) U^T,
//     X = L^{-T} U.
//
// Eigenvalues are returned ascending; each eigenvector column is sign-fixed
// so its largest-magnitude component (first such index on ties) is
// positive, which makes repeated runs and golden files reproducible.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "defpair/detail/lapack.hpp"
#include "defpair/errors.hpp"
#include "defpair/matrix.hpp"

namespace defpair {

struct PairEigen {
    Eigen::MatrixXd X;       ///< columns are eigenvectors, X^T M X = I
    Eigen::VectorXd lambda;  ///< ascending eigenvalues, all > 0
    double residual = 0.0;   ///< max scaled residual over sampled columns
    Eigen::Index n() const { return lambda.size(); }
};

struct Partition {
    int k = 0;                     ///< selected block size, 1 <= k < n
    Eigen::MatrixXd X1, X2;        ///< first k / remaining n-k eigenvector columns
    Eigen::VectorXd Lambda1, Lambda2;  ///< matching eigenvalue groups
};

/// Smallest eigenvalue of A; a result <= 0 indicates A is not SPD.
inline double spd_check(const SymMatrix& A) {
    if (!A.mat().allFinite()) throw NonFinite("spd_check: non-finite entry");
    return detail::sym_eig_edge(A.mat(), /*smallest=*/true);
}

/// Lower Cholesky factor L with L L^T = A.  Diagonal inputs take an O(n)
/// fast path.  Throws NotPositiveDefinite with the 1-based pivot index on
/// failure.
inline Eigen::MatrixXd cholesky(const SymMatrix& A) {
    const Eigen::Index n = A.n();
    if (A.is_diagonal()) {
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = A(i, i);
            if (!(d > 0.0))
                throw NotPositiveDefinite(
                    "cholesky: non-positive pivot " + std::to_string(i + 1),
                    static_cast<int>(i + 1));
            l(i, i) = std::sqrt(d);
        }
        return l;
    }
    Eigen::MatrixXd l = A.mat();
    const auto info = detail::potrf_lower(l);
    if (info > 0)
        throw NotPositiveDefinite("cholesky: non-positive pivot " + std::to_string(info),
                                  static_cast<int>(info));
    return l;
}

namespace detail {

/// Shared eigendecomposition-based f(A) = V f(diag) V^T for SPD A, with the
/// definiteness tolerance tol_pd = 1e-14 * ||A||_2.
template <typename Fn>
inline SymMatrix spd_eig_fn(const SymMatrix& A, Fn&& f, const char* who) {
    EigResult e = sym_eig(A.mat());
    const Eigen::Index n = A.n();
    const double norm2 = std::max(std::abs(e.values(0)), std::abs(e.values(n - 1)));
    if (e.values(0) <= 1e-14 * norm2)
        throw NotPositiveDefinite(std::string(who) + ": smallest eigenvalue " +
                                  std::to_string(e.values(0)) + " below definiteness tolerance");
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = f(e.values(i));
    Eigen::MatrixXd r = e.vectors * d.asDiagonal() * e.vectors.transpose();
    return SymMatrix(r);
}

}  // namespace detail

/// Principal symmetric square root of an SPD matrix.
inline SymMatrix spd_sqrt(const SymMatrix& A) {
    return detail::spd_eig_fn(A, [](double x) { return std::sqrt(x); }, "spd_sqrt");
}

/// Inverse of the principal square root of an SPD matrix.
inline SymMatrix spd_inv_sqrt(const SymMatrix& A) {
    return detail::spd_eig_fn(A, [](double x) { return 1.0 / std::sqrt(x); }, "spd_inv_sqrt");
}

namespace detail {

/// Applies the sign convention: the largest-magnitude component of each
/// column (first index on ties) is made positive.
inline void fix_column_signs(Eigen::MatrixXd& x) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        Eigen::Index arg = 0;
        double best = std::abs(x(0, j));
        for (Eigen::Index i = 1; i < x.rows(); ++i) {
            const double v = std::abs(x(i, j));
            if (v > best) { best = v; arg = i; }
        }
        if (x(arg, j) < 0.0) x.col(j) = -x.col(j);
    }
}

}  // namespace detail

/// Simultaneous diagonalization of the definite pair (H, M); see the
/// header comment for the reduction route and conventions.  Throws
/// NotPositiveDefinite when M fails its Cholesky factorization or when the
/// computed spectrum is not positive (H not SPD given SPD M), and
/// ConvergenceFailure from the inner symmetric eigensolver.
inline PairEigen pair_eigendecompose(const SymMatrix& H, const SymMatrix& M) {
    if (H.n() != M.n())
        throw DimensionMismatch("pair_eigendecompose: H and M sizes differ");
    const Eigen::Index n = H.n();

    Eigen::MatrixXd l;
    try {
        l = cholesky(M);
    } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(std::string("pair_eigendecompose: M is not SPD (") +
                                  e.what() + ")", e.pivot);
    }

    // B = L^{-1} H L^{-T}, formed with triangular solves (or plain scaling
    // when M is diagonal) and re-symmetrized to kill roundoff asymmetry.
    Eigen::MatrixXd b = H.mat();
    const bool diag_m = M.is_diagonal();
    if (diag_m) {
        Eigen::VectorXd inv_sqrt_d = l.diagonal().cwiseInverse();
        b = inv_sqrt_d.asDiagonal() * b * inv_sqrt_d.asDiagonal();
    } else {
        l.triangularView<Eigen::Lower>().solveInPlace(b);
        Eigen::MatrixXd bt = b.transpose();
        l.triangularView<Eigen::Lower>().solveInPlace(bt);
        b = bt;
    }
    b = 0.5 * (b + b.transpose()).eval();

    detail::EigResult e = detail::sym_eig(b);

    PairEigen r;
    r.lambda = e.values;
    if (diag_m) {
        Eigen::VectorXd inv_sqrt_d = l.diagonal().cwiseInverse();
        r.X = inv_sqrt_d.asDiagonal() * e.vectors;
    } else {
        r.X = l.transpose().triangularView<Eigen::Upper>().solve(e.vectors);
    }
    if (r.lambda(0) <= 0.0)
        throw NotPositiveDefinite(
            "pair_eigendecompose: pair spectrum reaches " + std::to_string(r.lambda(0)) +
            "; H is not positive definite");
    detail::fix_column_signs(r.X);

    // Sampled scaled residual ||H x - lambda M x|| / ((||H||_F + |lambda| ||M||_F) ||x||)
    // over up to 8 columns spread across the spectrum.
    const double hn = H.mat().norm(), mn = M.mat().norm();
    const Eigen::Index samples = std::min<Eigen::Index>(n, 8);
    double worst = 0.0;
    for (Eigen::Index s = 0; s < samples; ++s) {
        const Eigen::Index j = (samples == 1) ? 0 : s * (n - 1) / (samples - 1);
        const Eigen::VectorXd x = r.X.col(j);
        const double num = (H.mat() * x - r.lambda(j) * (M.mat() * x)).norm();
        const double den = (hn + std::abs(r.lambda(j)) * mn) * x.norm();
        if (den > 0.0) worst = std::max(worst, num / den);
    }
    r.residual = worst;
    return r;
}

/// Splits a PairEigen into the k-smallest block (X1, Lambda1) and the rest.
inline Partition partition(const PairEigen& E, int k) {
    const Eigen::Index n = E.n();
    if (k < 1 || k >= n)
        throw BadBlockSize("partition: k must satisfy 1 <= k < n, got k=" +
                           std::to_string(k) + ", n=" + std::to_string(n));
    Partition p;
    p.k = k;
    p.X1 = E.X.leftCols(k);
    p.X2 = E.X.rightCols(n - k);
    p.Lambda1 = E.lambda.head(k);
    p.Lambda2 = E.lambda.tail(n - k);
    return p;
}

}  // namespace defpair
