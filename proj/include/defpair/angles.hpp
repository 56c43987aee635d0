#pragma once

// Exact sines of canonical angles between equal-dimension subspaces, in the
// Euclidean and in a weighted (M-) inner product, plus the triangular
// correction factor Y11 used when the scalar product itself is perturbed.
//
// Euclidean:  sines = singular values of (I - X X^T) Y for orthonormal X, Y.
// M-weighted: sines = singular values of M^{1/2} (I - X1 X1^T M) Y1 for
//             M-orthonormal X1, Y1.  The square root is never formed: with
//             M = L L^T and G = (I - X1 X1^T M) Y1,
//                 (L^T G)^T (L^T G) = G^T M G = (M^{1/2} G)^T (M^{1/2} G),
//             so sigma(L^T G) = sigma(M^{1/2} G) exactly.
// Corrected:  when the weight changes from M to Mtilde = M + deltaM, the
//             perturbed basis is re-orthogonalized against M through the
//             Cholesky factor Y11 of I - Xtilde1^T deltaM Xtilde1, and
//             sines = singular values of Xhat2^T M Xtilde1 Y11^{-T}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "defpair/core.hpp"
#include "defpair/errors.hpp"
#include "defpair/matrix.hpp"

namespace defpair {

struct AngleReport {
    Eigen::VectorXd sines;  ///< descending, each in [0, 1]
    double norm2 = 0.0;     ///< largest sine
    double normF = 0.0;     ///< Euclidean norm of the sine vector
    int k = 0;              ///< subspace dimension
};

namespace detail {

/// Builds an AngleReport from raw singular values: sorts descending, clips
/// the inevitable last-bit excess above 1 (the values are singular values
/// of a contraction, so anything beyond 1 + 1e-12 is a genuine error), and
/// pads with zeros up to k (a (n-k) x k product has only min(n-k, k)
/// nonzero sines).
inline AngleReport make_angle_report(Eigen::VectorXd s, int k) {
    std::sort(s.data(), s.data() + s.size(), std::greater<double>());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > 1.0 + 1e-12)
            throw Error("angle sines exceed 1 beyond tolerance: " + std::to_string(s(i)));
        s(i) = std::clamp(s(i), 0.0, 1.0);
    }
    AngleReport r;
    r.k = k;
    r.sines = Eigen::VectorXd::Zero(k);
    r.sines.head(s.size()) = s;
    r.norm2 = r.sines.size() ? r.sines(0) : 0.0;
    r.normF = r.sines.norm();
    return r;
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& g) {
    return Eigen::BDCSVD<Eigen::MatrixXd>(g).singularValues();
}

}  // namespace detail

/// Sines of the canonical angles between Ran(X) and Ran(Y) in the Euclidean
/// inner product; bases must be orthonormal within 1e-10.
inline AngleReport sin_theta_euclid(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols())
        throw DimensionMismatch("sin_theta_euclid: bases must have equal shapes");
    if (X.cols() < 1 || X.cols() > X.rows())
        throw DimensionMismatch("sin_theta_euclid: need 1 <= k <= n columns");
    const Eigen::Index k = X.cols();
    const auto near_id = [k](const Eigen::MatrixXd& b) {
        return ((b.transpose() * b) - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-10;
    };
    if (!near_id(X) || !near_id(Y))
        throw NotOrthonormal("sin_theta_euclid: basis fails orthonormality tolerance 1e-10");
    const Eigen::MatrixXd g = Y - X * (X.transpose() * Y);
    return detail::make_angle_report(detail::singular_values(g), static_cast<int>(k));
}

/// Sines of the canonical angles between Ran(X1) and Ran(Y1) in the inner
/// product generated by SPD M; bases must be M-orthonormal within 1e-8
/// (deliberately looser than construction accuracy so that decompositions
/// of mildly ill-conditioned weights pass).
inline AngleReport sin_theta_M(const Eigen::MatrixXd& X1, const Eigen::MatrixXd& Y1,
                               const SymMatrix& M) {
    if (X1.rows() != Y1.rows() || X1.cols() != Y1.cols())
        throw DimensionMismatch("sin_theta_M: bases must have equal shapes");
    if (X1.rows() != M.n())
        throw DimensionMismatch("sin_theta_M: basis rows must match M");
    const Eigen::Index k = X1.cols();
    if (k < 1 || k > X1.rows())
        throw DimensionMismatch("sin_theta_M: need 1 <= k <= n columns");
    const Eigen::MatrixXd l = cholesky(M);  // throws NotPositiveDefinite
    const auto near_id_m = [&](const Eigen::MatrixXd& b) {
        return ((b.transpose() * (M.mat() * b)) - Eigen::MatrixXd::Identity(k, k))
                   .cwiseAbs().maxCoeff() <= 1e-8;
    };
    if (!near_id_m(X1) || !near_id_m(Y1))
        throw NotMOrthonormal("sin_theta_M: basis fails M-orthonormality tolerance 1e-8");
    const Eigen::MatrixXd g = Y1 - X1 * (X1.transpose() * (M.mat() * Y1));
    return detail::make_angle_report(detail::singular_values(l.transpose() * g),
                                     static_cast<int>(k));
}

struct CholCorrection {
    Eigen::MatrixXd Y11;         ///< k x k lower triangular, Y11 Y11^T = I - Xtilde1^T deltaM Xtilde1
    bool appliedInverse = false; ///< false: Y11 stores the factor itself (its
                                 ///< inverse transpose is applied downstream)
};

/// Cholesky factor of the leading k x k block of I - Xtilde^T deltaM Xtilde.
/// Only the k x k block is ever formed (the full n x n matrix is never
/// needed by any downstream formula).  A failed factorization means the
/// weight perturbation is too large for the two-step framework.
inline CholCorrection chol_correction(const Eigen::MatrixXd& Xtilde, const SymMatrix& deltaM,
                                      int k) {
    if (Xtilde.rows() != deltaM.n())
        throw DimensionMismatch("chol_correction: Xtilde rows must match deltaM");
    if (k < 1 || k > Xtilde.cols())
        throw BadBlockSize("chol_correction: k must satisfy 1 <= k <= cols(Xtilde)");
    const Eigen::MatrixXd x1 = Xtilde.leftCols(k);
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(k, k) - x1.transpose() * (deltaM.mat() * x1);
    c = 0.5 * (c + c.transpose()).eval();
    const auto info = detail::potrf_lower(c);
    if (info > 0)
        throw CorrectionNotPD(
            "chol_correction: I - Xtilde1^T deltaM Xtilde1 is not positive definite "
            "(pivot " + std::to_string(info) + "); the weight perturbation is too large");
    return CholCorrection{c, false};
}

/// Sines of the canonical angles via the corrected product
/// Xhat2^T M Xtilde1 Y11^{-T}; the result is invariant under the choice of
/// square-root factor in the correction.
inline AngleReport sin_theta_M_corrected(const Eigen::MatrixXd& Xhat2, const SymMatrix& M,
                                         const Eigen::MatrixXd& Xtilde1,
                                         const CholCorrection& corr) {
    const Eigen::Index n = M.n();
    const Eigen::Index k = Xtilde1.cols();
    if (Xhat2.rows() != n || Xtilde1.rows() != n)
        throw DimensionMismatch("sin_theta_M_corrected: basis rows must match M");
    if (corr.Y11.rows() != k || corr.Y11.cols() != k)
        throw DimensionMismatch("sin_theta_M_corrected: correction factor is not k x k");
    const double dmax = corr.Y11.diagonal().cwiseAbs().maxCoeff();
    if (corr.Y11.diagonal().cwiseAbs().minCoeff() <= 1e-14 * dmax)
        throw SingularCorrection("sin_theta_M_corrected: Y11 is numerically singular");
    Eigen::MatrixXd t = Xhat2.transpose() * (M.mat() * Xtilde1);  // (n-k) x k
    // T Y11^{-T}: solve Y11 Z^T = T^T for Z^T
    Eigen::MatrixXd zt = t.transpose();
    corr.Y11.triangularView<Eigen::Lower>().solveInPlace(zt);
    return detail::make_angle_report(detail::singular_values(zt.transpose()),
                                     static_cast<int>(k));
}

/// M-orthonormalizes the columns of a full-column-rank basis B through the
/// Cholesky factor of its Gram matrix B^T M B (returns B R^{-T}).  Utility
/// shared by the experiment harness and the CLI, where bases produced under
/// one weight must be compared under another.
inline Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& B, const SymMatrix& M) {
    if (B.rows() != M.n())
        throw DimensionMismatch("m_orthonormalize: basis rows must match M");
    Eigen::MatrixXd gram = B.transpose() * (M.mat() * B);
    gram = 0.5 * (gram + gram.transpose()).eval();
    const auto info = detail::potrf_lower(gram);
    if (info > 0)
        throw NotPositiveDefinite(
            "m_orthonormalize: Gram matrix is not positive definite (rank-deficient basis?)",
            static_cast<int>(info));
    // B := B * R^{-T}  <=>  solve R B^T = old B^T
    Eigen::MatrixXd bt = B.transpose();
    gram.triangularView<Eigen::Lower>().solveInPlace(bt);
    return bt.transpose();
}

}  // namespace defpair
