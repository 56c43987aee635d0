#pragma once

// Relative perturbation measures between SPD matrices, derived inequalities
// for inverses, the equivalent-diagonal (mass-lumping) construction, and a
// reproducible entrywise-relative random perturbation generator.
//
// For SPD A and Atilde the measures are
//
//     eta  = || A^{-1/2} (A - Atilde) A^{-1/2} ||_2
//     Psi  = || A^{-1/2} (A - Atilde) Atilde^{-1/2} ||      (2 or Frobenius)
//     Phi  = || A^{-1/2} (A - Atilde) A^{-1/2} ||           (2 or Frobenius)
//
// so phi2 == eta by definition, and eta < 1 implies Psi_2 <= eta/sqrt(1-eta).
//
// No matrix square root is ever formed: with Cholesky factors A = La La^T,
// Atilde = Lt Lt^T, the polar decomposition La = A^{1/2} Q (Q orthogonal)
// gives
//
//     La^{-1} (A - Atilde) La^{-T} = Q^T [A^{-1/2} (A - Atilde) A^{-1/2}] Q
//     La^{-1} (A - Atilde) Lt^{-T} = Qa^T [A^{-1/2} (A - Atilde) Atilde^{-1/2}] Qt
//
// which have identical eigenvalues/singular values, hence identical
// unitarily invariant norms, at a third of the eigendecomposition cost.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "defpair/core.hpp"
#include "defpair/detail/lanczos.hpp"
#include "defpair/errors.hpp"
#include "defpair/matrix.hpp"

namespace defpair {

struct RelMeasure {
    double eta = 0.0;   ///< spectral-norm symmetric relative distance
    double psi2 = 0.0;  ///< mixed congruence, spectral norm
    double psiF = 0.0;  ///< mixed congruence, Frobenius norm
    double phi2 = 0.0;  ///< == eta
    double phiF = 0.0;  ///< symmetric congruence, Frobenius norm
};

namespace detail {

inline bool is_diagonal_lower(const Eigen::MatrixXd& l) {
    for (Eigen::Index j = 0; j < l.cols(); ++j)
        for (Eigen::Index i = j + 1; i < l.rows(); ++i)
            if (l(i, j) != 0.0) return false;
    return true;
}

/// l_left^{-1} * s * l_right^{-T} for lower-triangular factors, collapsing
/// to row/column scaling when a factor is diagonal.
inline Eigen::MatrixXd two_sided_solve(const Eigen::MatrixXd& l_left,
                                       const Eigen::MatrixXd& l_right,
                                       Eigen::MatrixXd s) {
    if (is_diagonal_lower(l_left))
        s = l_left.diagonal().cwiseInverse().asDiagonal() * s;
    else
        l_left.triangularView<Eigen::Lower>().solveInPlace(s);
    if (is_diagonal_lower(l_right)) {
        s = s * l_right.diagonal().cwiseInverse().asDiagonal();
    } else {
        Eigen::MatrixXd st = s.transpose();
        l_right.triangularView<Eigen::Lower>().solveInPlace(st);
        s = st.transpose();
    }
    return s;
}

}  // namespace detail

/// All five relative measures between SPD matrices A and Atilde.
inline RelMeasure measure(const SymMatrix& A, const SymMatrix& Atilde) {
    if (A.n() != Atilde.n())
        throw DimensionMismatch("measure: size mismatch");
    Eigen::MatrixXd la, lt;
    try { la = cholesky(A); } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(std::string("measure: A is not SPD (") + e.what() + ")", e.pivot);
    }
    try { lt = cholesky(Atilde); } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(std::string("measure: Atilde is not SPD (") + e.what() + ")", e.pivot);
    }
    const Eigen::MatrixXd delta = A.mat() - Atilde.mat();

    Eigen::MatrixXd k1 = detail::two_sided_solve(la, la, delta);
    k1 = 0.5 * (k1 + k1.transpose()).eval();
    const auto [lo, hi] = detail::sym_extreme_eigs(k1);

    RelMeasure r;
    r.eta = std::max(std::abs(lo), std::abs(hi));
    r.phi2 = r.eta;
    r.phiF = k1.norm();

    const Eigen::MatrixXd k2 = detail::two_sided_solve(la, lt, delta);
    r.psi2 = detail::spectral_norm(k2);
    r.psiF = k2.norm();
    return r;
}

/// The chain constant Psi <= eta/sqrt(1-eta), defined for 0 <= eta < 1.
inline double psi_bound_from_eta(double eta) {
    if (!(eta >= 0.0 && eta < 1.0))
        throw EtaOutOfRange("psi_bound_from_eta: eta must lie in [0,1), got " + std::to_string(eta));
    return eta / std::sqrt(1.0 - eta);
}

/// Relative distance of the inverses: eta_{A^{-1}} <= eta/(1-eta), with
/// equality exactly when the extreme congruence eigenvalue is attained.
inline double eta_of_inverse(double eta) {
    if (!(eta >= 0.0 && eta < 1.0))
        throw EtaOutOfRange("eta_of_inverse: eta must lie in [0,1), got " + std::to_string(eta));
    return eta / (1.0 - eta);
}

struct LumpResult {
    SymMatrix Mtilde;  ///< scaled copy of D generating an equivalent inner product
    double eta = 0.0;  ///< (delta1 - delta0)/(delta1 + delta0)
};

/// Equivalent-diagonal construction: with delta0, delta1 the extreme
/// eigenvalues of D^{-1/2} M D^{-1/2}, the matrix Mtilde = (delta0+delta1)/2 * D
/// satisfies |x^T (M - Mtilde) x| <= eta * x^T Mtilde x with
/// eta = (delta1-delta0)/(delta1+delta0); the bound is attained at the
/// extreme eigenvectors.  The guarantee is re-verified numerically.
inline LumpResult lump(const SymMatrix& M, const SymMatrix& D) {
    if (M.n() != D.n()) throw DimensionMismatch("lump: size mismatch");
    const Eigen::MatrixXd ld = cholesky(D);
    Eigen::MatrixXd t = detail::two_sided_solve(ld, ld, M.mat());
    t = 0.5 * (t + t.transpose()).eval();
    const auto [d0, d1] = detail::sym_extreme_eigs(t);
    if (!(d0 > 0.0))
        throw NotPositiveDefinite("lump: M is not positive definite in the D inner product");

    LumpResult r;
    r.Mtilde = (0.5 * (d0 + d1)) * D;
    r.eta = (d1 - d0) / (d1 + d0);

    // spec-level guarantee check (cannot fail mathematically)
    const Eigen::MatrixXd lm = cholesky(r.Mtilde);
    Eigen::MatrixXd c = detail::two_sided_solve(lm, lm, M.mat() - r.Mtilde.mat());
    c = 0.5 * (c + c.transpose()).eval();
    const auto [clo, chi] = detail::sym_extreme_eigs(c);
    if (std::max(std::abs(clo), std::abs(chi)) > r.eta + 1e-12)
        throw Error("lump: internal consistency check failed");
    return r;
}

/// Symmetric random perturbation with |deltaA_ij| <= etaRel * |A_ij| and the
/// sparsity pattern of A preserved (zeros remain exactly zero).  One draw of
/// the 64-bit generator is consumed per nonzero lower-triangle entry in
/// row-major order; the raw bits are mapped to [-1, 1] explicitly, so a given
/// seed yields the same perturbation on every platform.
inline SymMatrix entrywise_perturb(const SymMatrix& A, double etaRel, std::uint64_t seed) {
    if (!(etaRel >= 0.0) || !std::isfinite(etaRel))
        throw NonFinite("entrywise_perturb: etaRel must be finite and >= 0");
    const Eigen::Index n = A.n();
    std::mt19937_64 gen(seed);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double a = A(i, j);
            if (a == 0.0) continue;
            const double u01 = static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0,1)
            const double u = 2.0 * u01 - 1.0;                                 // [-1,1)
            d(i, j) = d(j, i) = etaRel * std::abs(a) * u;
        }
    }
    return SymMatrix(d);
}

struct SpdPerturbation {
    SymMatrix delta;             ///< accepted perturbation
    std::uint64_t seedUsed = 0;  ///< seed that produced it
    int attempts = 1;            ///< draws needed (1 = first try)
};

/// entrywise_perturb with an SPD guarantee on A + delta: if a sample
/// destroys definiteness (possible though unlikely at small etaRel), the
/// seed is advanced by one and the draw repeated, up to 8 attempts, after
/// which the failure is reported loudly.
inline SpdPerturbation entrywise_perturb_spd(const SymMatrix& A, double etaRel,
                                             std::uint64_t seed) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
        SymMatrix d = entrywise_perturb(A, etaRel, s);
        Eigen::MatrixXd trial = A.mat() + d.mat();
        if (detail::is_diagonal_lower(trial) ? trial.diagonal().minCoeff() > 0.0
                                             : detail::potrf_lower(trial) == 0)
            return SpdPerturbation{std::move(d), s, attempt + 1};
    }
    throw NotPositiveDefinite(
        "entrywise_perturb_spd: 8 consecutive samples destroyed positive definiteness");
}

}  // namespace defpair
