#pragma once

// Shared random-instance generators for the property tests.  Everything is
// seeded explicitly so failures reproduce.

#include <random>

#include <Eigen/Dense>

#include "defpair/core.hpp"
#include "defpair/matrix.hpp"

namespace testsupport {

using defpair::SymMatrix;

inline Eigen::MatrixXd rand_gaussian(std::mt19937_64& gen, Eigen::Index rows,
                                     Eigen::Index cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = nd(gen);
    return a;
}

/// Random SPD matrix with eigenvalues log-uniform in [1, cond].
inline SymMatrix rand_spd(std::mt19937_64& gen, Eigen::Index n, double cond = 100.0) {
    const Eigen::MatrixXd g = rand_gaussian(gen, n, n);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    std::uniform_real_distribution<double> ud(0.0, std::log(cond));
    Eigen::VectorXd lam(n);
    for (Eigen::Index i = 0; i < n; ++i) lam(i) = std::exp(ud(gen));
    return SymMatrix(q * lam.asDiagonal() * q.transpose());
}

/// Congruence perturbation deltaA = A^{1/2} S A^{1/2} with ||S||_2 drawn in
/// [0.2, 1] * etamax, so that measure(A, A + deltaA).eta == ||S||_2 exactly
/// (A^{-1/2} deltaA A^{-1/2} = S by construction).
inline SymMatrix congr_pert(std::mt19937_64& gen, const SymMatrix& a, double etamax) {
    const Eigen::Index n = a.n();
    Eigen::MatrixXd s = rand_gaussian(gen, n, n);
    s = 0.5 * (s + s.transpose()).eval();
    const Eigen::VectorXd ev = s.selfadjointView<Eigen::Lower>().eigenvalues();
    const double norm = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
    std::uniform_real_distribution<double> ud(0.2, 1.0);
    s *= ud(gen) * etamax / norm;
    const Eigen::MatrixXd ah = defpair::spd_sqrt(a).mat();
    return SymMatrix(ah * s * ah);
}

/// Random matrix with Euclidean-orthonormal columns.
inline Eigen::MatrixXd rand_orthonormal(std::mt19937_64& gen, Eigen::Index n,
                                        Eigen::Index k) {
    const Eigen::MatrixXd g = rand_gaussian(gen, n, k);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
}

}  // namespace testsupport
