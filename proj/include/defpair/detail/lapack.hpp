#pragma once

// Thin LAPACKE bindings for the dense symmetric kernels.
//
// dsyevr is used for all symmetric eigendecompositions (O(n) workspace, in
// contrast to the divide-and-conquer driver whose workspace is ~2n^2
// doubles and hostile at n ~ 5500), dpotrf for Cholesky factorizations.
// Everything is column-major, matching Eigen's default storage.

#include <lapacke.h>

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "defpair/errors.hpp"

namespace defpair::detail {

struct EigResult {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns match values; empty when not requested
};

/// Full symmetric eigendecomposition (ascending values) of the lower
/// triangle of `a`.  Throws ConvergenceFailure on solver failure.
inline EigResult sym_eig(const Eigen::MatrixXd& a, bool want_vectors = true) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd work = a;  // dsyevr overwrites its input
    EigResult r;
    r.values.resize(n);
    if (want_vectors) r.vectors.resize(n, n);
    std::vector<lapack_int> isuppz(static_cast<size_t>(2 * std::max<lapack_int>(1, n)));
    lapack_int m = 0;
    const double abstol = LAPACKE_dlamch('S');  // most accurate dsyevr mode
    const lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'A', 'L', n, work.data(), n,
        0.0, 0.0, 0, 0, abstol, &m, r.values.data(),
        want_vectors ? r.vectors.data() : nullptr, n, isuppz.data());
    if (info != 0)
        throw ConvergenceFailure("sym_eig: dsyevr failed with info=" + std::to_string(info));
    if (m != n)
        throw ConvergenceFailure("sym_eig: dsyevr returned " + std::to_string(m) +
                                 " of " + std::to_string(n) + " eigenvalues");
    return r;
}

/// Eigenvalues only, ascending.
inline Eigen::VectorXd sym_eig_values(const Eigen::MatrixXd& a) {
    return sym_eig(a, /*want_vectors=*/false).values;
}

/// Selected extreme eigenvalue without vectors: index 1 (smallest) or
/// n (largest) in LAPACK's 1-based ascending convention.
inline double sym_eig_edge(const Eigen::MatrixXd& a, bool smallest) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd work = a;
    Eigen::VectorXd w(n);
    std::vector<lapack_int> isuppz(static_cast<size_t>(2 * std::max<lapack_int>(1, n)));
    lapack_int m = 0;
    const lapack_int idx = smallest ? 1 : n;
    const double abstol = LAPACKE_dlamch('S');
    const lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, 'N', 'I', 'L', n, work.data(), n,
        0.0, 0.0, idx, idx, abstol, &m, w.data(), nullptr, n, isuppz.data());
    if (info != 0 || m < 1)
        throw ConvergenceFailure("sym_eig_edge: dsyevr failed with info=" + std::to_string(info));
    return w(0);
}

/// In-place lower Cholesky factorization attempt.  Returns 0 on success or
/// the 1-based index of the first non-positive pivot; the upper triangle of
/// `a` is left untouched by LAPACK and is zeroed here so the result can be
/// used directly as a lower-triangular factor.
inline lapack_int potrf_lower(Eigen::MatrixXd& a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    const lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n);
    if (info < 0)
        throw Error("potrf_lower: illegal argument " + std::to_string(-info));
    if (info == 0)
        a.triangularView<Eigen::StrictlyUpper>().setZero();
    return info;
}

}  // namespace defpair::detail
