#pragma once

// Lanczos-based extreme-eigenvalue and spectral-norm estimators for the
// large-n code paths, where a full dense eigendecomposition per query would
// dominate the runtime.  All operators are passed as matvec callables, so
// congruence-transformed operators (L^{-1} A L^{-T}), Gram operators
// (K^T K), and shifted/inverted operators can be handled without forming
// them.  Desk-scale sizes are assumed: the Krylov basis is kept and fully
// reorthogonalized, which makes the recurrence numerically robust at the
// cost of O(iters * n) memory.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "defpair/detail/lapack.hpp"
#include "defpair/errors.hpp"

namespace defpair::detail {

using MatVec = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Deterministic pseudo-random start vector (splitmix64 bits mapped to
/// [-1, 1]); keeps Lanczos runs reproducible without a global RNG.
inline Eigen::VectorXd lanczos_start(Eigen::Index n, std::uint64_t seed = 0x2545F4914F6CDD1DULL) {
    Eigen::VectorXd v(n);
    std::uint64_t x = seed;
    for (Eigen::Index i = 0; i < n; ++i) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
        v(i) = 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
    }
    return v;
}

struct LanczosOptions {
    int max_iters = 300;
    double tol = 1e-13;            // relative Ritz-value stagnation tolerance
    Eigen::VectorXd start;         // optional warm start (empty = deterministic default)
};

struct LanczosResult {
    double value = 0.0;            // converged extreme Ritz value
    Eigen::VectorXd vector;        // corresponding Ritz vector
    bool converged = false;
};

/// Extreme (algebraically largest or smallest) eigenvalue of a symmetric
/// operator given through its matvec.  Full reorthogonalization; stops when
/// the target Ritz value stagnates relative to the operator scale and its
/// residual bound beta * |s_last| is below tol * scale.
inline LanczosResult lanczos_extreme(const MatVec& apply, Eigen::Index n, bool largest,
                                     const LanczosOptions& opt = {}) {
    const int maxit = std::min<int>(opt.max_iters, static_cast<int>(n));
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(static_cast<size_t>(maxit));
    std::vector<double> alpha, beta;

    Eigen::VectorXd v = opt.start.size() == n ? opt.start : lanczos_start(n);
    v.normalize();
    Eigen::VectorXd w(n);
    double prev_ritz = 0.0;
    double scale = 0.0;
    LanczosResult out;

    for (int j = 0; j < maxit; ++j) {
        basis.push_back(v);
        apply(v, w);
        const double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v;
        if (j > 0) w -= beta.back() * basis[static_cast<size_t>(j) - 1];
        // full reorthogonalization (twice is enough)
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q.dot(w) * q;
        const double b = w.norm();

        // Ritz values of the tridiagonal section
        const int m = j + 1;
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) t(i, i) = alpha[static_cast<size_t>(i)];
        for (int i = 0; i + 1 < m; ++i)
            t(i + 1, i) = t(i, i + 1) = beta[static_cast<size_t>(i)];
        EigResult te = sym_eig(t, /*want_vectors=*/true);
        const int pick = largest ? m - 1 : 0;
        const double ritz = te.values(pick);
        scale = std::max({scale, std::abs(te.values(0)), std::abs(te.values(m - 1))});
        const double resid = b * std::abs(te.vectors(m - 1, pick));
        const bool stag = j > 2 && std::abs(ritz - prev_ritz) <= opt.tol * std::max(scale, 1e-300);
        if ((resid <= opt.tol * std::max(scale, 1e-300) && j > 1) || stag || b == 0.0 || m == n) {
            out.value = ritz;
            out.vector = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i) out.vector += te.vectors(i, pick) * basis[static_cast<size_t>(i)];
            out.vector.normalize();
            out.converged = true;
            return out;
        }
        prev_ritz = ritz;
        beta.push_back(b);
        v = w / b;
    }
    // Did not hit the tolerance: return the best estimate anyway; callers
    // that need certainty check `converged`.
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = alpha[static_cast<size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) t(i + 1, i) = t(i, i + 1) = beta[static_cast<size_t>(i)];
    EigResult te = sym_eig(t, true);
    const int pick = largest ? m - 1 : 0;
    out.value = te.values(pick);
    out.vector = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) out.vector += te.vectors(i, pick) * basis[static_cast<size_t>(i)];
    out.vector.normalize();
    out.converged = false;
    return out;
}

/// Dimension threshold below which dense LAPACK kernels are used directly.
inline constexpr Eigen::Index kDenseCutoff = 512;

/// Both extreme eigenvalues (lo, hi) of a formed dense symmetric matrix.
inline std::pair<double, double> sym_extreme_eigs(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    if (n <= kDenseCutoff) {
        const Eigen::VectorXd w = sym_eig_values(a);
        return {w(0), w(n - 1)};
    }
    MatVec mv = [&a](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = a.selfadjointView<Eigen::Lower>() * x; };
    const double hi = lanczos_extreme(mv, n, /*largest=*/true).value;
    const double lo = lanczos_extreme(mv, n, /*largest=*/false).value;
    return {lo, hi};
}

/// Spectral norm (largest singular value) of a formed dense rectangular
/// matrix, via the largest eigenvalue of the Gram operator K^T K.
inline double spectral_norm(const Eigen::MatrixXd& k) {
    const Eigen::Index rows = k.rows(), cols = k.cols();
    if (std::min(rows, cols) == 0) return 0.0;
    if (std::max(rows, cols) <= kDenseCutoff) {
        Eigen::MatrixXd gram;
        if (cols <= rows) gram.noalias() = k.transpose() * k;
        else gram.noalias() = k * k.transpose();
        const double lam = sym_eig_edge(gram, /*smallest=*/false);
        return std::sqrt(std::max(0.0, lam));
    }
    Eigen::VectorXd tmp(rows);
    MatVec mv = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        tmp.noalias() = k * x;
        y.noalias() = k.transpose() * tmp;
    };
    const double lam = lanczos_extreme(mv, cols, /*largest=*/true).value;
    return std::sqrt(std::max(0.0, lam));
}

}  // namespace defpair::detail
