#pragma once

// Dense real symmetric matrix carrier.
//
// SymMatrix is the universal value type for the weighting matrices H, M,
// their perturbations deltaH, deltaM, and the perturbed matrices
// Htilde = H + deltaH, Mtilde = M + deltaM.  Symmetry is enforced at
// construction: the lower triangle is the source of truth and is mirrored
// onto the upper triangle, so entries (i,j) and (j,i) are bit-identical.
// All entries must be finite.

#include <Eigen/Dense>

#include "defpair/errors.hpp"

namespace defpair {

class SymMatrix {
public:
    SymMatrix() = default;

    /// Builds a symmetric matrix from a square dense matrix.  The lower
    /// triangle of `a` is taken as the source of truth and mirrored; an
    /// asymmetric upper triangle is silently discarded (callers that need
    /// a symmetry check, e.g. the Matrix Market reader, perform it before
    /// constructing).  Throws DimensionMismatch for non-square or empty
    /// input and NonFinite if any used entry is NaN or infinite.
    explicit SymMatrix(const Eigen::MatrixXd& a) : a_(a) {
        if (a_.rows() != a_.cols() || a_.rows() == 0)
            throw DimensionMismatch("SymMatrix: input must be square and non-empty");
        a_.triangularView<Eigen::StrictlyUpper>() = a_.transpose();
        if (!a_.allFinite())
            throw NonFinite("SymMatrix: non-finite entry");
    }

    static SymMatrix identity(Eigen::Index n) {
        return SymMatrix(Eigen::MatrixXd::Identity(n, n));
    }

    static SymMatrix zero(Eigen::Index n) {
        return SymMatrix(Eigen::MatrixXd::Zero(n, n));
    }

    static SymMatrix diagonal(const Eigen::VectorXd& d) {
        return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
    }

    Eigen::Index n() const { return a_.rows(); }

    const Eigen::MatrixXd& mat() const { return a_; }

    double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }

    /// True when every off-diagonal entry is exactly zero (enables the
    /// O(n) Cholesky/scaling fast paths for diagonal weights).
    bool is_diagonal() const {
        for (Eigen::Index j = 0; j < a_.cols(); ++j)
            for (Eigen::Index i = j + 1; i < a_.rows(); ++i)
                if (a_(i, j) != 0.0) return false;
        return true;
    }

    /// Largest absolute entry; used to scale tolerances.
    double max_abs() const { return a_.cwiseAbs().maxCoeff(); }

    friend SymMatrix operator+(const SymMatrix& x, const SymMatrix& y) {
        require_same_dim(x, y, "operator+");
        return SymMatrix(Eigen::MatrixXd(x.a_ + y.a_));
    }

    friend SymMatrix operator-(const SymMatrix& x, const SymMatrix& y) {
        require_same_dim(x, y, "operator-");
        return SymMatrix(Eigen::MatrixXd(x.a_ - y.a_));
    }

    friend SymMatrix operator*(double s, const SymMatrix& x) {
        return SymMatrix(Eigen::MatrixXd(s * x.a_));
    }

private:
    static void require_same_dim(const SymMatrix& x, const SymMatrix& y, const char* op) {
        if (x.n() != y.n())
            throw DimensionMismatch(std::string("SymMatrix::") + op + ": dimension mismatch");
    }

    Eigen::MatrixXd a_;
};

}  // namespace defpair
