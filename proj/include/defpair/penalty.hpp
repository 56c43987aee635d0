#pragma once

// Large-coupling penalty families H_kappa = Hb + kappa * He, their block
// structure relative to the splitting Ker(He) (+) Ker(He)^perp, the relative
// measure eta(kappa) of H_kappa against its block diagonal, the five
// definite-pair variants sharing one eigenvector set, and the
// effectivity-quotient sweep that compares the exact weighted angle of the
// bounded eigenvalue branch (Left) against the two-step bound evaluated
// from block data (Right) across a kappa grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "defpair/angles.hpp"
#include "defpair/bounds.hpp"
#include "defpair/core.hpp"
#include "defpair/errors.hpp"
#include "defpair/matrix.hpp"
#include "defpair/perturb.hpp"

namespace defpair {

/// The five definite pairs built from one SPD matrix: (H, I), (I, H),
/// (H^-1, H), (H^-1, I), (I, H^-1).  All share H's eigenvectors; only the
/// eigenvalue map and the natural inner product differ.
enum class PairVariantTag { HI, IH, HinvH, HinvI, IHinv };

enum class ReferenceSubspace { Limit, PerturbedPair };

inline const char* to_string(PairVariantTag v) {
    switch (v) {
        case PairVariantTag::HI: return "hi";
        case PairVariantTag::IH: return "ih";
        case PairVariantTag::HinvH: return "hinvh";
        case PairVariantTag::HinvI: return "hinvi";
        default: return "ihinv";
    }
}

inline PairVariantTag parse_variant(const std::string& s) {
    if (s == "hi") return PairVariantTag::HI;
    if (s == "ih") return PairVariantTag::IH;
    if (s == "hinvh") return PairVariantTag::HinvH;
    if (s == "hinvi") return PairVariantTag::HinvI;
    if (s == "ihinv") return PairVariantTag::IHinv;
    throw PreconditionViolation("unknown pair variant '" + s +
                                "' (expected hi|ih|hinvh|hinvi|ihinv)");
}

struct PenaltyFamily {
    SymMatrix Hb;              ///< SPD base matrix
    SymMatrix He;              ///< PSD penalty structure
    Eigen::Index kernelDim;    ///< dim Ker(He)
    std::vector<Eigen::Index> permutation;  ///< split position -> original coordinate
};

struct BlockForm {
    Eigen::MatrixXd Lb;   ///< kernel-block of H_kappa (kappa-independent)
    Eigen::MatrixXd Rb;   ///< coupling: complement rows x kernel columns
    Eigen::MatrixXd Wb;   ///< complement block including the kappa*He part
    SymMatrix Dkappa;     ///< block diagonal diag(Lb, Wb) in split coordinates
    double etaKappa = 0;  ///< || Dk^{-1/2} (Dk - Hk) Dk^{-1/2} ||_2
};

struct SweepResult {
    std::vector<double> kappaGrid;
    PairVariantTag variant = PairVariantTag::HI;
    NormKind boundKind = NormKind::Spectral;
    ReferenceSubspace reference = ReferenceSubspace::Limit;
    Eigen::Index k = 0;
    std::vector<double> left;       ///< exact weighted angle per kappa
    std::vector<double> right;      ///< bound per kappa
    std::vector<double> quotient;   ///< left/right; NaN sentinel on 0/0
    std::vector<std::string> flag;  ///< "ok" or a terse per-point refusal token
    double slopeLeft = std::numeric_limits<double>::quiet_NaN();
    double slopeRight = std::numeric_limits<double>::quiet_NaN();
};

/// Validates the (Hb, He) data and computes the coordinate split.  The
/// kernel of He must be spanned by coordinate axes: since He is positive
/// semidefinite, a zero diagonal entry forces the whole row to vanish, so
/// the aligned-kernel coordinates are exactly the zero-diagonal ones, and
/// their count must agree with the eigenvalue count of the kernel.
inline PenaltyFamily make_family(const SymMatrix& Hb, const SymMatrix& He) {
    if (Hb.n() != He.n()) throw DimensionMismatch("make_family: Hb and He sizes differ");
    if (!(spd_check(Hb) > 0.0))
        throw NotPositiveDefinite("make_family: Hb is not positive definite");

    const Eigen::VectorXd ev = detail::sym_eig_values(He.mat());
    const double norm2 = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    if (norm2 == 0.0) throw PreconditionViolation("make_family: He is the zero matrix");
    if (ev(0) < -1e-12 * norm2)
        throw PreconditionViolation("make_family: He is not positive semidefinite (lambda_min " +
                                    std::to_string(ev(0)) + ")");
    Eigen::Index kernelDim = 0;
    while (kernelDim < ev.size() && ev(kernelDim) < 1e-10 * norm2) ++kernelDim;

    std::vector<Eigen::Index> kernel, rest;
    for (Eigen::Index i = 0; i < He.n(); ++i)
        (He(i, i) <= 1e-12 * norm2 ? kernel : rest).push_back(i);
    if (static_cast<Eigen::Index>(kernel.size()) != kernelDim)
        throw UnalignedKernel("make_family: Ker(He) has dimension " + std::to_string(kernelDim) +
                              " but only " + std::to_string(kernel.size()) +
                              " zero-diagonal coordinates; the kernel is not axis-aligned");

    PenaltyFamily f{Hb, He, kernelDim, std::move(kernel)};
    f.permutation.insert(f.permutation.end(), rest.begin(), rest.end());
    return f;
}

/// The two explicit built-in families: an n x n second-difference matrix
/// tridiag(-1, 2, -1) as the base and the rank-one penalty e_n e_n^T.
inline PenaltyFamily builtin_example(const std::string& name) {
    Eigen::Index n;
    if (name == "tridiag3") n = 3;
    else if (name == "tridiag4") n = 4;
    else throw UnknownExample("builtin_example: unknown name '" + name +
                              "' (expected tridiag3|tridiag4)");
    Eigen::MatrixXd hb = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        hb(i, i) = 2.0;
        if (i + 1 < n) hb(i, i + 1) = hb(i + 1, i) = -1.0;
    }
    Eigen::MatrixXd he = Eigen::MatrixXd::Zero(n, n);
    he(n - 1, n - 1) = 1.0;
    return make_family(SymMatrix(hb), SymMatrix(he));
}

/// Hb + kappa * He (SPD for kappa >= 0 since He is PSD).
inline SymMatrix assemble(const PenaltyFamily& family, double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw PreconditionViolation("assemble: kappa must be a finite nonnegative real");
    return SymMatrix(family.Hb.mat() + kappa * family.He.mat());
}

namespace detail {

/// P * S * P^T for the family's split permutation (kernel coordinates first).
inline Eigen::MatrixXd split_coords(const PenaltyFamily& f, const Eigen::MatrixXd& s) {
    const Eigen::Index n = s.rows();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = s(f.permutation[i], f.permutation[j]);
    return out;
}

}  // namespace detail

/// Blocks of H_kappa in split coordinates and the relative measure of
/// H_kappa against its block diagonal, computed literally as the spectral
/// norm of Dk^{-1/2} (Dk - Hk) Dk^{-1/2}.
inline BlockForm block_form(const PenaltyFamily& family, double kappa) {
    if (family.kernelDim < 1) throw EmptyKernel("block_form: He is definite; no kernel block");
    const Eigen::Index n = family.Hb.n(), d = family.kernelDim;
    const Eigen::MatrixXd hk = detail::split_coords(family, assemble(family, kappa).mat());

    BlockForm bf;
    bf.Lb = hk.topLeftCorner(d, d);
    bf.Rb = hk.bottomLeftCorner(n - d, d);
    bf.Wb = hk.bottomRightCorner(n - d, n - d);
    Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(n, n);
    dk.topLeftCorner(d, d) = bf.Lb;
    dk.bottomRightCorner(n - d, n - d) = bf.Wb;
    bf.Dkappa = SymMatrix(dk);

    if (bf.Rb.size() == 0 || bf.Rb.cwiseAbs().maxCoeff() == 0.0) {
        bf.etaKappa = 0.0;
        return bf;
    }
    const Eigen::MatrixXd dmh = spd_inv_sqrt(bf.Dkappa).mat();
    Eigen::MatrixXd e = dmh * (dk - hk) * dmh;
    e = 0.5 * (e + e.transpose()).eval();
    const auto [lo, hi] = detail::sym_extreme_eigs(e);
    bf.etaKappa = std::max(std::abs(lo), std::abs(hi));
    return bf;
}

/// The kappa -> infinity limit in split coordinates: the kernel block of Hb
/// padded with zeros.  Its nonzero eigenvalues are the limits of the
/// bounded eigenvalue branch.
inline SymMatrix limit_matrix(const PenaltyFamily& family) {
    if (family.kernelDim < 1) throw EmptyKernel("limit_matrix: He is definite; no kernel block");
    const Eigen::Index n = family.Hb.n(), d = family.kernelDim;
    const Eigen::MatrixXd hb = detail::split_coords(family, family.Hb.mat());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    out.topLeftCorner(d, d) = hb.topLeftCorner(d, d);
    return SymMatrix(out);
}

struct DefinitePair {
    SymMatrix A;
    SymMatrix B;
};

/// One of the five pairs built from an SPD matrix; the inverse, where
/// needed, comes from the eigendecomposition of Hk so that all five pairs
/// share eigenvectors to rounding accuracy.
inline DefinitePair pair_variant(const SymMatrix& Hk, PairVariantTag variant) {
    const Eigen::Index n = Hk.n();
    const SymMatrix eye = SymMatrix::identity(n);
    if (variant == PairVariantTag::HI) return {Hk, eye};
    if (variant == PairVariantTag::IH) return {eye, Hk};

    const detail::EigResult e = detail::sym_eig(Hk.mat());
    if (!(e.values(0) > 0.0))
        throw NotPositiveDefinite("pair_variant: Hk is not positive definite", 1);
    const Eigen::MatrixXd inv =
        e.vectors * e.values.cwiseInverse().asDiagonal() * e.vectors.transpose();
    const SymMatrix hinv(inv);
    if (variant == PairVariantTag::HinvH) return {hinv, Hk};
    if (variant == PairVariantTag::HinvI) return {hinv, eye};
    return {eye, hinv};
}

/// Default sweep grid: 13 log-spaced points 10^2 .. 10^8.
inline std::vector<double> default_kappa_grid() {
    std::vector<double> g;
    for (int j = 0; j <= 12; ++j) g.push_back(std::pow(10.0, 2.0 + 0.5 * j));
    return g;
}

namespace detail {

/// Least-squares slope of log(value) against log(kappa) over the largest
/// 50% of grid points, skipping flagged or non-positive entries; NaN when
/// fewer than two usable points remain.
inline double loglog_slope(const std::vector<double>& grid, const std::vector<double>& vals,
                           const std::vector<std::string>& flag) {
    const size_t npts = grid.size(), start = npts / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = start; i < npts; ++i) {
        if (flag[i] != "ok" || !std::isfinite(vals[i]) || !(vals[i] > 0.0)) continue;
        const double x = std::log(grid[i]), y = std::log(vals[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// M-orthonormalize twice; one Cholesky-based pass leaves O(cond(M) * eps)
/// residual, which the second pass reduces to rounding level even for the
/// kappa ~ 1e8 weights the sweep feeds through here.
inline Eigen::MatrixXd morth2(const Eigen::MatrixXd& b, const SymMatrix& m) {
    return m_orthonormalize(m_orthonormalize(b, m), m);
}

}  // namespace detail

/// Per-kappa comparison of the exact weighted angle of the bounded branch
/// (Left) against the two-step bound evaluated from block data (Right).
///
/// At each kappa, with H the assembled matrix and D its block diagonal in
/// split coordinates, the variant's pair at kappa is viewed as a two-step
/// perturbation of the same variant built on D.  The per-variant data are
///
///     variant   pencil map phi   first-matrix eta   second-matrix eta   weight
///     hi        x                eta                0                   I
///     ih        1/x              0                  eta                 H
///     hinvh     1/x^2            eta/(1-eta)        eta                 H
///     hinvi     1/x              eta/(1-eta)        0                   I
///     ihinv     x                0                  eta/(1-eta)         H^-1
///
/// where eta = etaKappa and the /(1-eta) entries use the exact inverse-
/// congruence law for the (D^-1 -> H^-1) step.  Right sums the worst-case
/// first-step term etaA/(sqrt(1-etaA) RelGap) and, when the second matrix
/// moves, the dichotomy term etaB/(sqrt(1-2 etaB) RelGap_p) with p = inf;
/// the Frobenius kind instead uses numerically computed Frobenius measures
/// with RelGap and RelGap_comp and needs no dichotomy.  Left is the exact
/// angle between the k-dimensional bounded-branch eigenspace at kappa and
/// the kernel-block eigenvectors (which span both the kappa -> infinity
/// limit subspace and the D-pair's bounded branch), weighted by the
/// variant's B matrix built from H (limit reference) or D (perturbed-pair
/// reference).
inline SweepResult effectivity_sweep(const PenaltyFamily& family, Eigen::Index k,
                                     const std::vector<double>& kappaGrid,
                                     PairVariantTag variant, NormKind boundKind,
                                     ReferenceSubspace reference) {
    if (kappaGrid.empty()) throw PreconditionViolation("effectivity_sweep: empty kappa grid");
    for (size_t i = 0; i < kappaGrid.size(); ++i)
        if (!(kappaGrid[i] > 0.0) || (i > 0 && kappaGrid[i] <= kappaGrid[i - 1]))
            throw PreconditionViolation(
                "effectivity_sweep: kappa grid must be ascending and positive");
    const Eigen::Index n = family.Hb.n(), d = family.kernelDim;
    if (k < 1 || k > d)
        throw BadBlockSize("effectivity_sweep: k must satisfy 1 <= k <= kernelDim (k=" +
                           std::to_string(k) + ", kernelDim=" + std::to_string(d) + ")");

    // variant table (etaA/etaB are filled per kappa below)
    std::function<double(double)> phi;
    bool perturbsA = false, perturbsB = false, invA = false, invB = false;
    enum class W { I, H, Hinv } wmode = W::I;
    switch (variant) {
        case PairVariantTag::HI:
            phi = [](double x) { return x; };
            perturbsA = true;
            break;
        case PairVariantTag::IH:
            phi = [](double x) { return 1.0 / x; };
            perturbsB = true;
            wmode = W::H;
            break;
        case PairVariantTag::HinvH:
            phi = [](double x) { return 1.0 / (x * x); };
            perturbsA = perturbsB = true;
            invA = true;
            wmode = W::H;
            break;
        case PairVariantTag::HinvI:
            phi = [](double x) { return 1.0 / x; };
            perturbsA = true;
            invA = true;
            break;
        case PairVariantTag::IHinv:
            phi = [](double x) { return x; };
            perturbsB = true;
            invB = true;
            wmode = W::Hinv;
            break;
    }

    SweepResult res;
    res.kappaGrid = kappaGrid;
    res.variant = variant;
    res.boundKind = boundKind;
    res.reference = reference;
    res.k = k;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    const auto sorted_phi = [&phi](const Eigen::VectorXd& v, Eigen::Index lo, Eigen::Index hi) {
        Eigen::VectorXd out(hi - lo);
        for (Eigen::Index i = lo; i < hi; ++i) out(i - lo) = phi(v(i));
        std::sort(out.data(), out.data() + out.size());
        return out;
    };

    for (const double kappa : kappaGrid) {
        double left = nan, right = nan;
        std::string flag = "ok";
        try {
            const BlockForm bf = block_form(family, kappa);
            const double eta = bf.etaKappa;
            const Eigen::MatrixXd hk = detail::split_coords(family, assemble(family, kappa).mat());

            const detail::EigResult eL = detail::sym_eig(bf.Lb);
            const detail::EigResult eW =
                n > d ? detail::sym_eig(bf.Wb)
                      : detail::EigResult{Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)};
            const detail::EigResult eH = detail::sym_eig(hk);
            const Eigen::VectorXd& lam = eH.values;
            if (!(lam(0) > 0.0))
                throw NotPositiveDefinite("effectivity_sweep: assembled matrix not SPD", 1);

            // bounded-branch identification: the d smallest eigenvalues stay
            // O(1) while the rest grow like kappa; insist on a decade of
            // separation before trusting the split.
            if (n > d && !(lam(d) / lam(d - 1) > 10.0)) {
                res.left.push_back(nan); res.right.push_back(nan);
                res.quotient.push_back(nan); res.flag.push_back("branches-not-separated");
                continue;
            }

            const double etaA = perturbsA ? (invA ? eta / (1.0 - eta) : eta) : 0.0;
            const double etaB = perturbsB ? (invB ? eta / (1.0 - eta) : eta) : 0.0;
            if ((perturbsA && invA && !(eta < 1.0)) || (perturbsB && invB && !(eta < 1.0))) {
                res.left.push_back(nan); res.right.push_back(nan);
                res.quotient.push_back(nan); res.flag.push_back("eta-too-large");
                continue;
            }

            // unperturbed spectra: image under phi of the k smallest
            // kernel-branch eigenvalues of D versus everything else
            Eigen::VectorXd dvals(n);
            dvals.head(d) = eL.values;
            if (n > d) dvals.tail(n - d) = eW.values;
            Eigen::VectorXd rest_d(n - k);
            rest_d.head(d - k) = eL.values.tail(d - k);
            if (n > d) rest_d.tail(n - d) = eW.values;
            Eigen::VectorXd L1(k), L2(n - k);
            for (Eigen::Index i = 0; i < k; ++i) L1(i) = phi(eL.values(i));
            for (Eigen::Index i = 0; i < n - k; ++i) L2(i) = phi(rest_d(i));
            std::sort(L1.data(), L1.data() + k);
            std::sort(L2.data(), L2.data() + n - k);

            // perturbed spectra: image under phi of the split at k of lam
            const Eigen::VectorXd L1t = sorted_phi(lam, 0, k);
            const Eigen::VectorXd L2t = sorted_phi(lam, k, n);

            // intermediate spectra of the pair with only the first matrix
            // moved: for hi/hinvi that already is the final pair; for
            // ih/ihinv the first matrix never moves; hinvh needs the genuine
            // pencil (H^-1, D), whose eigenvalues are clamped into the
            // rigorous relative envelope around 1/dvals^2 because the dense
            // solve loses relative accuracy once the spectrum spans ~1e16.
            Eigen::VectorXd L1h, L2h;
            if (variant == PairVariantTag::HI || variant == PairVariantTag::HinvI) {
                L1h = L1t;
                L2h = L2t;
            } else if (variant == PairVariantTag::IH || variant == PairVariantTag::IHinv) {
                L1h = L1;
                L2h = L2;
            } else {
                const Eigen::MatrixXd hinv =
                    eH.vectors * lam.cwiseInverse().asDiagonal() * eH.vectors.transpose();
                Eigen::MatrixXd dmh = Eigen::MatrixXd::Zero(n, n);
                dmh.topLeftCorner(d, d) =
                    eL.vectors * eL.values.cwiseSqrt().cwiseInverse().asDiagonal() *
                    eL.vectors.transpose();
                if (n > d)
                    dmh.bottomRightCorner(n - d, n - d) =
                        eW.vectors * eW.values.cwiseSqrt().cwiseInverse().asDiagonal() *
                        eW.vectors.transpose();
                Eigen::MatrixXd pencil = dmh * hinv * dmh;
                pencil = 0.5 * (pencil + pencil.transpose()).eval();
                Eigen::VectorXd nu = detail::sym_eig_values(pencil);
                Eigen::VectorXd refv = dvals.array().square().inverse();
                std::sort(refv.data(), refv.data() + n);
                const double etap = eta / (1.0 - eta);
                for (Eigen::Index i = 0; i < n; ++i)
                    nu(i) = std::clamp(nu(i), refv(i) * (1.0 - etap) - 1e-300,
                                       refv(i) * (1.0 + etap));
                L1h = nu.tail(k);   // phi decreasing: bounded branch sits on top
                L2h = nu.head(n - k);
            }

            // ---- Right ----
            const double rg = rel_gap(L2, L1h);
            if (boundKind == NormKind::Spectral) {
                double step1 = 0.0, step2 = 0.0;
                if (etaA > 0.0) step1 = etaA / std::sqrt(1.0 - etaA) / rg;
                if (etaB > 0.0) {
                    if (!(etaB < 0.5)) throw EtaTooLarge("second-step eta >= 1/2");
                    if (check_dichotomy(L2h, L1t).cond == Dichotomy::None)
                        throw DichotomyViolated("intermediate and final spectra interlace");
                    step2 = etaB / std::sqrt(1.0 - 2.0 * etaB) / rel_gap_p(L2h, L1t, PNorm::Inf);
                }
                right = step1 + step2;
            } else {
                // numerically computed Frobenius measures of the actual
                // matrix moves D -> H (or their inverses, per variant)
                double psiFA = 0.0, psiFB = 0.0;
                const SymMatrix hks(hk);
                SymMatrix hinv_s = SymMatrix::identity(n), dinv_s = SymMatrix::identity(n);
                if (invA || invB) {
                    hinv_s = SymMatrix(eH.vectors * lam.cwiseInverse().asDiagonal() *
                                       eH.vectors.transpose());
                    Eigen::MatrixXd dinv = Eigen::MatrixXd::Zero(n, n);
                    dinv.topLeftCorner(d, d) = eL.vectors *
                                               eL.values.cwiseInverse().asDiagonal() *
                                               eL.vectors.transpose();
                    if (n > d)
                        dinv.bottomRightCorner(n - d, n - d) =
                            eW.vectors * eW.values.cwiseInverse().asDiagonal() *
                            eW.vectors.transpose();
                    dinv_s = SymMatrix(dinv);
                }
                if (perturbsA)
                    psiFA = invA ? measure(dinv_s, hinv_s).psiF
                                 : measure(bf.Dkappa, hks).psiF;
                if (perturbsB)
                    psiFB = invB ? measure(dinv_s, hinv_s).psiF
                                 : measure(bf.Dkappa, hks).psiF;
                right = psiFA / rg + (psiFB > 0.0 ? psiFB / rel_gap_comp(L2h, L1t) : 0.0);
            }

            // ---- Left ----
            Eigen::MatrixXd x1t = eH.vectors.leftCols(k);
            Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(n, k);
            ref.topRows(d) = eL.vectors.leftCols(k);
            SymMatrix weight = SymMatrix::identity(n);
            if (reference == ReferenceSubspace::Limit) {
                if (wmode == W::H) weight = SymMatrix(hk);
                else if (wmode == W::Hinv)
                    weight = SymMatrix(eH.vectors * lam.cwiseInverse().asDiagonal() *
                                       eH.vectors.transpose());
            } else {
                if (wmode == W::H) weight = bf.Dkappa;
                else if (wmode == W::Hinv) {
                    Eigen::MatrixXd dinv = Eigen::MatrixXd::Zero(n, n);
                    dinv.topLeftCorner(d, d) = eL.vectors *
                                               eL.values.cwiseInverse().asDiagonal() *
                                               eL.vectors.transpose();
                    if (n > d)
                        dinv.bottomRightCorner(n - d, n - d) =
                            eW.vectors * eW.values.cwiseInverse().asDiagonal() *
                            eW.vectors.transpose();
                    weight = SymMatrix(dinv);
                }
            }
            const AngleReport ar = sin_theta_M(detail::morth2(ref, weight),
                                               detail::morth2(x1t, weight), weight);
            left = boundKind == NormKind::Spectral ? ar.norm2 : ar.normF;
        } catch (const Error& e) {
            left = right = nan;
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            flag = msg;
        }

        res.left.push_back(left);
        res.right.push_back(right);
        if (left == 0.0 && right == 0.0)
            res.quotient.push_back(nan);  // 0/0 sentinel: nothing moved
        else
            res.quotient.push_back(left / right);
        res.flag.push_back(flag);
    }

    res.slopeLeft = detail::loglog_slope(res.kappaGrid, res.left, res.flag);
    res.slopeRight = detail::loglog_slope(res.kappaGrid, res.right, res.flag);
    return res;
}

}  // namespace defpair
