#pragma once

// Relative gap quantities, the two-step relative sin-theta bounds (spectral
// and Frobenius forms), the componentwise diagonal Sylvester solution that
// underlies the Frobenius proof, and the classical chordal-metric
// comparison bound with its Crawford-number constant.
//
// Index conventions (the load-bearing detail of the whole module): with
// (H, M) -> (H+deltaH, M) -> (H+deltaH, M+deltaM) the two-step scheme and
// Lambda / Lambda_hat / Lambda_tilde the ascending spectra of the three
// pairs, split at k,
//
//     RelGap      is taken over Lambda_2      x Lambda_hat_1,
//     RelGap_p    is taken over Lambda_hat_2  x Lambda_tilde_1,
//     RelGap_comp is taken over Lambda_hat_2  x Lambda_tilde_1,
//     the dichotomy condition compares Lambda_hat_2 with Lambda_tilde_1.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "defpair/core.hpp"
#include "defpair/detail/lanczos.hpp"
#include "defpair/errors.hpp"
#include "defpair/matrix.hpp"

namespace defpair {

enum class PNorm { One, Two, Inf };

enum class Dichotomy { CondA, CondB, None };

enum class NormKind { Spectral, Frobenius };

inline const char* to_string(Dichotomy d) {
    switch (d) {
        case Dichotomy::CondA: return "CondA";
        case Dichotomy::CondB: return "CondB";
        default: return "None";
    }
}

namespace detail {

inline void require_spectrum(const Eigen::VectorXd& v, const char* who) {
    if (v.size() == 0) throw EmptySpectrum(std::string(who) + ": empty spectrum");
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!(v(i) > 0.0))
            throw PreconditionViolation(std::string(who) + ": spectra must be positive, got " +
                                        std::to_string(v(i)));
}

}  // namespace detail

/// min |lambda_i - mu_j| / sqrt(lambda_i * mu_j); invariant under taking
/// reciprocals of both spectra.
inline double rel_gap(const Eigen::VectorXd& Lambda2, const Eigen::VectorXd& Lambda1hat) {
    detail::require_spectrum(Lambda2, "rel_gap");
    detail::require_spectrum(Lambda1hat, "rel_gap");
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < Lambda2.size(); ++i)
        for (Eigen::Index j = 0; j < Lambda1hat.size(); ++j)
            best = std::min(best, std::abs(Lambda2(i) - Lambda1hat(j)) /
                                      std::sqrt(Lambda2(i) * Lambda1hat(j)));
    return best;
}

/// min |a - b| / (a^p + b^p)^{1/p} over the spectrum product, with the
/// p = inf denominator max(a, b).
inline double rel_gap_p(const Eigen::VectorXd& Lambda2hat, const Eigen::VectorXd& Lambda1tilde,
                        PNorm p) {
    detail::require_spectrum(Lambda2hat, "rel_gap_p");
    detail::require_spectrum(Lambda1tilde, "rel_gap_p");
    const auto den = [p](double a, double b) {
        switch (p) {
            case PNorm::One: return a + b;
            case PNorm::Two: return std::sqrt(a * a + b * b);
            default: return std::max(a, b);
        }
    };
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < Lambda2hat.size(); ++i)
        for (Eigen::Index j = 0; j < Lambda1tilde.size(); ++j)
            best = std::min(best, std::abs(Lambda2hat(i) - Lambda1tilde(j)) /
                                      den(Lambda2hat(i), Lambda1tilde(j)));
    return best;
}

/// min |a - b| / b, the second argument supplying the denominator.
inline double rel_gap_comp(const Eigen::VectorXd& Lambda2hat,
                           const Eigen::VectorXd& Lambda1tilde) {
    detail::require_spectrum(Lambda2hat, "rel_gap_comp");
    detail::require_spectrum(Lambda1tilde, "rel_gap_comp");
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < Lambda2hat.size(); ++i)
        for (Eigen::Index j = 0; j < Lambda1tilde.size(); ++j)
            best = std::min(best, std::abs(Lambda2hat(i) - Lambda1tilde(j)) / Lambda1tilde(j));
    return best;
}

struct DichotomyResult {
    Dichotomy cond = Dichotomy::None;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double deltaSep = std::numeric_limits<double>::quiet_NaN();
};

/// Spectral dichotomy between the two groups: CondA when Lambda2hat lies
/// entirely below Lambda1tilde, CondB when entirely above, None when the
/// groups interlace.  On exact ties both conditions hold with deltaSep = 0;
/// CondA is reported.
inline DichotomyResult check_dichotomy(const Eigen::VectorXd& Lambda2hat,
                                       const Eigen::VectorXd& Lambda1tilde) {
    detail::require_spectrum(Lambda2hat, "check_dichotomy");
    detail::require_spectrum(Lambda1tilde, "check_dichotomy");
    DichotomyResult r;
    const double max2 = Lambda2hat.maxCoeff(), min2 = Lambda2hat.minCoeff();
    const double max1 = Lambda1tilde.maxCoeff(), min1 = Lambda1tilde.minCoeff();
    if (max2 <= min1) {
        r.cond = Dichotomy::CondA;
        r.alpha = max2;
        r.deltaSep = min1 - max2;
    } else if (max1 <= min2) {
        r.cond = Dichotomy::CondB;
        r.alpha = max1;
        r.deltaSep = min2 - max1;
    }
    return r;
}

struct GapReport {
    double relgap = 0.0;                       ///< over Lambda2 x Lambda1hat
    std::array<double, 3> relgap_p{};          ///< p = 1, 2, inf over Lambda2hat x Lambda1tilde
    double relgap_comp = 0.0;                  ///< over Lambda2hat x Lambda1tilde
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double deltaSep = std::numeric_limits<double>::quiet_NaN();
    Dichotomy dichotomy = Dichotomy::None;

    double relgap_for(PNorm p) const { return relgap_p[static_cast<size_t>(p)]; }
};

/// Evaluates every gap quantity the bounds consume, with the index
/// conventions from the header comment.
inline GapReport make_gap_report(const Eigen::VectorXd& Lambda2,
                                 const Eigen::VectorXd& Lambda1hat,
                                 const Eigen::VectorXd& Lambda2hat,
                                 const Eigen::VectorXd& Lambda1tilde) {
    GapReport g;
    g.relgap = rel_gap(Lambda2, Lambda1hat);
    g.relgap_p[0] = rel_gap_p(Lambda2hat, Lambda1tilde, PNorm::One);
    g.relgap_p[1] = rel_gap_p(Lambda2hat, Lambda1tilde, PNorm::Two);
    g.relgap_p[2] = rel_gap_p(Lambda2hat, Lambda1tilde, PNorm::Inf);
    g.relgap_comp = rel_gap_comp(Lambda2hat, Lambda1tilde);
    const DichotomyResult d = check_dichotomy(Lambda2hat, Lambda1tilde);
    g.alpha = d.alpha;
    g.deltaSep = d.deltaSep;
    g.dichotomy = d.cond;
    return g;
}

struct BoundReport {
    double step1 = 0.0;             ///< first-perturbation term
    double step2 = 0.0;             ///< second-perturbation term (before its factor)
    double correctionFactor = 1.0;  ///< multiplier applied to step2
    double total = 0.0;             ///< step1 + correctionFactor * step2
    NormKind normKind = NormKind::Spectral;
    bool applicable = true;
    std::string reason;             ///< populated by callers that record refusals
};

/// Single-perturbation bound: ||sin Theta|| <= psiH / RelGap.
inline double bound_step1(double psiH, double relgap) {
    if (!(relgap > 0.0)) throw ZeroGap("bound_step1: RelGap must be positive");
    return psiH / relgap;
}

/// Two-term spectral bound
///     psiH/RelGap + sqrt(1-etaM)/sqrt(1-2*etaM) * psiM/RelGap_p,
/// requiring etaM < 1/2 and a spectral dichotomy between the second-step
/// spectra.
inline BoundReport bound_main(double psiH, double psiM, double etaM, const GapReport& gaps,
                              PNorm p = PNorm::Inf) {
    if (!(etaM < 0.5))
        throw EtaTooLarge("bound_main: requires etaM < 1/2, got " + std::to_string(etaM));
    if (gaps.dichotomy == Dichotomy::None)
        throw DichotomyViolated("bound_main: spectra interlace; the spectral-norm second "
                                "step requires a dichotomy (the Frobenius bound does not)");
    const double rg = gaps.relgap, rgp = gaps.relgap_for(p);
    if (!(rg > 0.0) || !(rgp > 0.0))
        throw ZeroGap("bound_main: a relative gap is zero");
    BoundReport r;
    r.step1 = psiH / rg;
    r.step2 = psiM / rgp;
    r.correctionFactor = std::sqrt(1.0 - etaM) / std::sqrt(1.0 - 2.0 * etaM);
    r.total = r.step1 + r.correctionFactor * r.step2;
    r.normKind = NormKind::Spectral;
    return r;
}

/// Same-root variant of the spectral bound,
///     phiH/(sqrt(1-etaH) RelGap) + phiM/(sqrt(1-2*etaM) RelGap_p),
/// requiring etaH < 1 and etaM < 1/2 plus the dichotomy.
inline BoundReport bound_main_phi(double phiH, double phiM, double etaH, double etaM,
                                  const GapReport& gaps, PNorm p = PNorm::Inf) {
    if (!(etaH < 1.0))
        throw EtaHTooLarge("bound_main_phi: requires etaH < 1, got " + std::to_string(etaH));
    if (!(etaM < 0.5))
        throw EtaTooLarge("bound_main_phi: requires etaM < 1/2, got " + std::to_string(etaM));
    if (gaps.dichotomy == Dichotomy::None)
        throw DichotomyViolated("bound_main_phi: spectra interlace");
    const double rg = gaps.relgap, rgp = gaps.relgap_for(p);
    if (!(rg > 0.0) || !(rgp > 0.0))
        throw ZeroGap("bound_main_phi: a relative gap is zero");
    BoundReport r;
    r.step1 = phiH / (std::sqrt(1.0 - etaH) * rg);
    r.step2 = phiM / rgp;
    r.correctionFactor = 1.0 / std::sqrt(1.0 - 2.0 * etaM);
    r.total = r.step1 + r.correctionFactor * r.step2;
    r.normKind = NormKind::Spectral;
    return r;
}

/// Frobenius-norm bound psiH_F/RelGap + psiM_F/RelGap_comp; needs no
/// spectral dichotomy, which is its whole point.
inline BoundReport bound_frobenius(double psiH_F, double psiM_F, double relgap,
                                   double relgap_comp) {
    if (!(relgap > 0.0) || !(relgap_comp > 0.0))
        throw ZeroGap("bound_frobenius: a relative gap is zero");
    BoundReport r;
    r.step1 = psiH_F / relgap;
    r.step2 = psiM_F / relgap_comp;
    r.correctionFactor = 1.0;
    r.total = r.step1 + r.step2;
    r.normKind = NormKind::Frobenius;
    return r;
}

/// Componentwise solution Z_ij = -lambda_tilde_j / (lambda_hat_i - lambda_tilde_j) * C_ij
/// of the diagonal Sylvester system from the Frobenius proof; the oracle
/// satisfies ||Z||_F <= ||C||_F / RelGap_comp.
inline Eigen::MatrixXd sylvester_diag_solve(const Eigen::VectorXd& Lambda2hat,
                                            const Eigen::VectorXd& Lambda1tilde,
                                            const Eigen::MatrixXd& C) {
    if (C.rows() != Lambda2hat.size() || C.cols() != Lambda1tilde.size())
        throw DimensionMismatch("sylvester_diag_solve: C must be |Lambda2hat| x |Lambda1tilde|");
    Eigen::MatrixXd z(C.rows(), C.cols());
    for (Eigen::Index i = 0; i < C.rows(); ++i)
        for (Eigen::Index j = 0; j < C.cols(); ++j) {
            const double diff = Lambda2hat(i) - Lambda1tilde(j);
            if (diff == 0.0)
                throw ResonantSpectra("sylvester_diag_solve: lambda_hat equals lambda_tilde at (" +
                                      std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
            z(i, j) = -Lambda1tilde(j) / diff * C(i, j);
        }
    return z;
}

namespace detail {

/// lambda_min of the rotated combination cos(theta) H + sin(theta) M.
/// Dense below the cutoff; above it, a Cholesky + inverse-Lanczos path with
/// a warm-started eigenvector is used whenever the combination is positive
/// definite (always true on the positive arc of an SPD/SPD pair), with a
/// dense fallback for indefinite combinations.
class CombinationLambdaMin {
public:
    CombinationLambdaMin(const SymMatrix& H, const SymMatrix& M) : h_(H), m_(M) {}

    double operator()(double theta) {
        Eigen::MatrixXd c = std::cos(theta) * h_.mat() + std::sin(theta) * m_.mat();
        if (c.rows() <= kDenseCutoff) return sym_eig_edge(c, /*smallest=*/true);
        Eigen::MatrixXd l = c;
        if (potrf_lower(l) == 0) {
            MatVec mv = [&l](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
                y = x;
                l.triangularView<Eigen::Lower>().solveInPlace(y);
                l.transpose().triangularView<Eigen::Upper>().solveInPlace(y);
            };
            LanczosOptions opt;
            if (warm_.size() == c.rows()) opt.start = warm_;
            const LanczosResult r = lanczos_extreme(mv, c.rows(), /*largest=*/true, opt);
            warm_ = r.vector;
            return 1.0 / r.value;
        }
        return sym_eig_edge(c, /*smallest=*/true);
    }

private:
    const SymMatrix& h_;
    const SymMatrix& m_;
    Eigen::VectorXd warm_;
};

/// Golden-section maximization of a unimodal function on [a, b].  The stop
/// is width-based: for a smooth concave maximum the value error is about
/// |f''| w^2 / 8, so a width of 5e-5 rad resolves the maximum value to
/// ~1e-9 relative for curvature comparable to the value itself.
template <typename F>
inline double golden_max(F&& f, double a, double b, double fa_hint, double width_tol = 5e-5) {
    (void)fa_hint;
    constexpr double gr = 0.6180339887498949;  // 1/golden ratio
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > width_tol) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = f(x1);
        }
    }
    return std::max(f1, f2);
}

}  // namespace detail

/// Crawford number gamma(H, M) = min over unit x of sqrt((x^T H x)^2 + (x^T M x)^2),
/// computed through the standard rotation characterization
/// gamma = max over theta of lambda_min(cos(theta) H + sin(theta) M).
///
/// Below n = 64 the literal algorithm runs: a 720-point grid over [0, 2pi)
/// followed by golden-section refinement around the best bracket.  For
/// larger SPD/SPD pairs the grid is provably unnecessary: every Rayleigh
/// slice r_x cos(theta - phi_x) has phase phi_x in [0, pi/2], so
/// f(theta) = lambda_min(...) is concave on [0, pi/2] with f'(0) > 0 and
/// f'(pi/2) < 0, and the global maximizer over the whole circle lies inside
/// (0, pi/2); golden section on that interval alone finds it.  (720 dense
/// eigenvalue evaluations at n ~ 5500 would take hours; the concavity
/// argument replaces them with ~25.)  Throws IndefinitePair when the
/// maximum is not positive.
inline double crawford(const SymMatrix& H, const SymMatrix& M) {
    if (H.n() != M.n()) throw DimensionMismatch("crawford: size mismatch");
    detail::CombinationLambdaMin f(H, M);
    const double pi = 3.14159265358979323846;
    double gamma;

    bool spd_fast = false;
    if (H.n() > 64) {
        // the fast path needs both matrices SPD; probe with Cholesky
        Eigen::MatrixXd t = H.mat();
        if (detail::potrf_lower(t) == 0) {
            t = M.mat();
            spd_fast = detail::potrf_lower(t) == 0;
        }
    }

    if (spd_fast) {
        gamma = detail::golden_max(f, 1e-9, pi / 2 - 1e-9, 0.0);
    } else {
        constexpr int grid = 720;
        int best = 0;
        double fbest = -std::numeric_limits<double>::infinity();
        std::array<double, grid> vals{};
        for (int j = 0; j < grid; ++j) {
            vals[static_cast<size_t>(j)] = f(2.0 * pi * j / grid);
            if (vals[static_cast<size_t>(j)] > fbest) {
                fbest = vals[static_cast<size_t>(j)];
                best = j;
            }
        }
        const double lo = 2.0 * pi * (best - 1) / grid, hi = 2.0 * pi * (best + 1) / grid;
        gamma = std::max(fbest, detail::golden_max(f, lo, hi, fbest));
    }
    if (!(gamma > 0.0))
        throw IndefinitePair("crawford: maximum of lambda_min is " + std::to_string(gamma) +
                             "; the pair is not definite");
    return gamma;
}

/// Chordal-metric comparison bound
///     sqrt(||H^2 + M^2||_2) / (gamma(H,M) gamma(Htilde,Mtilde))
///         * sqrt(||deltaH X1||_F^2 + ||deltaM X1||_F^2) / delta,
/// where delta = min |lambda_tilde - lambda| / (sqrt(1+lambda^2) sqrt(1+lambda_tilde^2))
/// over lambda in Lambda1, lambda_tilde in Lambda2tilde, and X1 has
/// Euclidean-orthonormal columns (note: not the M-orthonormal convention
/// used elsewhere).
inline double sun_bound(const SymMatrix& H, const SymMatrix& M, const SymMatrix& deltaH,
                        const SymMatrix& deltaM, const Eigen::MatrixXd& X1,
                        const Eigen::VectorXd& Lambda1, const Eigen::VectorXd& Lambda2tilde) {
    const Eigen::Index n = H.n();
    if (M.n() != n || deltaH.n() != n || deltaM.n() != n || X1.rows() != n)
        throw DimensionMismatch("sun_bound: size mismatch");
    if (Lambda1.size() == 0 || Lambda2tilde.size() == 0)
        throw EmptySpectrum("sun_bound: empty spectrum group");
    const Eigen::Index k = X1.cols();
    if (((X1.transpose() * X1) - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-10)
        throw NotOrthonormal("sun_bound: X1 must have Euclidean-orthonormal columns");

    double delta = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < Lambda1.size(); ++i)
        for (Eigen::Index j = 0; j < Lambda2tilde.size(); ++j) {
            const double l = Lambda1(i), lt = Lambda2tilde(j);
            delta = std::min(delta, std::abs(lt - l) /
                                        (std::sqrt(1.0 + l * l) * std::sqrt(1.0 + lt * lt)));
        }
    if (!(delta > 0.0)) throw ZeroChordalGap("sun_bound: chordal eigenvalue gap is zero");

    const double gamma = crawford(H, M);
    const double gamma_t = crawford(H + deltaH, M + deltaM);

    double norm_hm;  // ||H^2 + M^2||_2
    if (n <= detail::kDenseCutoff) {
        Eigen::MatrixXd s = H.mat() * H.mat() + M.mat() * M.mat();
        s = 0.5 * (s + s.transpose()).eval();
        norm_hm = detail::sym_eig_edge(s, /*smallest=*/false);
    } else {
        Eigen::VectorXd tmp(n);
        detail::MatVec mv = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
            tmp.noalias() = H.mat().selfadjointView<Eigen::Lower>() * x;
            y.noalias() = H.mat().selfadjointView<Eigen::Lower>() * tmp;
            tmp.noalias() = M.mat().selfadjointView<Eigen::Lower>() * x;
            y.noalias() += M.mat().selfadjointView<Eigen::Lower>() * tmp;
        };
        norm_hm = detail::lanczos_extreme(mv, n, /*largest=*/true).value;
    }

    const double resid = std::sqrt((deltaH.mat() * X1).squaredNorm() +
                                   (deltaM.mat() * X1).squaredNorm());
    return std::sqrt(norm_hm) / (gamma * gamma_t) * resid / delta;
}

}  // namespace defpair
