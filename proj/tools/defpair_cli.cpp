// Command-line surface for the definite-pair perturbation library.
//
// Subcommands:
//   angles   exact weighted + Euclidean angles between the k-smallest
//            eigenspaces of two definite pairs
//   bound    two-step relative sin-theta bound (spectral or Frobenius)
//            against the exact angle, with perturbations either read from
//            files or generated reproducibly from --eta-h/--eta-m + --seed
//   compare  the same bound side by side with the chordal-metric
//            comparison bound
//   sweep    penalty-family effectivity sweep over a kappa grid
//
// Exit codes: 0 success, 2 input parse error, 3 definiteness failure,
// 4 bound inapplicable (reason printed), 1 anything else.

#include <cinttypes>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "defpair/defpair.hpp"

namespace {

using namespace defpair;

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;  // decorrelates the two draws

int classify(const Error& e) {
    if (dynamic_cast<const ParseError*>(&e)) return 2;
    if (dynamic_cast<const NotPositiveDefinite*>(&e)) return 3;
    if (dynamic_cast<const EtaTooLarge*>(&e) || dynamic_cast<const EtaHTooLarge*>(&e) ||
        dynamic_cast<const DichotomyViolated*>(&e) || dynamic_cast<const ZeroGap*>(&e) ||
        dynamic_cast<const ZeroChordalGap*>(&e) || dynamic_cast<const IndefinitePair*>(&e) ||
        dynamic_cast<const CorrectionNotPD*>(&e) || dynamic_cast<const ResonantSpectra*>(&e))
        return 4;
    return 1;
}

std::string g17(double v) { return detail::fmt17(v); }

/// No partial files: write to <path>.tmp, rename over <path> on success.
void write_file_atomically(const std::string& path,
                           const std::function<void(std::ostream&)>& body) {
    const std::string tmp = path + ".tmp";
    try {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw IoFailure("cannot open '" + tmp + "' for writing");
        body(os);
        os.flush();
        if (!os) throw IoFailure("write to '" + tmp + "' failed");
    } catch (...) {
        std::remove(tmp.c_str());
        throw;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoFailure("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

void warn_degenerate_split(const Eigen::VectorXd& lam, Eigen::Index k, const char* which) {
    const double scale = std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
    if (std::abs(lam(k) - lam(k - 1)) <= 1e-12 * scale)
        std::fprintf(stderr,
                     "warning: %s pair eigenvalues %lld and %lld are equal to ~1e-12 "
                     "of the spectrum; the k-split is near-degenerate\n",
                     which, static_cast<long long>(k), static_cast<long long>(k + 1));
}

Eigen::MatrixXd qr_orthonormalize(const Eigen::MatrixXd& b) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
    return q;
}

// ---------------------------------------------------------------------------

struct PertOptions {
    std::string pathHt, pathMt;
    double etaH = -1.0, etaM = -1.0;  // < 0 means "not requested"
    std::uint64_t seed = 0;
};

struct PerturbedPair {
    SymMatrix Ht, Mt, deltaH, deltaM;
};

/// Resolves the perturbed pair from files or generated perturbations; with
/// neither source the perturbation is zero.
PerturbedPair resolve_perturbation(const SymMatrix& h, const SymMatrix& m,
                                   const PertOptions& opt) {
    const bool files = !opt.pathHt.empty() || !opt.pathMt.empty();
    const bool gen = opt.etaH >= 0.0 || opt.etaM >= 0.0;
    if (files && gen)
        throw PreconditionViolation(
            "give either perturbed-pair files or --eta-h/--eta-m, not both");
    PerturbedPair p{h, m, SymMatrix::zero(h.n()), SymMatrix::zero(m.n())};
    if (files) {
        if (!opt.pathHt.empty()) p.Ht = load_mtx(opt.pathHt);
        if (!opt.pathMt.empty()) p.Mt = load_mtx(opt.pathMt);
        if (p.Ht.n() != h.n() || p.Mt.n() != m.n())
            throw DimensionMismatch("perturbed pair size differs from base pair");
        p.deltaH = p.Ht - h;
        p.deltaM = p.Mt - m;
    } else if (gen) {
        if (opt.etaH > 0.0) {
            p.deltaH = entrywise_perturb_spd(h, opt.etaH, opt.seed).delta;
            p.Ht = h + p.deltaH;
        }
        if (opt.etaM > 0.0) {
            p.deltaM = entrywise_perturb_spd(m, opt.etaM, opt.seed + kSeedStride).delta;
            p.Mt = m + p.deltaM;
        }
    }
    return p;
}

struct BoundRun {
    RelMeasure mH, mM;
    GapReport gaps;
    BoundReport report;
    double exact = 0.0;
    Eigen::VectorXd lam, lamt;
    Eigen::MatrixXd X1base;        ///< group-1 eigenvectors of the base pair
    Eigen::VectorXd Lambda1base;   ///< group-1 eigenvalues of the base pair
    Eigen::VectorXd Lambda2full;   ///< group-2 eigenvalues of the perturbed pair
};

/// Shared engine of `bound` and `compare`: eigensolve the three pairs,
/// measure both moves, evaluate the selected bound, and compute the exact
/// weighted angle it estimates.
BoundRun run_bound(const SymMatrix& h, const SymMatrix& m, const PerturbedPair& p,
                   Eigen::Index k, PNorm pnorm, NormKind kind) {
    const PairEigen base = pair_eigendecompose(h, m);
    const PairEigen mid = pair_eigendecompose(p.Ht, m);
    const PairEigen full = pair_eigendecompose(p.Ht, p.Mt);
    warn_degenerate_split(base.lambda, k, "base");
    warn_degenerate_split(full.lambda, k, "perturbed");

    const Partition pb = partition(base, k);
    const Partition pm = partition(mid, k);
    const Partition pf = partition(full, k);

    BoundRun r;
    r.lam = base.lambda;
    r.lamt = full.lambda;
    r.mH = measure(h, p.Ht);
    r.mM = measure(m, p.Mt);
    r.gaps = make_gap_report(pb.Lambda2, pm.Lambda1, pm.Lambda2, pf.Lambda1);
    if (kind == NormKind::Spectral)
        r.report = bound_main(r.mH.psi2, r.mM.psi2, r.mM.eta, r.gaps, pnorm);
    else
        r.report = bound_frobenius(r.mH.psiF, r.mM.psiF, r.gaps.relgap, r.gaps.relgap_comp);

    // exact angle in the base pair's M-geometry; the perturbed basis is
    // M-tilde-orthonormal, so re-orthonormalize it against M first
    const Eigen::MatrixXd y1 = m_orthonormalize(m_orthonormalize(pf.X1, m), m);
    const AngleReport ar = sin_theta_M(pb.X1, y1, m);
    r.exact = kind == NormKind::Spectral ? ar.norm2 : ar.normF;
    r.X1base = pb.X1;
    r.Lambda1base = pb.Lambda1;
    r.Lambda2full = pf.Lambda2;
    return r;
}

// ---------------------------------------------------------------------------

int cmd_angles(const std::string& pathH, const std::string& pathM, const std::string& pathHt,
               const std::string& pathMt, Eigen::Index k, const std::string& outPath,
               ReportFormat fmt) {
    const SymMatrix h = load_mtx(pathH), m = load_mtx(pathM);
    const SymMatrix ht = load_mtx(pathHt), mt = load_mtx(pathMt);
    const PairEigen e1 = pair_eigendecompose(h, m);
    const PairEigen e2 = pair_eigendecompose(ht, mt);
    warn_degenerate_split(e1.lambda, k, "first");
    warn_degenerate_split(e2.lambda, k, "second");
    const Partition p1 = partition(e1, k);
    const Partition p2 = partition(e2, k);

    const Eigen::MatrixXd y1 = m_orthonormalize(m_orthonormalize(p2.X1, m), m);
    const AngleReport weighted = sin_theta_M(p1.X1, y1, m);
    const AngleReport euclid =
        sin_theta_euclid(qr_orthonormalize(p1.X1), qr_orthonormalize(p2.X1));

    std::printf("k = %lld\n", static_cast<long long>(k));
    const auto emit = [](const char* name, const AngleReport& r) {
        std::printf("%s.sines =", name);
        for (Eigen::Index i = 0; i < r.sines.size(); ++i)
            std::printf(" %s", g17(r.sines(i)).c_str());
        std::printf("\n%s.norm2 = %s\n%s.normF = %s\n", name, g17(r.norm2).c_str(), name,
                    g17(r.normF).c_str());
    };
    emit("weighted", weighted);
    emit("euclid", euclid);
    if (!outPath.empty())
        write_file_atomically(outPath,
                              [&](std::ostream& os) { save_report(weighted, fmt, os); });
    return 0;
}

int cmd_bound(const std::string& pathH, const std::string& pathM, const PertOptions& popt,
              Eigen::Index k, PNorm pnorm, NormKind kind, const std::string& outPath,
              ReportFormat fmt) {
    const SymMatrix h = load_mtx(pathH), m = load_mtx(pathM);
    const PerturbedPair p = resolve_perturbation(h, m, popt);
    const BoundRun r = run_bound(h, m, p, k, pnorm, kind);

    std::printf("norm = %s\n", kind == NormKind::Spectral ? "spectral" : "frobenius");
    std::printf("eta_H = %s\npsi_H = %s\npsiF_H = %s\n", g17(r.mH.eta).c_str(),
                g17(r.mH.psi2).c_str(), g17(r.mH.psiF).c_str());
    std::printf("eta_M = %s\npsi_M = %s\npsiF_M = %s\n", g17(r.mM.eta).c_str(),
                g17(r.mM.psi2).c_str(), g17(r.mM.psiF).c_str());
    std::printf("relgap = %s\n", g17(r.gaps.relgap).c_str());
    std::printf("relgap_p.1 = %s\nrelgap_p.2 = %s\nrelgap_p.inf = %s\n",
                g17(r.gaps.relgap_p[0]).c_str(), g17(r.gaps.relgap_p[1]).c_str(),
                g17(r.gaps.relgap_p[2]).c_str());
    std::printf("relgap_comp = %s\n", g17(r.gaps.relgap_comp).c_str());
    std::printf("dichotomy = %s\n", to_string(r.gaps.dichotomy));
    std::printf("alpha = %s\ndelta_sep = %s\n", g17(r.gaps.alpha).c_str(),
                g17(r.gaps.deltaSep).c_str());
    std::printf("step1 = %s\nstep2 = %s\ncorrection_factor = %s\ntotal = %s\n",
                g17(r.report.step1).c_str(), g17(r.report.step2).c_str(),
                g17(r.report.correctionFactor).c_str(), g17(r.report.total).c_str());
    std::printf("exact = %s\n", g17(r.exact).c_str());
    if (r.report.total == 0.0)
        std::printf("quotient = n/a\n");
    else
        std::printf("quotient = %s\n", g17(r.exact / r.report.total).c_str());
    if (!outPath.empty())
        write_file_atomically(outPath,
                              [&](std::ostream& os) { save_report(r.report, fmt, os); });
    return 0;
}

int cmd_compare(const std::string& pathH, const std::string& pathM, const PertOptions& popt,
                Eigen::Index k, PNorm pnorm, NormKind kind, const std::string& outPath,
                ReportFormat fmt) {
    const SymMatrix h = load_mtx(pathH), m = load_mtx(pathM);
    const PerturbedPair p = resolve_perturbation(h, m, popt);
    const BoundRun r = run_bound(h, m, p, k, pnorm, kind);

    // the comparison bound wants a Euclidean-orthonormal basis of the
    // unperturbed group-1 eigenspace and the complementary perturbed group
    const bool zero_pert = p.deltaH.max_abs() == 0.0 && p.deltaM.max_abs() == 0.0;
    double sun = 0.0;
    if (!zero_pert)
        sun = sun_bound(h, m, p.deltaH, p.deltaM, qr_orthonormalize(r.X1base), r.Lambda1base,
                        r.Lambda2full);

    std::printf("exact = %s\n", g17(r.exact).c_str());
    std::printf("bound = %s\n", g17(r.report.total).c_str());
    std::printf("sun = %s\n", g17(sun).c_str());
    if (r.report.total == 0.0) std::printf("bound.quotient = n/a\n");
    else std::printf("bound.quotient = %s\n", g17(r.exact / r.report.total).c_str());
    if (sun == 0.0) std::printf("sun.quotient = n/a\n");
    else std::printf("sun.quotient = %s\n", g17(r.exact / sun).c_str());

    if (!outPath.empty()) {
        const double qb = r.report.total == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                                : r.exact / r.report.total;
        const double qs =
            sun == 0.0 ? std::numeric_limits<double>::quiet_NaN() : r.exact / sun;
        write_file_atomically(outPath, [&](std::ostream& os) {
            if (fmt == ReportFormat::Csv) {
                os << "term,value\n";
                os << "exact," << detail::csv_num(r.exact) << '\n';
                os << "bound," << detail::csv_num(r.report.total) << '\n';
                os << "sun," << detail::csv_num(sun) << '\n';
                os << "bound_quotient," << detail::csv_num(qb) << '\n';
                os << "sun_quotient," << detail::csv_num(qs) << '\n';
            } else {
                os << "{\"exact\":" << detail::json_num(r.exact)
                   << ",\"bound\":" << detail::json_num(r.report.total)
                   << ",\"sun\":" << detail::json_num(sun)
                   << ",\"boundQuotient\":" << detail::json_num(qb)
                   << ",\"sunQuotient\":" << detail::json_num(qs) << "}\n";
            }
        });
    }
    return 0;
}

int cmd_sweep(const std::string& example, const std::string& pathHb, const std::string& pathHe,
              Eigen::Index k, PairVariantTag variant, double kstart, double kstop,
              int kpoints, NormKind kind, ReferenceSubspace ref, const std::string& outPath,
              ReportFormat fmt) {
    PenaltyFamily fam = example.empty() ? make_family(load_mtx(pathHb), load_mtx(pathHe))
                                        : builtin_example(example);
    std::vector<double> grid;
    if (kpoints < 1) throw PreconditionViolation("--kappa-points must be at least 1");
    if (kpoints == 1) grid.push_back(kstart);
    else {
        const double lg0 = std::log10(kstart), lg1 = std::log10(kstop);
        for (int i = 0; i < kpoints; ++i)
            grid.push_back(std::pow(10.0, lg0 + (lg1 - lg0) * i / (kpoints - 1)));
    }
    const SweepResult sr = effectivity_sweep(fam, k, grid, variant, kind, ref);

    save_report(sr, ReportFormat::Csv, std::cout);
    std::printf("slope.left = %s\nslope.right = %s\n", g17(sr.slopeLeft).c_str(),
                g17(sr.slopeRight).c_str());
    if (!outPath.empty())
        write_file_atomically(outPath, [&](std::ostream& os) { save_report(sr, fmt, os); });

    for (const std::string& f : sr.flag)
        if (f == "ok") return 0;
    std::fprintf(stderr, "error: no grid point succeeded\n");
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted eigenspace angles and relative sin-theta bounds "
                 "for definite matrix pairs"};
    app.require_subcommand(1);

    std::string pathH, pathM, pathHt, pathMt, outPath;
    std::string formatStr = "csv", pStr = "inf", normStr = "2";
    std::string example, familyHb, familyHe, variantStr = "hinvh";
    std::string boundStr = "spectral", refStr = "limit";
    long long k = 1;
    double etaH = -1.0, etaM = -1.0;
    std::uint64_t seed = 0;
    double kstart = 1e2, kstop = 1e8;
    int kpoints = 13;

    const auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", outPath, "output file (written atomically)");
        sub->add_option("--format", formatStr, "output format: csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* angles = app.add_subcommand("angles", "exact angles between two pairs");
    angles->add_option("--pair-h", pathH, "H of the base pair (.mtx)")->required();
    angles->add_option("--pair-m", pathM, "M of the base pair (.mtx)")->required();
    angles->add_option("--pair-h-tilde", pathHt, "H of the second pair (.mtx)")->required();
    angles->add_option("--pair-m-tilde", pathMt, "M of the second pair (.mtx)")->required();
    angles->add_option("--k", k, "subspace dimension")->required();
    add_out(angles);

    const auto add_bound_flags = [&](CLI::App* sub) {
        sub->add_option("--pair-h", pathH, "H of the base pair (.mtx)")->required();
        sub->add_option("--pair-m", pathM, "M of the base pair (.mtx)")->required();
        sub->add_option("--pair-h-tilde", pathHt, "perturbed H (.mtx)");
        sub->add_option("--pair-m-tilde", pathMt, "perturbed M (.mtx)");
        sub->add_option("--eta-h", etaH, "generate deltaH with this relative amplitude");
        sub->add_option("--eta-m", etaM, "generate deltaM with this relative amplitude");
        sub->add_option("--seed", seed, "seed for generated perturbations");
        sub->add_option("--k", k, "subspace dimension")->required();
        sub->add_option("--p", pStr, "relative gap p-norm: 1|2|inf")
            ->check(CLI::IsMember({"1", "2", "inf"}));
        sub->add_option("--norm", normStr, "bound norm: 2|fro")
            ->check(CLI::IsMember({"2", "fro"}));
        add_out(sub);
    };
    CLI::App* bound = app.add_subcommand("bound", "two-step relative sin-theta bound");
    add_bound_flags(bound);
    CLI::App* compare =
        app.add_subcommand("compare", "bound vs chordal-metric comparison bound");
    add_bound_flags(compare);

    CLI::App* sweep = app.add_subcommand("sweep", "penalty-family effectivity sweep");
    sweep->add_option("--example", example, "built-in family: tridiag3|tridiag4")
        ->check(CLI::IsMember({"tridiag3", "tridiag4"}));
    sweep->add_option("--family-hb", familyHb, "base matrix Hb (.mtx)");
    sweep->add_option("--family-he", familyHe, "penalty structure He (.mtx)");
    sweep->add_option("--k", k, "bounded-branch dimension")->required();
    sweep->add_option("--variant", variantStr, "pair variant: hi|ih|hinvh|hinvi|ihinv")
        ->check(CLI::IsMember({"hi", "ih", "hinvh", "hinvi", "ihinv"}));
    sweep->add_option("--kappa-start", kstart, "first kappa (default 1e2)");
    sweep->add_option("--kappa-stop", kstop, "last kappa (default 1e8)");
    sweep->add_option("--kappa-points", kpoints, "number of log-spaced points (default 13)");
    sweep->add_option("--bound", boundStr, "bound kind: spectral|frobenius")
        ->check(CLI::IsMember({"spectral", "frobenius"}));
    sweep->add_option("--reference", refStr, "reference subspace: limit|perturbed")
        ->check(CLI::IsMember({"limit", "perturbed"}));
    add_out(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const ReportFormat fmt = parse_format(formatStr);
        const PNorm pnorm =
            pStr == "1" ? PNorm::One : (pStr == "2" ? PNorm::Two : PNorm::Inf);
        const NormKind kind = normStr == "fro" ? NormKind::Frobenius : NormKind::Spectral;
        PertOptions popt{pathHt, pathMt, etaH, etaM, seed};

        if (angles->parsed())
            return cmd_angles(pathH, pathM, pathHt, pathMt, k, outPath, fmt);
        if (bound->parsed()) return cmd_bound(pathH, pathM, popt, k, pnorm, kind, outPath, fmt);
        if (compare->parsed())
            return cmd_compare(pathH, pathM, popt, k, pnorm, kind, outPath, fmt);
        if (sweep->parsed()) {
            if (example.empty() && (familyHb.empty() || familyHe.empty()))
                throw PreconditionViolation(
                    "sweep needs --example or both --family-hb and --family-he");
            if (!example.empty() && (!familyHb.empty() || !familyHe.empty()))
                throw PreconditionViolation("--example excludes --family-hb/--family-he");
            const NormKind bkind =
                boundStr == "frobenius" ? NormKind::Frobenius : NormKind::Spectral;
            const ReferenceSubspace ref = refStr == "perturbed"
                                              ? ReferenceSubspace::PerturbedPair
                                              : ReferenceSubspace::Limit;
            return cmd_sweep(example, familyHb, familyHe, k, parse_variant(variantStr), kstart,
                             kstop, kpoints, bkind, ref, outPath, fmt);
        }
        return 1;  // unreachable: require_subcommand(1)
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return classify(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
