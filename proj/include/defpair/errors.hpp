#pragma once

// Error taxonomy for the defpair library.
//
// Every failure the library can signal is a named type derived from
// defpair::Error, so callers can map failure classes to exit codes or
// recovery logic without parsing message strings.  Parser errors
// additionally carry the 1-based line number of the offending input line.

#include <stdexcept>
#include <string>

namespace defpair {

/// Base class of all defpair exceptions.
struct Error : std::runtime_error {
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

#define DEFPAIR_DEFINE_ERROR(NAME)                                            \
    struct NAME : Error {                                                     \
        explicit NAME(const std::string& what_arg) : Error(what_arg) {}       \
    }

// ---- generic input violations -------------------------------------------

/// An input matrix entry or scalar is NaN or infinite.
DEFPAIR_DEFINE_ERROR(NonFinite);
/// Operand dimensions are incompatible.
DEFPAIR_DEFINE_ERROR(DimensionMismatch);
/// A documented precondition without a more specific error type failed.
DEFPAIR_DEFINE_ERROR(PreconditionViolation);

// ---- symmetric-definite kernels ------------------------------------------

/// A matrix required to be symmetric positive definite is not; carries the
/// 1-based index of the failing Cholesky pivot when one is available.
struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& what_arg, int pivot_index = -1)
        : Error(what_arg), pivot(pivot_index) {}
    int pivot;  ///< 1-based failing pivot, or -1 when not applicable.
};

/// The underlying symmetric eigensolver did not converge.
DEFPAIR_DEFINE_ERROR(ConvergenceFailure);
/// Block size k outside 1 <= k < n.
DEFPAIR_DEFINE_ERROR(BadBlockSize);

// ---- subspace angles -------------------------------------------------------

/// A basis required to be Euclidean-orthonormal is not (tolerance 1e-10).
DEFPAIR_DEFINE_ERROR(NotOrthonormal);
/// A basis required to be M-orthonormal is not (tolerance 1e-8).
DEFPAIR_DEFINE_ERROR(NotMOrthonormal);
/// I - Xtilde1^T * deltaM * Xtilde1 is not positive definite: the weight
/// perturbation is too large for the two-step correction framework.
DEFPAIR_DEFINE_ERROR(CorrectionNotPD);
/// The correction factor Y11 is numerically singular.
DEFPAIR_DEFINE_ERROR(SingularCorrection);

// ---- relative measures -----------------------------------------------------

/// eta outside [0, 1), where eta/sqrt(1-eta) and eta/(1-eta) are defined.
DEFPAIR_DEFINE_ERROR(EtaOutOfRange);

// ---- gaps and bounds -------------------------------------------------------

/// A spectrum argument is empty.
DEFPAIR_DEFINE_ERROR(EmptySpectrum);
/// p outside the supported menu {1, 2, inf}.
DEFPAIR_DEFINE_ERROR(BadP);
/// A relative gap in a bound denominator is zero.
DEFPAIR_DEFINE_ERROR(ZeroGap);
/// eta_M >= 1/2: the spectral two-term bound is undefined.
DEFPAIR_DEFINE_ERROR(EtaTooLarge);
/// eta_H >= 1: the congruence-corrected first term is undefined.
DEFPAIR_DEFINE_ERROR(EtaHTooLarge);
/// The spectra interlace; the spectral-norm second step does not apply.
DEFPAIR_DEFINE_ERROR(DichotomyViolated);
/// Some lambda_hat_i equals lambda_tilde_j: the diagonal Sylvester system
/// is singular.
DEFPAIR_DEFINE_ERROR(ResonantSpectra);
/// The matrix pair is not definite (Crawford number <= 0).
DEFPAIR_DEFINE_ERROR(IndefinitePair);
/// The chordal eigenvalue gap is zero.
DEFPAIR_DEFINE_ERROR(ZeroChordalGap);

// ---- penalty families ------------------------------------------------------

/// The penalty matrix He is definite: there is no bounded branch.
DEFPAIR_DEFINE_ERROR(EmptyKernel);
/// Ker(He) is not spanned by coordinate directions, so no coordinate
/// permutation can align the kernel/complement split.
DEFPAIR_DEFINE_ERROR(UnalignedKernel);
/// Unknown built-in family name.
DEFPAIR_DEFINE_ERROR(UnknownExample);

// ---- file I/O ---------------------------------------------------------------

/// Base of all parse failures; carries the 1-based line number.
struct ParseError : Error {
    explicit ParseError(const std::string& what_arg, long line_number)
        : Error(what_arg + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    long line;  ///< 1-based line number of the offending input line.
};

#define DEFPAIR_DEFINE_PARSE_ERROR(NAME)                                      \
    struct NAME : ParseError {                                                \
        explicit NAME(const std::string& what_arg, long line_number)          \
            : ParseError(what_arg, line_number) {}                            \
    }

/// First line is not a well-formed "%%MatrixMarket ..." banner.
DEFPAIR_DEFINE_PARSE_ERROR(BadBanner);
/// Banner is well-formed but requests an unsupported object/format/field/
/// symmetry combination.
DEFPAIR_DEFINE_PARSE_ERROR(UnsupportedFormat);
/// A coordinate index lies outside [1, n].
DEFPAIR_DEFINE_PARSE_ERROR(IndexOutOfRange);
/// The same (i, j) position appears twice.
DEFPAIR_DEFINE_PARSE_ERROR(DuplicateEntry);
/// Header declares a non-square matrix.
DEFPAIR_DEFINE_PARSE_ERROR(NotSquare);
/// A "general" file is not numerically symmetric.
DEFPAIR_DEFINE_PARSE_ERROR(NotSymmetric);

/// A write to or read from a stream failed at the OS level.
DEFPAIR_DEFINE_ERROR(IoFailure);

#undef DEFPAIR_DEFINE_PARSE_ERROR
#undef DEFPAIR_DEFINE_ERROR

}  // namespace defpair
