#pragma once

// Matrix Market coordinate-format ingestion and emission, diagonal test
// matrices, and report persistence as CSV or JSON.
//
// Parsing is total: every malformed input is rejected with a named error
// carrying the offending line number.  Values are serialized with 17
// significant digits so that write -> parse round-trips bit-exactly.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "defpair/angles.hpp"
#include "defpair/bounds.hpp"
#include "defpair/errors.hpp"
#include "defpair/matrix.hpp"
#include "defpair/penalty.hpp"

namespace defpair {

/// Largest accepted matrix dimension; dense storage at this cap is
/// 8192^2 * 8 bytes = 512 MB, the design ceiling for desk-scale use.
inline constexpr long kMaxMtxDim = 8192;

struct MtxHeader {
    std::string object;    ///< "matrix"
    std::string format;    ///< "coordinate" | "array"
    std::string field;     ///< "real" | "integer" | "pattern" (| "complex")
    std::string symmetry;  ///< "general" | "symmetric" (| "skew-symmetric" | "hermitian")
};

enum class ReportFormat { Csv, Json };

inline ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    throw PreconditionViolation("unknown report format '" + s + "' (expected csv|json)");
}

namespace detail {

inline std::string ascii_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline bool blank_line(const std::string& s) {
    return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
}

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV-safe doubles: finite values via fmt17, non-finite as "nan"/"inf".
inline std::string csv_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt17(v);
}

/// JSON has no non-finite literals; those become null.
inline std::string json_num(double v) {
    if (!std::isfinite(v)) return "null";
    return fmt17(v);
}

inline std::string json_str(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\\\"";
        else if (c == '\\') out += "\\\\";
        else if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
            out += buf;
        } else out += c;
    }
    return out + "\"";
}

inline std::string csv_field(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    return s;
}

inline MtxHeader parse_banner(const std::string& line, long ln) {
    std::istringstream iss(line);
    std::vector<std::string> tok;
    std::string t;
    while (iss >> t) tok.push_back(ascii_lower(t));
    if (tok.empty() || tok[0] != "%%matrixmarket")
        throw BadBanner("first line must start with '%%MatrixMarket'", ln);
    if (tok.size() != 5)
        throw BadBanner("banner must have exactly 5 tokens "
                        "'%%MatrixMarket object format field symmetry'", ln);
    MtxHeader h{tok[1], tok[2], tok[3], tok[4]};
    if (h.object != "matrix") throw BadBanner("unknown object '" + h.object + "'", ln);
    if (h.format != "coordinate" && h.format != "array")
        throw BadBanner("unknown format '" + h.format + "'", ln);
    if (h.field != "real" && h.field != "integer" && h.field != "complex" &&
        h.field != "pattern")
        throw BadBanner("unknown field '" + h.field + "'", ln);
    if (h.symmetry != "general" && h.symmetry != "symmetric" &&
        h.symmetry != "skew-symmetric" && h.symmetry != "hermitian")
        throw BadBanner("unknown symmetry '" + h.symmetry + "'", ln);
    if (h.format != "coordinate")
        throw UnsupportedFormat("only 'coordinate' format is supported", ln);
    if (h.field != "real" && h.field != "integer")
        throw UnsupportedFormat("field '" + h.field + "' is not supported "
                                "(real or integer only)", ln);
    if (h.symmetry != "general" && h.symmetry != "symmetric")
        throw UnsupportedFormat("symmetry '" + h.symmetry + "' is not supported "
                                "(general or symmetric only)", ln);
    return h;
}

}  // namespace detail

/// Parses a Matrix Market coordinate/real(integer)/symmetric(general)
/// stream into a dense SymMatrix.  Symmetric files must store only the
/// lower triangle (mirrored on load); general files must be numerically
/// symmetric within 1e-12 of their largest entry.  Duplicate entries are
/// rejected, not summed.
inline SymMatrix parse_mtx(std::istream& in) {
    long ln = 0;
    std::string line;

    if (!std::getline(in, line)) throw BadBanner("empty input", 1);
    ln = 1;
    const MtxHeader header = detail::parse_banner(line, ln);
    const bool symmetric = header.symmetry == "symmetric";

    // size line: first non-comment, non-blank line after the banner
    long n = 0, nnz = 0;
    for (;;) {
        if (!std::getline(in, line))
            throw ParseError("unexpected end of file before size line", ln);
        ++ln;
        if (detail::blank_line(line) || line[line.find_first_not_of(" \t")] == '%') continue;
        std::istringstream iss(line);
        long rows = 0, cols = 0;
        if (!(iss >> rows >> cols >> nnz))
            throw ParseError("malformed size line (expected 'rows cols nnz')", ln);
        std::string rest;
        if (iss >> rest) throw ParseError("trailing tokens on size line", ln);
        if (rows != cols)
            throw NotSquare("matrix is " + std::to_string(rows) + "x" + std::to_string(cols), ln);
        if (rows < 1) throw ParseError("matrix dimension must be at least 1", ln);
        if (rows > kMaxMtxDim)
            throw ParseError("matrix dimension " + std::to_string(rows) +
                             " exceeds the supported maximum " + std::to_string(kMaxMtxDim), ln);
        const long cap = symmetric ? rows * (rows + 1) / 2 : rows * rows;
        if (nnz < 0 || nnz > cap)
            throw ParseError("entry count " + std::to_string(nnz) +
                             " outside [0, " + std::to_string(cap) + "]", ln);
        n = rows;
        break;
    }

    // NaN marks "unset" for duplicate detection; parsed values are
    // themselves required to be finite, so the marker cannot collide.
    Eigen::MatrixXd dense = Eigen::MatrixXd::Constant(
        n, n, std::numeric_limits<double>::quiet_NaN());
    // (i, j, line) records for the symmetry diagnostic; general files only,
    // where the entry count is modest next to the dense matrix itself
    std::vector<std::tuple<long, long, long>> entries;
    if (!symmetric) entries.reserve(static_cast<size_t>(nnz));

    long seen = 0;
    while (seen < nnz) {
        if (!std::getline(in, line))
            throw ParseError("unexpected end of file: got " + std::to_string(seen) +
                             " of " + std::to_string(nnz) + " entries", ln);
        ++ln;
        if (detail::blank_line(line) || line[line.find_first_not_of(" \t")] == '%') continue;
        std::istringstream iss(line);
        long i = 0, j = 0;
        double v = 0.0;
        if (!(iss >> i >> j >> v))
            throw ParseError("malformed data line (expected 'i j value')", ln);
        std::string rest;
        if (iss >> rest) throw ParseError("trailing tokens on data line", ln);
        if (i < 1 || i > n || j < 1 || j > n)
            throw IndexOutOfRange("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") outside 1.." + std::to_string(n), ln);
        if (!std::isfinite(v)) throw ParseError("non-finite value", ln);
        if (symmetric && j > i)
            throw ParseError("upper-triangle entry (" + std::to_string(i) + "," +
                             std::to_string(j) + ") in a symmetric file", ln);
        if (!std::isnan(dense(i - 1, j - 1)))
            throw DuplicateEntry("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") appears more than once", ln);
        dense(i - 1, j - 1) = v;
        if (symmetric) dense(j - 1, i - 1) = v;
        else entries.emplace_back(i, j, ln);
        ++seen;
    }

    // only comments and blanks may follow the data
    while (std::getline(in, line)) {
        ++ln;
        if (detail::blank_line(line) || line[line.find_first_not_of(" \t")] == '%') continue;
        throw ParseError("trailing content after " + std::to_string(nnz) + " entries", ln);
    }

    dense = dense.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : v; });

    if (!symmetric) {
        const double scale = dense.cwiseAbs().maxCoeff();
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < i; ++j)
                if (std::abs(dense(i, j) - dense(j, i)) > 1e-12 * scale) {
                    long at = 0;  // report the last line that touched this entry pair
                    for (const auto& [ei, ej, el] : entries)
                        if ((ei == i + 1 && ej == j + 1) || (ei == j + 1 && ej == i + 1)) at = el;
                    throw NotSymmetric("general file is not numerically symmetric at (" +
                                       std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                                       at);
                }
    }
    return SymMatrix(dense);
}

/// Opens and parses a .mtx file; IoFailure if the file cannot be opened.
inline SymMatrix load_mtx(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open '" + path + "'");
    return parse_mtx(in);
}

/// Writes coordinate/real/symmetric format: the lower triangle's nonzeros,
/// 1-based, row-major, 17 significant digits.
inline void write_mtx(const SymMatrix& a, std::ostream& os) {
    const Eigen::Index n = a.n();
    long nnz = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            if (a(i, j) != 0.0) ++nnz;
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    os << n << ' ' << n << ' ' << nnz << '\n';
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            if (a(i, j) != 0.0)
                os << (i + 1) << ' ' << (j + 1) << ' ' << detail::fmt17(a(i, j)) << '\n';
    if (!os) throw IoFailure("write_mtx: stream write failed");
}

inline void save_mtx(const SymMatrix& a, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoFailure("cannot open '" + path + "' for writing");
    write_mtx(a, os);
}

/// diag(1, 2, ..., n).
inline SymMatrix diag_matrix(Eigen::Index n) {
    if (n < 1) throw PreconditionViolation("diag_matrix: n must be at least 1");
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = static_cast<double>(i + 1);
    return SymMatrix::diagonal(d);
}

// ---------------------------------------------------------------------------
// report persistence

inline void save_report(const AngleReport& r, ReportFormat fmt, std::ostream& os) {
    if (fmt == ReportFormat::Csv) {
        os << "term,value\n";
        for (Eigen::Index i = 0; i < r.sines.size(); ++i)
            os << "sine" << (i + 1) << ',' << detail::csv_num(r.sines(i)) << '\n';
        os << "norm2," << detail::csv_num(r.norm2) << '\n';
        os << "normF," << detail::csv_num(r.normF) << '\n';
    } else {
        os << "{\"k\":" << r.k << ",\"sines\":[";
        for (Eigen::Index i = 0; i < r.sines.size(); ++i)
            os << (i ? "," : "") << detail::json_num(r.sines(i));
        os << "],\"norm2\":" << detail::json_num(r.norm2)
           << ",\"normF\":" << detail::json_num(r.normF) << "}\n";
    }
    if (!os) throw IoFailure("save_report: stream write failed");
}

inline void save_report(const BoundReport& r, ReportFormat fmt, std::ostream& os) {
    const char* norm = r.normKind == NormKind::Spectral ? "spectral" : "frobenius";
    if (fmt == ReportFormat::Csv) {
        os << "term,value\n";
        os << "step1," << detail::csv_num(r.step1) << '\n';
        os << "step2," << detail::csv_num(r.step2) << '\n';
        os << "correction_factor," << detail::csv_num(r.correctionFactor) << '\n';
        os << "total," << detail::csv_num(r.total) << '\n';
        os << "norm," << norm << '\n';
        os << "applicable," << (r.applicable ? 1 : 0) << '\n';
        os << "reason," << detail::csv_field(r.reason) << '\n';
    } else {
        os << "{\"step1\":" << detail::json_num(r.step1)
           << ",\"step2\":" << detail::json_num(r.step2)
           << ",\"correctionFactor\":" << detail::json_num(r.correctionFactor)
           << ",\"total\":" << detail::json_num(r.total)
           << ",\"norm\":" << detail::json_str(norm)
           << ",\"applicable\":" << (r.applicable ? "true" : "false")
           << ",\"reason\":" << detail::json_str(r.reason) << "}\n";
    }
    if (!os) throw IoFailure("save_report: stream write failed");
}

inline void save_report(const SweepResult& r, ReportFormat fmt, std::ostream& os) {
    if (fmt == ReportFormat::Csv) {
        os << "kappa,left,right,quotient,flag\n";
        for (size_t i = 0; i < r.kappaGrid.size(); ++i)
            os << detail::csv_num(r.kappaGrid[i]) << ',' << detail::csv_num(r.left[i]) << ','
               << detail::csv_num(r.right[i]) << ',' << detail::csv_num(r.quotient[i]) << ','
               << detail::csv_field(r.flag[i]) << '\n';
    } else {
        const auto arr = [&os](const std::vector<double>& v) {
            os << '[';
            for (size_t i = 0; i < v.size(); ++i)
                os << (i ? "," : "") << detail::json_num(v[i]);
            os << ']';
        };
        os << "{\"variant\":" << detail::json_str(to_string(r.variant))
           << ",\"boundKind\":"
           << detail::json_str(r.boundKind == NormKind::Spectral ? "spectral" : "frobenius")
           << ",\"reference\":"
           << detail::json_str(r.reference == ReferenceSubspace::Limit ? "limit"
                                                                       : "perturbed-pair")
           << ",\"k\":" << r.k << ",\"kappa\":";
        arr(r.kappaGrid);
        os << ",\"left\":";
        arr(r.left);
        os << ",\"right\":";
        arr(r.right);
        os << ",\"quotient\":";
        arr(r.quotient);
        os << ",\"flag\":[";
        for (size_t i = 0; i < r.flag.size(); ++i)
            os << (i ? "," : "") << detail::json_str(r.flag[i]);
        os << "],\"slopeLeft\":" << detail::json_num(r.slopeLeft)
           << ",\"slopeRight\":" << detail::json_num(r.slopeRight) << "}\n";
    }
    if (!os) throw IoFailure("save_report: stream write failed");
}

}  // namespace defpair
