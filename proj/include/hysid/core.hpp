#pragma once

// Domain types shared by every stage of the identification pipeline:
// sampled input/output records, candidate-term descriptors, the evaluated
// term library, and the sparse model produced by regression.

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hysid/error.hpp"

namespace hysid {

inline constexpr std::size_t kMinSamples = 4;
inline constexpr double kGridTolerance = 1e-9;

/// Uniformly sampled excitation/response record.
struct TimeSeries {
    std::vector<double> t;  ///< seconds
    std::vector<double> u;  ///< input, volts
    std::vector<double> w;  ///< output, displacement units

    std::size_t size() const noexcept { return t.size(); }
    double dt() const { return t.at(1) - t.at(0); }
};

/// Time derivatives of a TimeSeries, sample-aligned with it.
struct DerivedSeries {
    std::vector<double> du;
    std::vector<double> dw;

    std::size_t size() const noexcept { return du.size(); }
};

/// Checks length, finiteness and grid uniformity. Returns the input on
/// success; throws Error naming the first offending index otherwise.
TimeSeries validate_series(TimeSeries ts);

enum class DerivFactor : std::uint8_t { None = 0, Signed = 1, Absolute = 2 };

/// Identity of one candidate term: deriv · u^pow_u · w^pow_w · |w|^pow_abs_w · y^pow_y.
struct TermDescriptor {
    DerivFactor deriv = DerivFactor::None;
    int pow_u = 0;
    int pow_w = 0;
    int pow_abs_w = 0;
    int pow_y = 0;

    /// Sum of the u, w and |w| exponents.
    int poly_degree() const noexcept { return pow_u + pow_w + pow_abs_w; }
    /// poly_degree plus pow_y plus one for a derivative factor; the grading
    /// key of the canonical order.
    int graded_degree() const noexcept;

    /// Display name, e.g. "1", "u'", "|u'|*u", "w*|w|", "u^2*y".
    std::string name() const;

    friend bool operator==(const TermDescriptor&, const TermDescriptor&) = default;
};

/// Folds even powers of |w| into w: |w|^(2k) -> w^(2k), |w|^(2k+1) -> w^(2k)*|w|.
TermDescriptor canonicalize(TermDescriptor d);

/// Canonical library order: graded degree ascending, then derivative factor
/// (None < Signed < Absolute), then pow_u, pow_w, pow_abs_w, pow_y descending.
std::strong_ordering canonical_compare(const TermDescriptor& a, const TermDescriptor& b);
inline bool canonical_less(const TermDescriptor& a, const TermDescriptor& b) {
    return canonical_compare(a, b) < 0;
}

/// Inverse of TermDescriptor::name(). Throws Error(ParseError) on unknown syntax.
TermDescriptor parse_term_name(const std::string& name);

/// n x m evaluation of candidate terms, column-major, one column per term.
struct LibraryMatrix {
    Eigen::MatrixXd values;
    std::vector<TermDescriptor> terms;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
    /// Column index of `d`, or cols() when absent.
    std::size_t find(const TermDescriptor& d) const;
};

/// Throws ShapeMismatch / NonFinite / InvalidParameter (duplicate terms).
void check_library(const LibraryMatrix& lib);

/// Sparse coefficient vector over a term library.
struct SparseModel {
    std::vector<double> coefficients;
    std::vector<TermDescriptor> terms;
    double threshold = 0.0;
    int iterations = 0;
    bool converged = true;
    std::string target_name = "dw/dt";

    std::size_t support_size() const;
    /// Indices of nonzero coefficients in term order.
    std::vector<std::size_t> support() const;
    /// Coefficient of `d`, or 0 when the term is absent.
    double coefficient(const TermDescriptor& d) const;
};

struct FitReport {
    SparseModel model;
    double r_percent = 0.0;
    double nrmse = 0.0;
    double r2 = 1.0;
    double fit_seconds = 0.0;
    double simulate_seconds = 0.0;
    double noise_percent = 0.0;
};

/// Human-readable equation listing nonzero terms in canonical order with
/// coefficients rounded to `precision` significant digits, e.g.
/// "dw/dt = -0.17 - 2.38*u + 0.58*u'".
std::string render_equation(const SparseModel& model, int precision = 3);

}  // namespace hysid
