#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hysid/core.hpp"

namespace hysid {

inline constexpr int kMaxPolyDegree = 4;

/// Grammar of candidate terms: every deriv-factor x monomial in (u, w, |w|)
/// up to `max_poly_degree`, optionally multiplied by y^0 and y^1.
struct LibrarySpec {
    int max_poly_degree = 2;
    bool include_none = true;
    bool include_signed = true;
    bool include_absolute = true;
    bool include_aux = false;
    std::string preset_name = "custom";
};

inline constexpr std::string_view kDefaultPreset = "duhem-bouc-wen-poly";
inline constexpr std::string_view kButterflyPreset = "butterfly-aux";

/// Throws InvalidParameter for degree outside [0, 4] or no deriv factor.
void validate(const LibrarySpec& spec);

/// Resolves a preset name; throws UnknownPreset otherwise.
LibrarySpec library_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Canonicalized, deduplicated terms in canonical order.
std::vector<TermDescriptor> enumerate_terms(const LibrarySpec& spec);

/// {u', |u'|*w, u'*|w|}: the n = 1 Bouc-Wen feature set used by the
/// regression baselines.
std::vector<TermDescriptor> bouc_wen_feature_terms();

/// Evaluates `terms` on the samples. `aux` (the y signal) must be present
/// exactly when some term has pow_y > 0.
LibraryMatrix build_library(std::span<const TermDescriptor> terms, const TimeSeries& ts,
                            const DerivedSeries& ds,
                            std::optional<std::span<const double>> aux = std::nullopt);

/// Grammar-driven overload; aux required iff spec.include_aux.
LibraryMatrix build_library(const LibrarySpec& spec, const TimeSeries& ts, const DerivedSeries& ds,
                            std::optional<std::span<const double>> aux = std::nullopt);

/// Pointwise evaluation of one term.
double evaluate_term(const TermDescriptor& d, double u, double du, double w, double y = 0.0);

}  // namespace hysid
