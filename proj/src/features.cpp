#include "hysid/features.hpp"

#include <algorithm>
#include <cmath>

#include "hysid/kernels.hpp"

namespace hysid {

void validate(const LibrarySpec& spec) {
    if (spec.max_poly_degree < 0 || spec.max_poly_degree > kMaxPolyDegree) {
        throw Error(ErrorCode::InvalidParameter,
                    "max_poly_degree must lie in [0, " + std::to_string(kMaxPolyDegree) + "]");
    }
    if (!spec.include_none && !spec.include_signed && !spec.include_absolute) {
        throw Error(ErrorCode::InvalidParameter, "at least one derivative factor must be enabled");
    }
}

LibrarySpec library_preset(std::string_view name) {
    LibrarySpec spec;
    spec.preset_name = std::string(name);
    if (name == kDefaultPreset) return spec;
    if (name == kButterflyPreset) {
        spec.include_aux = true;
        return spec;
    }
    throw Error(ErrorCode::UnknownPreset, "unknown library preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
    return {std::string(kDefaultPreset), std::string(kButterflyPreset)};
}

std::vector<TermDescriptor> enumerate_terms(const LibrarySpec& spec) {
    validate(spec);
    std::vector<DerivFactor> factors;
    if (spec.include_none) factors.push_back(DerivFactor::None);
    if (spec.include_signed) factors.push_back(DerivFactor::Signed);
    if (spec.include_absolute) factors.push_back(DerivFactor::Absolute);

    const int deg = spec.max_poly_degree;
    const int max_y = spec.include_aux ? 1 : 0;
    std::vector<TermDescriptor> terms;
    for (DerivFactor f : factors) {
        for (int pu = 0; pu <= deg; ++pu) {
            for (int pw = 0; pu + pw <= deg; ++pw) {
                for (int pa = 0; pu + pw + pa <= deg; ++pa) {
                    for (int py = 0; py <= max_y; ++py) {
                        TermDescriptor d = canonicalize({f, pu, pw, pa, py});
                        if (std::find(terms.begin(), terms.end(), d) == terms.end()) {
                            terms.push_back(d);
                        }
                    }
                }
            }
        }
    }
    std::sort(terms.begin(), terms.end(), canonical_less);
    return terms;
}

std::vector<TermDescriptor> bouc_wen_feature_terms() {
    return {
        {DerivFactor::Signed, 0, 0, 0, 0},
        {DerivFactor::Absolute, 0, 1, 0, 0},
        {DerivFactor::Signed, 0, 0, 1, 0},
    };
}

double evaluate_term(const TermDescriptor& d, double u, double du, double w, double y) {
    double v = 1.0;
    if (d.deriv == DerivFactor::Signed) v = du;
    if (d.deriv == DerivFactor::Absolute) v = std::abs(du);
    for (int k = 0; k < d.pow_u; ++k) v *= u;
    for (int k = 0; k < d.pow_w; ++k) v *= w;
    for (int k = 0; k < d.pow_abs_w; ++k) v *= std::abs(w);
    for (int k = 0; k < d.pow_y; ++k) v *= y;
    return v;
}

LibraryMatrix build_library(std::span<const TermDescriptor> terms, const TimeSeries& ts,
                            const DerivedSeries& ds, std::optional<std::span<const double>> aux) {
    const std::size_t n = ts.size();
    if (ts.u.size() != n || ts.w.size() != n || ds.du.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "series and derivatives differ in length");
    }
    const bool needs_aux =
        std::any_of(terms.begin(), terms.end(), [](const TermDescriptor& d) { return d.pow_y > 0; });
    if (needs_aux && !aux) throw Error(ErrorCode::MissingAux, "library has y terms but no aux signal");
    if (aux && aux->size() != n) {
        throw Error(ErrorCode::LengthMismatch, "aux signal length differs from series");
    }

    const auto& k = kernels::active();
    LibraryMatrix lib;
    lib.terms.assign(terms.begin(), terms.end());
    lib.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(terms.size()));

    // Factor order matches evaluate_term so both paths round identically.
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const TermDescriptor& d = terms[j];
        std::span<double> col(lib.values.col(static_cast<Eigen::Index>(j)).data(), n);
        switch (d.deriv) {
            case DerivFactor::None: std::fill(col.begin(), col.end(), 1.0); break;
            case DerivFactor::Signed: std::copy(ds.du.begin(), ds.du.end(), col.begin()); break;
            case DerivFactor::Absolute: k.absolute(col, ds.du); break;
        }
        for (int p = 0; p < d.pow_u; ++p) k.multiply(col, ts.u);
        for (int p = 0; p < d.pow_w; ++p) k.multiply(col, ts.w);
        for (int p = 0; p < d.pow_abs_w; ++p) k.multiply_abs(col, ts.w);
        for (int p = 0; p < d.pow_y; ++p) k.multiply(col, *aux);
    }
    check_library(lib);
    return lib;
}

LibraryMatrix build_library(const LibrarySpec& spec, const TimeSeries& ts, const DerivedSeries& ds,
                            std::optional<std::span<const double>> aux) {
    if (spec.include_aux && !aux) {
        throw Error(ErrorCode::MissingAux, "preset '" + spec.preset_name + "' needs the y signal");
    }
    const auto terms = enumerate_terms(spec);
    return build_library(terms, ts, ds, spec.include_aux ? aux : std::nullopt);
}

}  // namespace hysid
