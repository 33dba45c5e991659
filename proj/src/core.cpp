#include "hysid/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace hysid {

TimeSeries validate_series(TimeSeries ts) {
    const std::size_t n = ts.t.size();
    if (ts.u.size() != n || ts.w.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "t, u and w must have equal length");
    }
    if (n < kMinSamples) {
        throw Error(ErrorCode::TooShort,
                    "need at least " + std::to_string(kMinSamples) + " samples, got " +
                        std::to_string(n),
                    n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ts.t[i]) || !std::isfinite(ts.u[i]) || !std::isfinite(ts.w[i])) {
            throw Error(ErrorCode::NonFinite, "non-finite value in series", i);
        }
    }
    const double dt = ts.t[1] - ts.t[0];
    if (!(dt > 0.0)) {
        throw Error(ErrorCode::NonUniformGrid, "time stamps must be strictly increasing", 1);
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double step = ts.t[i] - ts.t[i - 1];
        if (std::abs(step - dt) > kGridTolerance * dt) {
            throw Error(ErrorCode::NonUniformGrid,
                        "sample spacing deviates from dt = " + std::to_string(dt), i);
        }
    }
    return ts;
}

int TermDescriptor::graded_degree() const noexcept {
    return poly_degree() + pow_y + (deriv == DerivFactor::None ? 0 : 1);
}

namespace {
void append_factor(std::string& out, std::string_view base, int power) {
    if (power <= 0) return;
    if (!out.empty()) out += '*';
    out += base;
    if (power > 1) {
        out += '^';
        out += std::to_string(power);
    }
}
}  // namespace

std::string TermDescriptor::name() const {
    std::string out;
    if (deriv == DerivFactor::Signed) out = "u'";
    if (deriv == DerivFactor::Absolute) out = "|u'|";
    append_factor(out, "u", pow_u);
    append_factor(out, "w", pow_w);
    append_factor(out, "|w|", pow_abs_w);
    append_factor(out, "y", pow_y);
    return out.empty() ? "1" : out;
}

TermDescriptor canonicalize(TermDescriptor d) {
    if (d.pow_abs_w >= 2) {
        d.pow_w += 2 * (d.pow_abs_w / 2);
        d.pow_abs_w %= 2;
    }
    return d;
}

std::strong_ordering canonical_compare(const TermDescriptor& a, const TermDescriptor& b) {
    if (auto c = a.graded_degree() <=> b.graded_degree(); c != 0) return c;
    if (auto c = static_cast<int>(a.deriv) <=> static_cast<int>(b.deriv); c != 0) return c;
    if (auto c = b.pow_u <=> a.pow_u; c != 0) return c;
    if (auto c = b.pow_w <=> a.pow_w; c != 0) return c;
    if (auto c = b.pow_abs_w <=> a.pow_abs_w; c != 0) return c;
    return b.pow_y <=> a.pow_y;
}

TermDescriptor parse_term_name(const std::string& name) {
    TermDescriptor d;
    if (name == "1") return d;
    auto fail = [&](const std::string& why) {
        throw Error(ErrorCode::ParseError, "bad term name '" + name + "': " + why);
    };
    if (name.empty()) fail("empty");
    std::size_t pos = 0;
    bool first = true;
    while (pos < name.size()) {
        std::size_t end = name.find('*', pos);
        if (end == std::string::npos) end = name.size();
        std::string factor = name.substr(pos, end - pos);
        pos = end + 1;
        if (end == name.size()) pos = name.size();

        if (factor == "u'" || factor == "|u'|") {
            if (!first) fail("derivative factor must come first");
            d.deriv = factor == "u'" ? DerivFactor::Signed : DerivFactor::Absolute;
            first = false;
            continue;
        }
        first = false;
        int power = 1;
        std::string base = factor;
        if (auto caret = factor.find('^'); caret != std::string::npos) {
            base = factor.substr(0, caret);
            const char* begin = factor.data() + caret + 1;
            const char* last = factor.data() + factor.size();
            auto [ptr, ec] = std::from_chars(begin, last, power);
            if (ec != std::errc{} || ptr != last || power < 1) fail("bad exponent");
        }
        if (base == "u") d.pow_u += power;
        else if (base == "w") d.pow_w += power;
        else if (base == "|w|") d.pow_abs_w += power;
        else if (base == "y") d.pow_y += power;
        else fail("unknown factor '" + base + "'");
    }
    return canonicalize(d);
}

std::size_t LibraryMatrix::find(const TermDescriptor& d) const {
    auto it = std::find(terms.begin(), terms.end(), d);
    return static_cast<std::size_t>(it - terms.begin());
}

void check_library(const LibraryMatrix& lib) {
    if (lib.cols() != lib.terms.size()) {
        throw Error(ErrorCode::ShapeMismatch, "column count differs from term count");
    }
    if (!lib.values.allFinite()) {
        throw Error(ErrorCode::NonFinite, "library contains non-finite entries");
    }
    for (std::size_t j = 0; j < lib.terms.size(); ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            if (lib.terms[j] == lib.terms[k]) {
                throw Error(ErrorCode::InvalidParameter,
                            "duplicate term " + lib.terms[j].name(), j);
            }
        }
    }
}

std::size_t SparseModel::support_size() const {
    return static_cast<std::size_t>(
        std::count_if(coefficients.begin(), coefficients.end(), [](double c) { return c != 0.0; }));
}

std::vector<std::size_t> SparseModel::support() const {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        if (coefficients[j] != 0.0) idx.push_back(j);
    }
    return idx;
}

double SparseModel::coefficient(const TermDescriptor& d) const {
    for (std::size_t j = 0; j < terms.size(); ++j) {
        if (terms[j] == d) return coefficients[j];
    }
    return 0.0;
}

namespace {
std::string format_significant(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    return buf;
}
}  // namespace

std::string render_equation(const SparseModel& model, int precision) {
    precision = std::clamp(precision, 1, 17);
    std::vector<std::size_t> order = model.support();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return canonical_less(model.terms[a], model.terms[b]);
    });

    std::string out = model.target_name + " =";
    if (order.empty()) return out + " 0";

    bool first = true;
    for (std::size_t j : order) {
        const double c = model.coefficients[j];
        const TermDescriptor& term = model.terms[j];
        std::string magnitude = format_significant(first ? c : std::abs(c), precision);
        if (first) {
            out += ' ';
        } else {
            out += c < 0.0 ? " - " : " + ";
        }
        out += magnitude;
        if (term != TermDescriptor{}) {
            out += '*';
            out += term.name();
        }
        first = false;
    }
    return out;
}

}  // namespace hysid
