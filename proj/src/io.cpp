#include "hysid/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hysid {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::ifstream open_for_read(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw Error(ErrorCode::FileNotFound, "cannot find file " + path.string());
    }
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return in;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

void validate(const CsvSchema& schema) {
    if (schema.delimiter == '\n' || schema.delimiter == '\r' || schema.delimiter == '\0') {
        throw Error(ErrorCode::InvalidParameter, "invalid CSV delimiter");
    }
    if (schema.input_col == schema.output_col ||
        (schema.time_col && (*schema.time_col == schema.input_col ||
                             *schema.time_col == schema.output_col))) {
        throw Error(ErrorCode::InvalidParameter, "CSV column indices must be distinct");
    }
    if (!schema.time_col) {
        if (!schema.dt || !(*schema.dt > 0.0) || !std::isfinite(*schema.dt)) {
            throw Error(ErrorCode::InvalidParameter, "a positive dt is required without a time column");
        }
    }
}

TimeSeries read_csv(const fs::path& path, const CsvSchema& schema,
                    std::optional<std::size_t> max_points) {
    validate(schema);
    std::ifstream in = open_for_read(path);

    std::size_t needed = std::max(schema.input_col, schema.output_col);
    if (schema.time_col) needed = std::max(needed, *schema.time_col);

    TimeSeries ts;
    std::string line;
    bool header_pending = schema.has_header;
    std::size_t row = 0;
    while ((!max_points || row < *max_points) && std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto cells = split(line, schema.delimiter);
        if (cells.size() <= needed) {
            throw Error(ErrorCode::ParseError,
                        "row " + std::to_string(row) + ": expected at least " +
                            std::to_string(needed + 1) + " columns, found " +
                            std::to_string(cells.size()),
                        row);
        }
        auto cell = [&](std::size_t col) {
            const auto v = parse_double(cells[col]);
            if (!v) {
                throw Error(ErrorCode::ParseError,
                            "row " + std::to_string(row) + ", column " + std::to_string(col) +
                                ": cannot parse '" + std::string(trim(cells[col])) + "'",
                            row);
            }
            return *v;
        };
        ts.t.push_back(schema.time_col ? cell(*schema.time_col)
                                       : static_cast<double>(row) * *schema.dt);
        ts.u.push_back(cell(schema.input_col));
        ts.w.push_back(cell(schema.output_col));
        ++row;
    }
    return validate_series(std::move(ts));
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error(ErrorCode::IoError, "number formatting failed");
    return std::string(buf, ptr);
}

void write_series_csv(const fs::path& path, const TimeSeries& ts, const Prediction* prediction) {
    const std::size_t n = ts.size();
    if (ts.u.size() != n || ts.w.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "series columns differ in length");
    }
    if (prediction && (prediction->w_pred.size() != n || prediction->abs_err.size() != n)) {
        throw Error(ErrorCode::LengthMismatch, "prediction length differs from series");
    }
    std::string text = prediction ? "t,u,w,w_pred,abs_err\n" : "t,u,w\n";
    for (std::size_t i = 0; i < n; ++i) {
        text += format_double(ts.t[i]);
        text += ',';
        text += format_double(ts.u[i]);
        text += ',';
        text += format_double(ts.w[i]);
        if (prediction) {
            text += ',';
            text += format_double(prediction->w_pred[i]);
            text += ',';
            text += format_double(prediction->abs_err[i]);
        }
        text += '\n';
    }
    write_text(path, text);
}

void write_aux_csv(const fs::path& path, const TimeSeries& ts, std::span<const double> y) {
    if (y.size() != ts.size() || ts.u.size() != ts.size()) {
        throw Error(ErrorCode::LengthMismatch, "aux signal length differs from series");
    }
    std::string text = "t,u,y\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        text += format_double(ts.t[i]);
        text += ',';
        text += format_double(ts.u[i]);
        text += ',';
        text += format_double(y[i]);
        text += '\n';
    }
    write_text(path, text);
}

std::string serialize_model(const SparseModel& model, const FitReport& report) {
    if (model.coefficients.size() != model.terms.size()) {
        throw Error(ErrorCode::ShapeMismatch, "model has mismatched coefficient and term counts");
    }
    std::string library;
    for (std::size_t j = 0; j < model.terms.size(); ++j) {
        if (j) library += ',';
        library += model.terms[j].name();
    }
    std::ostringstream out;
    out << "target = " << model.target_name << '\n'
        << "threshold = " << format_double(model.threshold) << '\n'
        << "iterations = " << model.iterations << '\n'
        << "converged = " << (model.converged ? "true" : "false") << '\n'
        << "library = " << library << '\n'
        << "r_percent = " << format_double(report.r_percent) << '\n'
        << "nrmse = " << format_double(report.nrmse) << '\n'
        << "r2 = " << format_double(report.r2) << '\n'
        << "noise_percent = " << format_double(report.noise_percent) << '\n'
        << "fit_seconds = " << format_double(report.fit_seconds) << '\n'
        << "simulate_seconds = " << format_double(report.simulate_seconds) << '\n';

    std::vector<std::size_t> order = model.support();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return canonical_less(model.terms[a], model.terms[b]);
    });
    for (std::size_t j : order) {
        out << format_double(model.coefficients[j]) << '\t' << model.terms[j].name() << '\n';
    }
    out << render_equation(model) << '\n';
    return out.str();
}

ModelFile parse_model(const std::string& text) {
    ModelFile file;
    SparseModel& m = file.model;
    bool have_library = false;
    std::vector<std::pair<TermDescriptor, double>> coefficients;

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::ParseError, "model line " + std::to_string(line_no) + ": " + what,
                    line_no);
    };
    auto number = [&](std::string_view s) {
        const auto v = parse_double(s);
        if (!v) fail("bad number '" + std::string(trim(s)) + "'");
        return *v;
    };

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (const auto tab = raw.find('\t'); tab != std::string::npos) {
            const double c = number(std::string_view(raw).substr(0, tab));
            const std::string name(trim(std::string_view(raw).substr(tab + 1)));
            try {
                coefficients.emplace_back(parse_term_name(name), c);
            } catch (const Error&) {
                fail("unknown term '" + name + "'");
            }
            continue;
        }
        const auto eq = line.find(" = ");
        if (eq == std::string_view::npos) fail("expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 3));

        if (key == "target") {
            m.target_name = std::string(value);
        } else if (key == "threshold") {
            m.threshold = number(value);
        } else if (key == "iterations") {
            m.iterations = static_cast<int>(number(value));
        } else if (key == "converged") {
            if (value != "true" && value != "false") fail("converged must be true or false");
            m.converged = value == "true";
        } else if (key == "library") {
            have_library = true;
            m.terms.clear();
            if (!value.empty()) {
                for (auto name : split(value, ',')) {
                    try {
                        m.terms.push_back(parse_term_name(std::string(trim(name))));
                    } catch (const Error&) {
                        fail("unknown term '" + std::string(trim(name)) + "'");
                    }
                }
            }
        } else if (key == "r_percent") {
            file.report.r_percent = number(value);
        } else if (key == "nrmse") {
            file.report.nrmse = number(value);
        } else if (key == "r2") {
            file.report.r2 = number(value);
        } else if (key == "noise_percent") {
            file.report.noise_percent = number(value);
        } else if (key == "fit_seconds") {
            file.report.fit_seconds = number(value);
        } else if (key == "simulate_seconds") {
            file.report.simulate_seconds = number(value);
        } else if (key == m.target_name) {
            // Rendered equation: informational only.
        } else {
            fail("unknown key '" + key + "'");
        }
    }

    if (!have_library) {
        for (const auto& [term, c] : coefficients) m.terms.push_back(term);
    }
    m.coefficients.assign(m.terms.size(), 0.0);
    for (const auto& [term, c] : coefficients) {
        const auto it = std::find(m.terms.begin(), m.terms.end(), term);
        if (it == m.terms.end()) {
            throw Error(ErrorCode::ParseError, "term '" + term.name() + "' is not in the library");
        }
        m.coefficients[static_cast<std::size_t>(it - m.terms.begin())] = c;
    }
    return file;
}

void write_model(const fs::path& path, const SparseModel& model, const FitReport& report) {
    write_text(path, serialize_model(model, report));
}

ModelFile read_model(const fs::path& path) {
    std::ifstream in = open_for_read(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

}  // namespace hysid
