#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hysid/core.hpp"
#include "hysid/simulate.hpp"

namespace hysid {

/// Column layout of an input CSV. Without a time column, `dt` must be set
/// and t is synthesized as i*dt.
struct CsvSchema {
    std::optional<std::size_t> time_col = 0;
    std::size_t input_col = 1;
    std::size_t output_col = 2;
    bool has_header = true;
    char delimiter = ',';
    std::optional<double> dt;
};

void validate(const CsvSchema& schema);

/// Reads (t, u, w); keeps the first `max_points` data rows when set. Throws
/// FileNotFound, ParseError (index = zero-based data row, column in the
/// message) and anything validate_series throws.
TimeSeries read_csv(const std::filesystem::path& path, const CsvSchema& schema = {},
                    std::optional<std::size_t> max_points = std::nullopt);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Header t,u,w and, with a prediction, w_pred,abs_err.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& ts,
                      const Prediction* prediction = nullptr);

/// Auxiliary signal file with header t,u,y.
void write_aux_csv(const std::filesystem::path& path, const TimeSeries& ts,
                   std::span<const double> y);

struct ModelFile {
    SparseModel model;
    FitReport report;  ///< metrics and timings; report.model is left empty
};

std::string serialize_model(const SparseModel& model, const FitReport& report);
ModelFile parse_model(const std::string& text);

void write_model(const std::filesystem::path& path, const SparseModel& model,
                 const FitReport& report);
ModelFile read_model(const std::filesystem::path& path);

}  // namespace hysid
