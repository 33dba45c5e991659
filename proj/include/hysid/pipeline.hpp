#pragma once

// End-to-end experiment drivers shared by the CLI and the acceptance suite:
// differentiate -> library -> regression -> forward simulation -> metrics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hysid/core.hpp"
#include "hysid/features.hpp"
#include "hysid/generators.hpp"
#include "hysid/regress.hpp"
#include "hysid/simulate.hpp"

namespace hysid {

enum class SystemKind { Duhem, BoucWen, Butterfly };

SystemKind parse_system(std::string_view name);
std::string_view to_string(SystemKind kind);

/// A synthetic hysteretic system and the excitation that drives it.
struct SystemSpec {
    SystemKind kind = SystemKind::Duhem;
    DuhemParams duhem;
    BoucWenParams bouc_wen;
    HarmonicExcitation excitation;
    double offset = 0.0;  ///< butterfly only: w = y^2 + offset
    double w0 = 0.0;      ///< initial state (y0 for the butterfly)
};

/// Clean data for `spec`. For the butterfly, `aux` receives y when non-null.
TimeSeries generate_series(const SystemSpec& spec, std::size_t n_points, double dt,
                           std::vector<double>* aux = nullptr);

/// Support of the generating equation in library terms.
std::vector<TermDescriptor> true_support(const SystemSpec& spec);

struct FitOptions {
    LibrarySpec library;
    StlsqConfig stlsq;
    std::optional<double> w0;  ///< defaults to the first reference sample
    /// Trajectory the metrics are scored against; the fitted series' w when empty.
    std::span<const double> reference;
    std::string target_name = "dw/dt";
    /// Model for y when the library uses it; enables coupled prediction.
    std::optional<AuxModel> aux_model;
};

struct FitResult {
    FitReport report;
    Prediction prediction;
    DerivedSeries derived;
};

/// Full pipeline on one series. `aux` is the measured y for aux libraries.
FitResult fit_series(const TimeSeries& ts, const FitOptions& options,
                     std::optional<std::span<const double>> aux = std::nullopt);

struct ButterflyResult {
    FitResult inner;  ///< dy/dt over (u, u', y)
    FitResult outer;  ///< dw/dt over the aux library
    Prediction coupled;
    double r_percent = 0.0;
    double nrmse = 0.0;
    double r2 = 0.0;
    std::vector<std::pair<std::string, double>> ratios;
};

/// Two-stage butterfly identification and coupled forward simulation.
ButterflyResult fit_butterfly(const TimeSeries& ts, std::span<const double> y,
                              const StlsqConfig& stlsq);

/// For each inner support term, outer coefficient of the matching term of
/// 2*y*dy/dt divided by the inner coefficient. y*w-type products map to w
/// itself, so an offset in w does not change the pairing.
std::vector<std::pair<std::string, double>> butterfly_ratios(const SparseModel& inner,
                                                             const SparseModel& outer);

enum class Method { Stlsq, Ols, Ridge };

Method parse_method(std::string_view name);
std::string_view to_string(Method m);

struct BenchConfig {
    SystemSpec system;
    std::vector<std::size_t> sizes{1000, 5000, 10000};
    std::vector<double> noises{0.0};
    std::vector<Method> methods{Method::Stlsq, Method::Ols, Method::Ridge};
    double threshold = 0.1;
    double ridge_penalty = 1.0;
    int seeds = 5;
    std::uint64_t base_seed = 42;
    /// Fixed step; otherwise each size spans kDefaultPeriods periods.
    std::optional<double> dt;
    LibrarySpec library;
    /// Baselines regress on the Bouc-Wen feature set whatever the data.
    bool mismatched_library = false;
};

void validate(const BenchConfig& cfg);

struct BenchRun {
    std::uint64_t seed = 0;
    double r_percent = 0.0;  ///< +inf when the prediction diverged
    double fit_seconds = 0.0;
    bool support_recovered = false;
    SparseModel model;
};

struct BenchCell {
    Method method = Method::Stlsq;
    std::size_t size = 0;
    double noise = 0.0;
    double threshold = 0.0;
    double r_percent = 0.0;  ///< mean over runs
    double fit_seconds = 0.0;
    std::vector<BenchRun> runs;
};

/// Data cells (size x noise) share noisy data across methods; run k of data
/// cell c uses seed base_seed + c*seeds + k.
std::vector<BenchCell> run_bench(const BenchConfig& cfg);

/// `method,size,noise,threshold,R_percent,fit_seconds`, one row per cell.
std::string bench_csv(const std::vector<BenchCell>& cells);

/// Features the regression baselines use for `cfg`.
std::vector<TermDescriptor> baseline_terms(const BenchConfig& cfg);

/// Named parameter bundles reproducing each experiment.
struct Experiment {
    std::string name;
    std::string description;
    SystemSpec system;
    std::size_t points = 10000;
    std::optional<double> dt;
    double noise = 0.0;
    double threshold = 0.1;
    std::optional<std::size_t> max_points;
    BenchConfig bench;
};

const Experiment& experiment(std::string_view name);
std::vector<std::string> experiment_names();

/// dt for an experiment-style request: explicit, else kDefaultPeriods periods.
double resolve_dt(const HarmonicExcitation& exc, std::size_t points, std::optional<double> dt);

}  // namespace hysid
