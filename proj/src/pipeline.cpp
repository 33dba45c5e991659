#include "hysid/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "hysid/diff.hpp"
#include "hysid/io.hpp"
#include "hysid/kernels.hpp"

namespace hysid {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

constexpr TermDescriptor term(DerivFactor f, int pu, int pw, int pa = 0, int py = 0) {
    return TermDescriptor{f, pu, pw, pa, py};
}

bool same_support(const SparseModel& model, const std::vector<TermDescriptor>& expected) {
    std::vector<TermDescriptor> found;
    for (std::size_t j : model.support()) found.push_back(model.terms[j]);
    if (found.size() != expected.size()) return false;
    return std::all_of(expected.begin(), expected.end(), [&](const TermDescriptor& d) {
        return std::find(found.begin(), found.end(), d) != found.end();
    });
}

}  // namespace

SystemKind parse_system(std::string_view name) {
    if (name == "duhem") return SystemKind::Duhem;
    if (name == "bouc-wen") return SystemKind::BoucWen;
    if (name == "butterfly") return SystemKind::Butterfly;
    throw Error(ErrorCode::InvalidParameter, "unknown model '" + std::string(name) +
                                                 "' (expected duhem, bouc-wen or butterfly)");
}

std::string_view to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::Duhem: return "duhem";
        case SystemKind::BoucWen: return "bouc-wen";
        case SystemKind::Butterfly: return "butterfly";
    }
    return "?";
}

TimeSeries generate_series(const SystemSpec& spec, std::size_t n_points, double dt,
                           std::vector<double>* aux) {
    switch (spec.kind) {
        case SystemKind::Duhem:
            return simulate_duhem(spec.duhem, spec.excitation, n_points, dt, spec.w0);
        case SystemKind::BoucWen:
            return simulate_bouc_wen(spec.bouc_wen, spec.excitation, n_points, dt, spec.w0);
        case SystemKind::Butterfly: {
            ButterflyData data =
                simulate_butterfly(spec.duhem, spec.excitation, n_points, dt, spec.w0, spec.offset);
            if (aux) *aux = std::move(data.y);
            return std::move(data.series);
        }
    }
    throw Error(ErrorCode::InvalidParameter, "unknown system");
}

std::vector<TermDescriptor> true_support(const SystemSpec& spec) {
    using F = DerivFactor;
    switch (spec.kind) {
        case SystemKind::Duhem:
            return {term(F::Absolute, 1, 0), term(F::Absolute, 0, 1), term(F::Signed, 0, 0)};
        case SystemKind::BoucWen: {
            const int n = spec.bouc_wen.n;
            return {term(F::Signed, 0, 0), canonicalize(term(F::Absolute, 0, 1, n - 1)),
                    canonicalize(term(F::Signed, 0, 0, n))};
        }
        case SystemKind::Butterfly: {
            std::vector<TermDescriptor> s{term(F::Absolute, 1, 0, 0, 1), term(F::Absolute, 0, 1),
                                          term(F::Signed, 0, 0, 0, 1)};
            if (spec.offset != 0.0) s.push_back(term(F::Absolute, 0, 0));
            return s;
        }
    }
    return {};
}

FitResult fit_series(const TimeSeries& ts, const FitOptions& options,
                     std::optional<std::span<const double>> aux) {
    FitResult result;
    result.derived = differentiate_series(ts);
    const LibraryMatrix lib = build_library(options.library, ts, result.derived, aux);

    const auto fit_start = std::chrono::steady_clock::now();
    SparseModel model = stlsq(lib, result.derived.dw, options.stlsq);
    result.report.fit_seconds = seconds_since(fit_start);
    model.target_name = options.target_name;

    const std::span<const double> reference =
        options.reference.empty() ? std::span<const double>(ts.w) : options.reference;
    if (reference.size() != ts.size()) {
        throw Error(ErrorCode::LengthMismatch, "reference trajectory length differs from series");
    }
    const double w0 = options.w0.value_or(reference[0]);

    const auto sim_start = std::chrono::steady_clock::now();
    result.prediction = integrate_model(model, ts, result.derived, w0, options.aux_model);
    result.report.simulate_seconds = seconds_since(sim_start);
    kernels::active().abs_diff(reference, result.prediction.w_pred, result.prediction.abs_err);

    result.report.r_percent = relative_percent_error(reference, result.prediction.w_pred);
    result.report.nrmse = nrmse(reference, result.prediction.w_pred);
    result.report.r2 = r2_score(reference, result.prediction.w_pred);
    result.report.model = std::move(model);
    return result;
}

std::vector<std::pair<std::string, double>> butterfly_ratios(const SparseModel& inner,
                                                             const SparseModel& outer) {
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t j : inner.support()) {
        TermDescriptor d = inner.terms[j];
        if (d.pow_abs_w != 0 || d.pow_y != 0 || d.pow_w > 1) continue;
        // 2*y times the inner term: y*y is w, anything else gains a y factor.
        if (d.pow_w == 0) d.pow_y = 1;
        out.emplace_back(d.name(), outer.coefficient(d) / inner.coefficients[j]);
    }
    return out;
}

ButterflyResult fit_butterfly(const TimeSeries& ts, std::span<const double> y,
                              const StlsqConfig& stlsq_cfg) {
    if (y.size() != ts.size()) {
        throw Error(ErrorCode::LengthMismatch, "aux signal length differs from series");
    }
    ButterflyResult r;
    const TimeSeries inner_ts = validate_series(TimeSeries{ts.t, ts.u, {y.begin(), y.end()}});

    FitOptions inner_opts;
    inner_opts.library = library_preset(kDefaultPreset);
    inner_opts.stlsq = stlsq_cfg;
    inner_opts.target_name = "dy/dt";
    r.inner = fit_series(inner_ts, inner_opts);

    FitOptions outer_opts;
    outer_opts.library = library_preset(kButterflyPreset);
    outer_opts.stlsq = stlsq_cfg;
    outer_opts.aux_model = AuxModel{r.inner.report.model, y[0]};
    r.outer = fit_series(ts, outer_opts, y);

    r.coupled = r.outer.prediction;
    r.r_percent = r.outer.report.r_percent;
    r.nrmse = r.outer.report.nrmse;
    r.r2 = r.outer.report.r2;
    r.ratios = butterfly_ratios(r.inner.report.model, r.outer.report.model);
    return r;
}

Method parse_method(std::string_view name) {
    if (name == "stlsq") return Method::Stlsq;
    if (name == "ols") return Method::Ols;
    if (name == "ridge") return Method::Ridge;
    throw Error(ErrorCode::InvalidParameter,
                "unknown method '" + std::string(name) + "' (expected stlsq, ols or ridge)");
}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Stlsq: return "stlsq";
        case Method::Ols: return "ols";
        case Method::Ridge: return "ridge";
    }
    return "?";
}

void validate(const BenchConfig& cfg) {
    if (cfg.system.kind == SystemKind::Butterfly) {
        throw Error(ErrorCode::InvalidParameter, "bench supports duhem and bouc-wen data only");
    }
    if (cfg.methods.empty()) throw Error(ErrorCode::InvalidParameter, "method list is empty");
    if (cfg.sizes.empty()) throw Error(ErrorCode::InvalidParameter, "size list is empty");
    if (cfg.noises.empty()) throw Error(ErrorCode::InvalidParameter, "noise list is empty");
    if (cfg.seeds < 1) throw Error(ErrorCode::InvalidParameter, "seeds must be >= 1");
    for (std::size_t n : cfg.sizes) {
        if (n < kMinSamples) {
            throw Error(ErrorCode::TooShort, "bench size " + std::to_string(n) + " is too short", n);
        }
    }
    for (double p : cfg.noises) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorCode::InvalidParameter, "noise percent must be >= 0");
        }
    }
    if (!(cfg.ridge_penalty >= 0.0)) throw Error(ErrorCode::InvalidParameter, "ridge penalty must be >= 0");
    validate(StlsqConfig{cfg.threshold});
    validate(cfg.library);
}

std::vector<TermDescriptor> baseline_terms(const BenchConfig& cfg) {
    if (cfg.mismatched_library || cfg.system.kind == SystemKind::BoucWen) {
        return bouc_wen_feature_terms();
    }
    auto terms = true_support(cfg.system);
    std::sort(terms.begin(), terms.end(), canonical_less);
    return terms;
}

std::vector<BenchCell> run_bench(const BenchConfig& cfg) {
    validate(cfg);
    const auto expected = true_support(cfg.system);
    const auto base_terms = baseline_terms(cfg);
    std::vector<BenchCell> cells;

    std::uint64_t data_cell = 0;
    for (std::size_t size : cfg.sizes) {
        const double dt = resolve_dt(cfg.system.excitation, size, cfg.dt);
        const TimeSeries clean = generate_series(cfg.system, size, dt);
        for (double noise : cfg.noises) {
            const std::size_t first = cells.size();
            for (Method m : cfg.methods) {
                BenchCell cell;
                cell.method = m;
                cell.size = size;
                cell.noise = noise;
                cell.threshold = m == Method::Stlsq ? cfg.threshold : 0.0;
                cells.push_back(std::move(cell));
            }
            for (int k = 0; k < cfg.seeds; ++k) {
                const std::uint64_t seed =
                    cfg.base_seed + data_cell * static_cast<std::uint64_t>(cfg.seeds) +
                    static_cast<std::uint64_t>(k);
                const TimeSeries noisy = add_gaussian_noise(clean, noise, seed);
                const DerivedSeries ds = differentiate_series(noisy);
                for (std::size_t c = first; c < cells.size(); ++c) {
                    BenchRun run;
                    run.seed = seed;
                    const Method m = cells[c].method;
                    if (m == Method::Stlsq) {
                        const LibraryMatrix lib = build_library(cfg.library, noisy, ds);
                        const auto start = std::chrono::steady_clock::now();
                        run.model = stlsq(lib, ds.dw, StlsqConfig{cfg.threshold});
                        run.fit_seconds = seconds_since(start);
                    } else {
                        const LibraryMatrix lib = build_library(base_terms, noisy, ds);
                        const auto start = std::chrono::steady_clock::now();
                        run.model.coefficients = m == Method::Ols
                                                     ? ols(lib, ds.dw)
                                                     : ridge(lib, ds.dw, cfg.ridge_penalty);
                        run.fit_seconds = seconds_since(start);
                        run.model.terms = lib.terms;
                        run.model.iterations = 1;
                    }
                    run.support_recovered = same_support(run.model, expected);
                    try {
                        const Prediction p = integrate_model(run.model, noisy, ds, clean.w[0]);
                        run.r_percent = relative_percent_error(clean.w, p.w_pred);
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::DivergedSimulation) throw;
                        run.r_percent = std::numeric_limits<double>::infinity();
                    }
                    cells[c].runs.push_back(std::move(run));
                }
            }
            for (std::size_t c = first; c < cells.size(); ++c) {
                double r = 0.0;
                double s = 0.0;
                for (const auto& run : cells[c].runs) {
                    r += run.r_percent;
                    s += run.fit_seconds;
                }
                const double count = static_cast<double>(cells[c].runs.size());
                cells[c].r_percent = r / count;
                cells[c].fit_seconds = s / count;
            }
            ++data_cell;
        }
    }
    return cells;
}

std::string bench_csv(const std::vector<BenchCell>& cells) {
    std::string out = "method,size,noise,threshold,R_percent,fit_seconds\n";
    for (const auto& c : cells) {
        out += std::string(to_string(c.method)) + ',' + std::to_string(c.size) + ',' +
               format_double(c.noise) + ',' + format_double(c.threshold) + ',' +
               (std::isinf(c.r_percent) ? std::string("inf") : format_double(c.r_percent)) + ',' +
               format_double(c.fit_seconds) + '\n';
    }
    return out;
}

double resolve_dt(const HarmonicExcitation& exc, std::size_t points, std::optional<double> dt) {
    if (dt) {
        if (!(*dt > 0.0) || !std::isfinite(*dt)) {
            throw Error(ErrorCode::InvalidParameter, "dt must be positive");
        }
        return *dt;
    }
    if (points < kMinSamples) {
        throw Error(ErrorCode::TooShort,
                    "need at least " + std::to_string(kMinSamples) + " points", points);
    }
    return default_dt(exc, points);
}

namespace {

std::map<std::string, Experiment, std::less<>> make_experiments() {
    std::map<std::string, Experiment, std::less<>> all;

    Experiment duhem;
    duhem.name = "duhem";
    duhem.description = "Duhem recovery, 10000 clean points, threshold 0.1";
    duhem.system.kind = SystemKind::Duhem;
    duhem.bench.system = duhem.system;
    duhem.bench.sizes = {10000};
    all[duhem.name] = duhem;

    Experiment bw;
    bw.name = "bouc-wen";
    bw.description = "Bouc-Wen (n = 1) recovery, 10000 clean points, threshold 0.1";
    bw.system.kind = SystemKind::BoucWen;
    bw.bench.system = bw.system;
    bw.bench.sizes = {10000};
    all[bw.name] = bw;

    Experiment sweep;
    sweep.name = "size-sweep";
    sweep.description = "STLSQ vs OLS vs ridge on clean Bouc-Wen data at 1000/5000/10000 points";
    sweep.system.kind = SystemKind::BoucWen;
    sweep.bench.system = sweep.system;
    all[sweep.name] = sweep;

    Experiment mismatch = sweep;
    mismatch.name = "mismatch";
    mismatch.description = "Duhem data; baselines restricted to the Bouc-Wen feature set";
    mismatch.system.kind = SystemKind::Duhem;
    mismatch.bench.system = mismatch.system;
    mismatch.bench.mismatched_library = true;
    all[mismatch.name] = mismatch;

    // Slow, decaying excitation: 100 periods over 1000 s with the amplitude
    // falling to a tenth, so the loop interior is sampled densely enough for
    // support recovery from raw differentiated noisy data.
    Experiment noise;
    noise.name = "noise-study";
    noise.description = "Bouc-Wen 0.4/0.5/0.25 under 1% and 5% Gaussian output noise";
    noise.system.kind = SystemKind::BoucWen;
    noise.system.bouc_wen = BoucWenParams{0.4, 0.5, 0.25, 1};
    noise.system.excitation = HarmonicExcitation{3.0, 0.1, 0.0, std::log(10.0) / 1000.0};
    noise.points = 30000;
    noise.dt = 1.0 / 30.0;
    noise.noise = 5.0;
    noise.bench.system = noise.system;
    noise.bench.sizes = {30000};
    noise.bench.noises = {1.0, 5.0};
    noise.bench.methods = {Method::Stlsq};
    noise.bench.dt = noise.dt;
    all[noise.name] = noise;

    Experiment butterfly;
    butterfly.name = "butterfly";
    butterfly.description = "Butterfly loop w = y^2 over a Duhem-form y (3.2/1.7/0.4)";
    butterfly.system.kind = SystemKind::Butterfly;
    butterfly.system.duhem = DuhemParams{3.2, 1.7, 0.4};
    all[butterfly.name] = butterfly;

    Experiment actuator;
    actuator.name = "actuator";
    actuator.description = "Measured actuator data: first 15000 points, threshold 0.01";
    actuator.threshold = 0.01;
    actuator.max_points = 15000;
    all[actuator.name] = actuator;

    return all;
}

const std::map<std::string, Experiment, std::less<>>& experiments() {
    static const auto all = make_experiments();
    return all;
}

}  // namespace

const Experiment& experiment(std::string_view name) {
    const auto& all = experiments();
    const auto it = all.find(name);
    if (it == all.end()) {
        throw Error(ErrorCode::UnknownPreset, "unknown experiment '" + std::string(name) + "'");
    }
    return it->second;
}

std::vector<std::string> experiment_names() {
    std::vector<std::string> names;
    for (const auto& [name, e] : experiments()) names.push_back(name);
    return names;
}

}  // namespace hysid
