#include "hysid/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "hysid/diff.hpp"
#include "hysid/io.hpp"
#include "hysid/pipeline.hpp"

namespace hysid::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::TooShort:
        case ErrorCode::InvalidExcitation:
        case ErrorCode::InvalidParameter:
        case ErrorCode::UnknownPreset:
        case ErrorCode::MissingAux:
        case ErrorCode::MissingAuxModel:
            return kExitUsage;
        default:
            return kExitRuntime;
    }
}

namespace {

template <typename T>
struct Flag {
    T value{};
    CLI::Option* opt = nullptr;

    bool given() const { return opt && opt->count() > 0; }
    T or_else(T fallback) const { return given() ? value : fallback; }
    std::optional<T> optional() const { return given() ? std::optional<T>(value) : std::nullopt; }
};

struct Globals {
    std::uint64_t seed = 42;
    std::string out_dir = ".";
    std::string defaults_from;
    Flag<double> threshold;
    Flag<std::string> library;
    Flag<std::size_t> points;
    Flag<double> dt;
    Flag<double> noise;
    Flag<std::size_t> max_points;

    Flag<double> alpha, beta, gamma;
    Flag<int> n;
    Flag<double> amplitude, frequency, phase, decay, offset, w0;

    const Experiment* exp() const { return defaults_from.empty() ? nullptr : &experiment(defaults_from); }
};

struct SchemaFlags {
    int time_col = 0;
    std::size_t input_col = 1;
    std::size_t output_col = 2;
    bool no_header = false;
    char delimiter = ',';

    CsvSchema schema(const Globals& g) const {
        CsvSchema s;
        s.time_col = time_col < 0 ? std::nullopt : std::optional<std::size_t>(time_col);
        s.input_col = input_col;
        s.output_col = output_col;
        s.has_header = !no_header;
        s.delimiter = delimiter;
        s.dt = g.dt.optional();
        return s;
    }
};

void add_schema_flags(CLI::App* cmd, SchemaFlags& f) {
    cmd->add_option("--time-col", f.time_col, "Time column index; -1 synthesizes t = i*dt")
        ->capture_default_str();
    cmd->add_option("--input-col", f.input_col, "Input (u) column index")->capture_default_str();
    cmd->add_option("--output-col", f.output_col, "Output (w) column index")->capture_default_str();
    cmd->add_flag("--no-header", f.no_header, "The CSV has no header row");
    cmd->add_option("--delimiter", f.delimiter, "Field delimiter")->capture_default_str();
}

SystemSpec resolve_system(const Globals& g, std::optional<SystemKind> kind) {
    const Experiment* e = g.exp();
    SystemSpec spec;
    if (e && (!kind || e->system.kind == *kind)) {
        spec = e->system;
    } else {
        spec.kind = kind.value_or(SystemKind::Duhem);
        if (spec.kind == SystemKind::Butterfly) spec.duhem = experiment("butterfly").system.duhem;
    }
    if (spec.kind == SystemKind::BoucWen) {
        spec.bouc_wen.alpha = g.alpha.or_else(spec.bouc_wen.alpha);
        spec.bouc_wen.beta = g.beta.or_else(spec.bouc_wen.beta);
        spec.bouc_wen.gamma = g.gamma.or_else(spec.bouc_wen.gamma);
        spec.bouc_wen.n = g.n.or_else(spec.bouc_wen.n);
    } else {
        if (g.n.given()) throw Error(ErrorCode::InvalidParameter, "--n applies to bouc-wen only");
        spec.duhem.alpha = g.alpha.or_else(spec.duhem.alpha);
        spec.duhem.beta = g.beta.or_else(spec.duhem.beta);
        spec.duhem.gamma = g.gamma.or_else(spec.duhem.gamma);
    }
    spec.excitation.amplitude = g.amplitude.or_else(spec.excitation.amplitude);
    spec.excitation.frequency = g.frequency.or_else(spec.excitation.frequency);
    spec.excitation.phase = g.phase.or_else(spec.excitation.phase);
    spec.excitation.decay = g.decay.or_else(spec.excitation.decay);
    spec.offset = g.offset.or_else(spec.offset);
    spec.w0 = g.w0.or_else(spec.w0);
    if (spec.offset != 0.0 && spec.kind != SystemKind::Butterfly) {
        throw Error(ErrorCode::InvalidParameter, "--offset applies to butterfly only");
    }
    return spec;
}

std::size_t resolve_points(const Globals& g) {
    const Experiment* e = g.exp();
    return g.points.or_else(e ? e->points : 10000);
}

std::optional<double> resolve_dt_flag(const Globals& g) {
    if (g.dt.given()) return g.dt.value;
    const Experiment* e = g.exp();
    return e ? e->dt : std::nullopt;
}

StlsqConfig stlsq_config(const Globals& g, int max_sweeps, double ridge_penalty, bool no_normalize) {
    const Experiment* e = g.exp();
    StlsqConfig cfg;
    cfg.threshold = g.threshold.or_else(e ? e->threshold : 0.1);
    cfg.max_sweeps = max_sweeps;
    cfg.ridge_penalty = ridge_penalty;
    cfg.normalize_columns = !no_normalize;
    validate(cfg);
    return cfg;
}

std::optional<std::size_t> resolve_max_points(const Globals& g) {
    if (g.max_points.given()) return g.max_points.value;
    const Experiment* e = g.exp();
    return e ? e->max_points : std::nullopt;
}

fs::path in_out_dir(const Globals& g, const std::string& explicit_path, const std::string& name) {
    if (!explicit_path.empty()) return explicit_path;
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / name;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
    return p.parent_path() / (p.stem().string() + suffix + p.extension().string());
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

void print_report(std::ostream& out, const FitReport& r) {
    out << "R = " << fmt(r.r_percent) << "%  NRMSE = " << fmt(r.nrmse) << "  R2 = " << fmt(r.r2, 6)
        << "  fit = " << fmt(r.fit_seconds, 3) << " s  simulate = " << fmt(r.simulate_seconds, 3)
        << " s\n";
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) throw Error(ErrorCode::InvalidParameter, "bad number '" + s + "'");
    return v;
}

std::vector<double> read_aux_signal(const fs::path& path, std::optional<std::size_t> max_points) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw Error(ErrorCode::MissingAux, "aux CSV not found: " + path.string());
    }
    return read_csv(path, CsvSchema{}, max_points).w;
}

// --- commands ---------------------------------------------------------------

struct GenArgs {
    std::string model;
    std::string output;
    std::string aux_output;
};

int cmd_gen(const Globals& g, const GenArgs& a, std::ostream& out) {
    std::optional<SystemKind> kind;
    if (!a.model.empty()) kind = parse_system(a.model);
    if (!kind && !g.exp()) throw Error(ErrorCode::InvalidParameter, "gen needs a model or --defaults-from");
    const SystemSpec spec = resolve_system(g, kind);
    const std::size_t points = resolve_points(g);
    const double dt = resolve_dt(spec.excitation, points, resolve_dt_flag(g));
    const Experiment* e = g.exp();
    const double noise = g.noise.or_else(e ? e->noise : 0.0);

    std::vector<double> y;
    TimeSeries ts = generate_series(spec, points, dt, &y);
    if (noise > 0.0) ts = add_gaussian_noise(ts, noise, g.seed);

    const std::string model_name(to_string(spec.kind));
    const fs::path path = in_out_dir(g, a.output, model_name + ".csv");
    write_series_csv(path, ts);
    out << "gen " << model_name << ": " << ts.size() << " points, dt = " << fmt(dt, 6)
        << ", noise = " << fmt(noise) << "% (seed " << g.seed << ") -> " << path.string() << '\n';
    if (spec.kind == SystemKind::Butterfly) {
        const fs::path aux = a.aux_output.empty() ? with_suffix(path, "_aux") : fs::path(a.aux_output);
        write_aux_csv(aux, ts, y);
        out << "aux y -> " << aux.string() << '\n';
    }
    return kExitOk;
}

struct FitArgs {
    std::string input;
    std::string aux;
    std::string output;
    std::string prediction;
    int max_sweeps = 10;
    double ridge_penalty = 0.0;
    bool no_normalize = false;
    SchemaFlags schema;
};

int cmd_fit(const Globals& g, const FitArgs& a, std::ostream& out) {
    const LibrarySpec library = library_preset(g.library.or_else(std::string(kDefaultPreset)));
    const StlsqConfig cfg = stlsq_config(g, a.max_sweeps, a.ridge_penalty, a.no_normalize);
    const auto max_points = resolve_max_points(g);
    if (library.include_aux && a.aux.empty()) {
        throw Error(ErrorCode::MissingAux, "library '" + library.preset_name + "' needs --aux");
    }
    const TimeSeries ts = read_csv(a.input, a.schema.schema(g), max_points);
    const fs::path model_path = in_out_dir(g, a.output, "model.txt");

    if (library.include_aux) {
        const auto y = read_aux_signal(a.aux, max_points);
        const ButterflyResult r = fit_butterfly(ts, y, cfg);
        write_model(with_suffix(model_path, "_inner"), r.inner.report.model, r.inner.report);
        write_model(model_path, r.outer.report.model, r.outer.report);
        if (!a.prediction.empty()) write_series_csv(a.prediction, ts, &r.coupled);
        out << render_equation(r.inner.report.model) << '\n'
            << render_equation(r.outer.report.model) << '\n';
        print_report(out, r.outer.report);
        out << "model -> " << model_path.string() << '\n';
        return kExitOk;
    }

    FitOptions opts;
    opts.library = library;
    opts.stlsq = cfg;
    opts.w0 = g.w0.optional();
    const FitResult r = fit_series(ts, opts);
    write_model(model_path, r.report.model, r.report);
    if (!a.prediction.empty()) write_series_csv(a.prediction, ts, &r.prediction);
    out << render_equation(r.report.model) << '\n';
    if (!r.report.model.converged) {
        out << "warning: support did not settle within " << cfg.max_sweeps << " sweeps\n";
    }
    print_report(out, r.report);
    out << "model -> " << model_path.string() << '\n';
    return kExitOk;
}

struct PredictArgs {
    std::string model;
    std::string input;
    std::string output;
    std::string aux_model;
    std::string aux;
    Flag<double> y0;
    SchemaFlags schema;
};

int cmd_predict(const Globals& g, const PredictArgs& a, std::ostream& out) {
    const ModelFile mf = read_model(a.model);
    const auto max_points = resolve_max_points(g);
    const TimeSeries ts = read_csv(a.input, a.schema.schema(g), max_points);
    const DerivedSeries ds = differentiate_series(ts);

    std::optional<AuxModel> aux;
    if (!a.aux_model.empty()) {
        AuxModel am{read_model(a.aux_model).model, 0.0};
        if (a.y0.given()) {
            am.y0 = a.y0.value;
        } else if (!a.aux.empty()) {
            am.y0 = read_aux_signal(a.aux, max_points).at(0);
        }
        aux = std::move(am);
    }
    const double w0 = g.w0.or_else(ts.w[0]);
    const auto start = std::chrono::steady_clock::now();
    const Prediction p = integrate_model(mf.model, ts, ds, w0, aux);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path path = in_out_dir(g, a.output, "prediction.csv");
    write_series_csv(path, ts, &p);
    FitReport r;
    r.r_percent = relative_percent_error(ts.w, p.w_pred);
    r.nrmse = nrmse(ts.w, p.w_pred);
    r.r2 = r2_score(ts.w, p.w_pred);
    r.simulate_seconds = elapsed;
    out << render_equation(mf.model) << '\n';
    print_report(out, r);
    out << "prediction -> " << path.string() << '\n';
    return kExitOk;
}

struct BenchArgs {
    Flag<std::string> system;
    Flag<std::string> sizes;
    Flag<std::string> noises;
    Flag<std::string> methods;
    Flag<int> seeds;
    Flag<double> ridge_penalty;
    bool mismatched = false;
    std::string output;
    std::string details;
};

int cmd_bench(const Globals& g, const BenchArgs& a, std::ostream& out) {
    const Experiment* e = g.exp();
    BenchConfig cfg = e ? e->bench : experiment("size-sweep").bench;
    std::optional<SystemKind> kind;
    if (a.system.given()) kind = parse_system(a.system.value);
    cfg.system = resolve_system(g, kind ? kind : std::optional<SystemKind>(cfg.system.kind));

    if (a.sizes.given()) {
        cfg.sizes.clear();
        for (const auto& s : split_list(a.sizes.value)) {
            cfg.sizes.push_back(static_cast<std::size_t>(parse_number(s)));
        }
    } else if (g.points.given()) {
        cfg.sizes = {g.points.value};
    }
    if (a.noises.given()) {
        cfg.noises.clear();
        for (const auto& s : split_list(a.noises.value)) cfg.noises.push_back(parse_number(s));
    } else if (g.noise.given()) {
        cfg.noises = {g.noise.value};
    }
    if (a.methods.given()) {
        cfg.methods.clear();
        for (const auto& s : split_list(a.methods.value)) cfg.methods.push_back(parse_method(s));
    }
    cfg.seeds = a.seeds.or_else(cfg.seeds);
    cfg.ridge_penalty = a.ridge_penalty.or_else(cfg.ridge_penalty);
    cfg.mismatched_library = cfg.mismatched_library || a.mismatched;
    cfg.threshold = g.threshold.or_else(e ? e->threshold : cfg.threshold);
    cfg.base_seed = g.seed;
    if (g.dt.given()) cfg.dt = g.dt.value;
    if (g.library.given()) cfg.library = library_preset(g.library.value);
    if (cfg.library.include_aux) {
        throw Error(ErrorCode::InvalidParameter, "bench does not support aux libraries");
    }

    const auto cells = run_bench(cfg);
    const std::string csv = bench_csv(cells);
    const fs::path path = in_out_dir(g, a.output, "bench.csv");
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!(f << csv)) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    if (!a.details.empty()) {
        std::ofstream f(a.details, std::ios::binary | std::ios::trunc);
        f << "method,size,noise,seed,R_percent,fit_seconds,support_recovered,equation\n";
        for (const auto& c : cells) {
            for (const auto& r : c.runs) {
                f << to_string(c.method) << ',' << c.size << ',' << format_double(c.noise) << ','
                  << r.seed << ',' << format_double(r.r_percent) << ',' << format_double(r.fit_seconds)
                  << ',' << (r.support_recovered ? 1 : 0) << ",\"" << render_equation(r.model) << "\"\n";
            }
        }
        if (!f) throw Error(ErrorCode::IoError, "cannot write " + a.details);
    }
    out << csv << "bench -> " << path.string() << '\n';
    return kExitOk;
}

struct ButterflyArgs {
    std::string input;
    std::string aux;
    int max_sweeps = 10;
    SchemaFlags schema;
};

int cmd_butterfly(const Globals& g, const ButterflyArgs& a, std::ostream& out) {
    const StlsqConfig cfg = stlsq_config(g, a.max_sweeps, 0.0, false);
    TimeSeries ts;
    std::vector<double> y;
    if (!a.input.empty()) {
        if (a.aux.empty()) throw Error(ErrorCode::MissingAux, "butterfly --input needs --aux");
        const auto max_points = resolve_max_points(g);
        y = read_aux_signal(a.aux, max_points);
        ts = read_csv(a.input, a.schema.schema(g), max_points);
    } else {
        const SystemSpec spec = resolve_system(g, SystemKind::Butterfly);
        const std::size_t points = resolve_points(g);
        ts = generate_series(spec, points, resolve_dt(spec.excitation, points, resolve_dt_flag(g)), &y);
    }

    const ButterflyResult r = fit_butterfly(ts, y, cfg);
    const fs::path inner = in_out_dir(g, "", "butterfly_inner.txt");
    const fs::path outer = in_out_dir(g, "", "butterfly_outer.txt");
    const fs::path pred = in_out_dir(g, "", "butterfly_prediction.csv");
    write_model(inner, r.inner.report.model, r.inner.report);
    write_model(outer, r.outer.report.model, r.outer.report);
    write_series_csv(pred, ts, &r.coupled);

    out << "stage 1: " << render_equation(r.inner.report.model) << '\n'
        << "stage 2: " << render_equation(r.outer.report.model) << '\n';
    for (const auto& [name, ratio] : r.ratios) {
        out << "ratio " << name << " = " << fmt(ratio) << '\n';
    }
    print_report(out, r.outer.report);
    out << "models -> " << inner.string() << ", " << outer.string() << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse identification of hysteresis models from input/output data", "hysid"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    Globals g;
    bool list = false;
    app.add_flag("--list-experiments", list, "Print experiment names for --defaults-from");
    app.add_option("--seed", g.seed, "Noise seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Directory for default output paths")->capture_default_str();
    app.add_option("--defaults-from", g.defaults_from, "Take defaults from a named experiment");
    g.threshold.opt = app.add_option("--threshold", g.threshold.value, "STLSQ threshold (default 0.1)");
    g.library.opt = app.add_option("--library", g.library.value, "Library preset");
    g.points.opt = app.add_option("--points", g.points.value, "Number of samples (default 10000)");
    g.dt.opt = app.add_option("--dt", g.dt.value, "Sampling step; default spans 3 excitation periods");
    g.noise.opt = app.add_option("--noise", g.noise.value, "Gaussian output noise, percent of std(w)");
    g.max_points.opt = app.add_option("--max-points", g.max_points.value, "Keep only the first N rows");
    g.alpha.opt = app.add_option("--alpha", g.alpha.value, "Model parameter alpha");
    g.beta.opt = app.add_option("--beta", g.beta.value, "Model parameter beta");
    g.gamma.opt = app.add_option("--gamma", g.gamma.value, "Model parameter gamma");
    g.n.opt = app.add_option("--n", g.n.value, "Bouc-Wen exponent");
    g.amplitude.opt = app.add_option("--amplitude", g.amplitude.value, "Excitation amplitude (V)");
    g.frequency.opt = app.add_option("--frequency", g.frequency.value, "Excitation frequency (Hz)");
    g.phase.opt = app.add_option("--phase", g.phase.value, "Excitation phase (rad)");
    g.decay.opt = app.add_option("--decay", g.decay.value, "Excitation envelope decay rate (1/s)");
    g.offset.opt = app.add_option("--offset", g.offset.value, "Butterfly offset c in w = y^2 + c");
    g.w0.opt = app.add_option("--w0", g.w0.value, "Initial state");

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen->add_option("model", gen_args.model, "duhem, bouc-wen or butterfly");
    gen->add_option("-o,--output", gen_args.output, "Output CSV");
    gen->add_option("--aux-output", gen_args.aux_output, "Butterfly y CSV");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Identify a sparse model from a CSV");
    fit->add_option("-i,--input", fit_args.input, "Input CSV")->required();
    fit->add_option("--aux", fit_args.aux, "Aux y CSV (t,u,y) for aux libraries");
    fit->add_option("-o,--output", fit_args.output, "Model file");
    fit->add_option("--prediction", fit_args.prediction, "Also write the prediction CSV");
    fit->add_option("--max-sweeps", fit_args.max_sweeps, "STLSQ sweep limit")->capture_default_str();
    fit->add_option("--ridge-penalty", fit_args.ridge_penalty, "Ridge penalty inside STLSQ")
        ->capture_default_str();
    fit->add_flag("--no-normalize", fit_args.no_normalize, "Fit on unnormalized columns");
    add_schema_flags(fit, fit_args.schema);

    PredictArgs pred_args;
    auto* predict = app.add_subcommand("predict", "Simulate a model file against a CSV");
    predict->add_option("-m,--model", pred_args.model, "Model file")->required();
    predict->add_option("-i,--input", pred_args.input, "Input CSV")->required();
    predict->add_option("-o,--output", pred_args.output, "Prediction CSV");
    predict->add_option("--aux-model", pred_args.aux_model, "Model file for y");
    predict->add_option("--aux", pred_args.aux, "Aux y CSV; its first sample sets y0");
    pred_args.y0.opt = predict->add_option("--y0", pred_args.y0.value, "Initial y");
    add_schema_flags(predict, pred_args.schema);

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Sweep sizes and noise levels over methods");
    bench_args.system.opt = bench->add_option("--system", bench_args.system.value, "duhem or bouc-wen");
    bench_args.sizes.opt = bench->add_option("--sizes", bench_args.sizes.value, "Comma-separated sizes");
    bench_args.noises.opt = bench->add_option("--noises", bench_args.noises.value, "Comma-separated noise percents");
    bench_args.methods.opt = bench->add_option("--methods", bench_args.methods.value, "Subset of stlsq,ols,ridge");
    bench_args.seeds.opt = bench->add_option("--seeds", bench_args.seeds.value, "Runs per cell (default 5)");
    bench_args.ridge_penalty.opt =
        bench->add_option("--ridge-penalty", bench_args.ridge_penalty.value, "Ridge baseline penalty");
    bench->add_flag("--mismatched-library", bench_args.mismatched, "Baselines use Bouc-Wen features");
    bench->add_option("-o,--output", bench_args.output, "Results CSV");
    bench->add_option("--details", bench_args.details, "Per-seed results CSV");

    ButterflyArgs bf_args;
    auto* butterfly = app.add_subcommand("butterfly", "Two-stage butterfly identification");
    butterfly->add_option("-i,--input", bf_args.input, "Series CSV (t,u,w); generated when omitted");
    butterfly->add_option("--aux", bf_args.aux, "Aux y CSV (t,u,y)");
    butterfly->add_option("--max-sweeps", bf_args.max_sweeps, "STLSQ sweep limit")->capture_default_str();
    add_schema_flags(butterfly, bf_args.schema);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (list) {
            for (const auto& name : experiment_names()) {
                out << name << ": " << experiment(name).description << '\n';
            }
            return kExitOk;
        }
        if (!g.defaults_from.empty()) (void)experiment(g.defaults_from);
        if (*gen) return cmd_gen(g, gen_args, out);
        if (*fit) return cmd_fit(g, fit_args, out);
        if (*predict) return cmd_predict(g, pred_args, out);
        if (*bench) return cmd_bench(g, bench_args, out);
        if (*butterfly) return cmd_butterfly(g, bf_args, out);
        err << app.help();
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace hysid::cli
