#include "hysid/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace hysid {

double HarmonicExcitation::value(double t) const {
    return amplitude * std::exp(-decay * t) *
           std::sin(2.0 * std::numbers::pi * frequency * t + phase);
}

double HarmonicExcitation::derivative(double t) const {
    const double omega = 2.0 * std::numbers::pi * frequency;
    const double envelope = amplitude * std::exp(-decay * t);
    const double arg = omega * t + phase;
    return envelope * (omega * std::cos(arg) - decay * std::sin(arg));
}

double default_dt(const HarmonicExcitation& exc, std::size_t n_points) {
    validate(exc);
    if (n_points < 2) throw Error(ErrorCode::TooShort, "need at least 2 points", n_points);
    return kDefaultPeriods / (exc.frequency * static_cast<double>(n_points));
}

void validate(const HarmonicExcitation& exc) {
    if (!(exc.amplitude > 0.0) || !std::isfinite(exc.amplitude)) {
        throw Error(ErrorCode::InvalidExcitation, "amplitude must be positive");
    }
    if (!(exc.frequency > 0.0) || !std::isfinite(exc.frequency)) {
        throw Error(ErrorCode::InvalidExcitation, "frequency must be positive");
    }
    if (!(exc.decay >= 0.0) || !std::isfinite(exc.decay) || !std::isfinite(exc.phase)) {
        throw Error(ErrorCode::InvalidExcitation, "decay must be finite and non-negative");
    }
}

void validate(const DuhemParams& p) {
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.gamma)) {
        throw Error(ErrorCode::InvalidParameter, "Duhem parameters must be finite");
    }
}

void validate(const BoucWenParams& p) {
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.gamma)) {
        throw Error(ErrorCode::InvalidParameter, "Bouc-Wen parameters must be finite");
    }
    if (p.n < 1) throw Error(ErrorCode::InvalidParameter, "Bouc-Wen exponent n must be >= 1");
}

namespace {

void check_grid(std::size_t n_points, double dt) {
    if (n_points < kMinSamples) {
        throw Error(ErrorCode::TooShort,
                    "need at least " + std::to_string(kMinSamples) + " points", n_points);
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error(ErrorCode::InvalidParameter, "dt must be positive");
    }
}

std::vector<double> time_grid(std::size_t n_points, double dt) {
    std::vector<double> t(n_points);
    for (std::size_t i = 0; i < n_points; ++i) t[i] = static_cast<double>(i) * dt;
    return t;
}

// Classical RK4 on a scalar state driven by the analytic excitation.
template <typename Rhs>
std::vector<double> integrate(const HarmonicExcitation& exc, const std::vector<double>& t,
                              double dt, double x0, Rhs rhs) {
    std::vector<double> x(t.size());
    x[0] = x0;
    auto f = [&](double time, double state) {
        return rhs(exc.value(time), exc.derivative(time), state);
    };
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double ti = t[i];
        const double xi = x[i];
        const double k1 = f(ti, xi);
        const double k2 = f(ti + 0.5 * dt, xi + 0.5 * dt * k1);
        const double k3 = f(ti + 0.5 * dt, xi + 0.5 * dt * k2);
        const double k4 = f(ti + dt, xi + dt * k3);
        const double next = xi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(next) || std::abs(next) > kDivergenceBound) {
            throw Error(ErrorCode::DivergedSimulation, "state left the divergence bound", i + 1);
        }
        x[i + 1] = next;
    }
    return x;
}

TimeSeries assemble(const HarmonicExcitation& exc, std::vector<double> t, std::vector<double> w) {
    TimeSeries ts;
    ts.u.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) ts.u[i] = exc.value(t[i]);
    ts.t = std::move(t);
    ts.w = std::move(w);
    return validate_series(std::move(ts));
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> excitation_signal(const HarmonicExcitation& exc,
                                                                      std::size_t n_points,
                                                                      double dt) {
    validate(exc);
    check_grid(n_points, dt);
    std::vector<double> u(n_points);
    std::vector<double> du(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) * dt;
        u[i] = exc.value(t);
        du[i] = exc.derivative(t);
    }
    return {std::move(u), std::move(du)};
}

double duhem_rhs(const DuhemParams& p, double u, double du, double w) {
    const double abs_du = std::abs(du);
    return p.alpha * abs_du * u - p.beta * abs_du * w + p.gamma * du;
}

double bouc_wen_rhs(const BoucWenParams& p, double /*u*/, double du, double w) {
    const double abs_w = std::abs(w);
    // |w|^(n-1)*w is taken as w itself for n = 1, including at w = 0.
    const double odd = p.n == 1 ? w : std::pow(abs_w, p.n - 1) * w;
    const double even = p.n == 1 ? abs_w : std::pow(abs_w, p.n);
    return p.alpha * du - p.beta * std::abs(du) * odd - p.gamma * du * even;
}

TimeSeries simulate_duhem(const DuhemParams& p, const HarmonicExcitation& exc,
                          std::size_t n_points, double dt, double w0) {
    validate(p);
    validate(exc);
    check_grid(n_points, dt);
    auto t = time_grid(n_points, dt);
    auto w = integrate(exc, t, dt, w0,
                       [&](double u, double du, double x) { return duhem_rhs(p, u, du, x); });
    return assemble(exc, std::move(t), std::move(w));
}

TimeSeries simulate_bouc_wen(const BoucWenParams& p, const HarmonicExcitation& exc,
                             std::size_t n_points, double dt, double w0) {
    validate(p);
    validate(exc);
    check_grid(n_points, dt);
    auto t = time_grid(n_points, dt);
    auto w = integrate(exc, t, dt, w0,
                       [&](double u, double du, double x) { return bouc_wen_rhs(p, u, du, x); });
    return assemble(exc, std::move(t), std::move(w));
}

TimeSeries ButterflyData::inner_series() const {
    return TimeSeries{series.t, series.u, y};
}

ButterflyData simulate_butterfly(const DuhemParams& p, const HarmonicExcitation& exc,
                                 std::size_t n_points, double dt, double y0, double offset) {
    validate(p);
    validate(exc);
    check_grid(n_points, dt);
    if (!std::isfinite(offset)) throw Error(ErrorCode::InvalidParameter, "offset must be finite");
    auto t = time_grid(n_points, dt);
    auto y = integrate(exc, t, dt, y0,
                       [&](double u, double du, double x) { return duhem_rhs(p, u, du, x); });
    std::vector<double> w(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) w[i] = y[i] * y[i] + offset;
    ButterflyData out;
    out.series = assemble(exc, std::move(t), std::move(w));
    out.y = std::move(y);
    out.offset = offset;
    return out;
}

TimeSeries add_gaussian_noise(const TimeSeries& ts, double percent, std::uint64_t seed) {
    if (!(percent >= 0.0) || !std::isfinite(percent)) {
        throw Error(ErrorCode::InvalidParameter, "noise percent must be >= 0");
    }
    TimeSeries out = ts;
    if (percent == 0.0 || ts.w.empty()) return out;

    const double n = static_cast<double>(ts.w.size());
    double mean = 0.0;
    for (double v : ts.w) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : ts.w) var += (v - mean) * (v - mean);
    const double sigma = percent / 100.0 * std::sqrt(var / n);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out.w) v += noise(rng);
    return out;
}

}  // namespace hysid
