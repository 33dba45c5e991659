#pragma once

// Synthetic hysteresis data: harmonic excitation fed through the Duhem,
// Bouc-Wen and butterfly (w = y^2 + c over a Duhem-form y) models, integrated
// with fixed-step RK4 on the sampling grid.

#include <cstdint>
#include <utility>
#include <vector>

#include "hysid/core.hpp"

namespace hysid {

/// dw/dt = alpha*|u'|*u - beta*|u'|*w + gamma*u'
struct DuhemParams {
    double alpha = 0.4;
    double beta = 0.5;
    double gamma = 0.25;
};

/// dw/dt = alpha*u' - beta*|u'|*|w|^(n-1)*w - gamma*u'*|w|^n
struct BoucWenParams {
    double alpha = 5.0;
    double beta = 0.25;
    double gamma = 0.5;
    int n = 1;
};

/// u(t) = A * exp(-decay*t) * sin(2*pi*f*t + phase)
struct HarmonicExcitation {
    double amplitude = 1.0;
    double frequency = 1.0;
    double phase = 0.0;
    double decay = 0.0;

    double value(double t) const;
    double derivative(double t) const;
};

/// Number of excitation periods the default grid spans.
inline constexpr double kDefaultPeriods = 3.0;

/// Step that makes `n_points` samples span kDefaultPeriods periods of `exc`.
double default_dt(const HarmonicExcitation& exc, std::size_t n_points);

void validate(const HarmonicExcitation& exc);
void validate(const DuhemParams& p);
void validate(const BoucWenParams& p);

/// Samples u and its analytic derivative at t_i = i*dt.
std::pair<std::vector<double>, std::vector<double>> excitation_signal(const HarmonicExcitation& exc,
                                                                      std::size_t n_points,
                                                                      double dt);

/// Right-hand sides, exposed for oracles and tests.
double duhem_rhs(const DuhemParams& p, double u, double du, double w);
double bouc_wen_rhs(const BoucWenParams& p, double u, double du, double w);

/// Divergence bound on |w| during integration.
inline constexpr double kDivergenceBound = 1e12;

TimeSeries simulate_duhem(const DuhemParams& p, const HarmonicExcitation& exc,
                          std::size_t n_points, double dt, double w0 = 0.0);

TimeSeries simulate_bouc_wen(const BoucWenParams& p, const HarmonicExcitation& exc,
                             std::size_t n_points, double dt, double w0 = 0.0);

struct ButterflyData {
    TimeSeries series;      ///< w = y^2 + offset
    std::vector<double> y;  ///< inner single-loop state
    double offset = 0.0;

    /// (t, u, y) as a series, for fitting the inner model.
    TimeSeries inner_series() const;
};

/// Integrates y with the Duhem right-hand side and reports w = y^2 + offset.
ButterflyData simulate_butterfly(const DuhemParams& p, const HarmonicExcitation& exc,
                                 std::size_t n_points, double dt, double y0 = 0.0,
                                 double offset = 0.0);

/// Returns a copy with w += N(0, sigma^2), sigma = percent/100 * std(w)
/// (population std of the clean output). t and u are untouched.
TimeSeries add_gaussian_noise(const TimeSeries& ts, double percent, std::uint64_t seed);

}  // namespace hysid
