#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hysid/core.hpp"

namespace hysid {

struct Prediction {
    std::vector<double> w_pred;
    std::vector<double> abs_err;  ///< |w - w_pred| against the source series
    std::vector<double> y_pred;   ///< coupled auxiliary state; empty without an aux model
};

/// Model for the auxiliary state y. Its terms are written over the usual
/// symbols, with w standing for y.
struct AuxModel {
    SparseModel model;
    double y0 = 0.0;
};

/// Exogenous signal (u, u') at an arbitrary time.
using ExcitationFn = std::function<std::pair<double, double>(double)>;

/// Right-hand side of `model` at one state.
double evaluate_model(const SparseModel& model, double u, double du, double w, double y = 0.0);

/// RK4 on the sample grid with u and u' linearly interpolated at half steps.
/// With `aux`, y is integrated alongside w as a coupled state. Throws
/// MissingAuxModel when a term needs y and no aux model is given, and
/// DivergedSimulation when the state exceeds kDivergenceBound.
Prediction integrate_model(const SparseModel& model, const TimeSeries& ts, const DerivedSeries& ds,
                           double w0, const std::optional<AuxModel>& aux = std::nullopt);

/// Same integrator, exogenous signal evaluated exactly at every stage.
Prediction integrate_model(const SparseModel& model, const TimeSeries& ts,
                           const ExcitationFn& excitation, double w0,
                           const std::optional<AuxModel>& aux = std::nullopt);

/// 100 * ||w_pred - w|| / ||w||. Throws ZeroReference when ||w|| = 0.
double relative_percent_error(std::span<const double> w, std::span<const double> w_pred);

/// RMSE / (max(w) - min(w)). Throws ConstantReference for constant w.
double nrmse(std::span<const double> w, std::span<const double> w_pred);

/// 1 - SS_res / SS_tot. Throws ConstantReference for constant w.
double r2_score(std::span<const double> w, std::span<const double> w_pred);

}  // namespace hysid
