#include "hysid/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "hysid/features.hpp"
#include "hysid/generators.hpp"
#include "hysid/kernels.hpp"

namespace hysid {

namespace {

struct ActiveTerm {
    TermDescriptor term;
    double coefficient;
};

std::vector<ActiveTerm> active_terms(const SparseModel& model) {
    if (model.coefficients.size() != model.terms.size()) {
        throw Error(ErrorCode::ShapeMismatch, "model has mismatched coefficient and term counts");
    }
    std::vector<ActiveTerm> out;
    for (std::size_t j = 0; j < model.terms.size(); ++j) {
        if (model.coefficients[j] != 0.0) out.push_back({model.terms[j], model.coefficients[j]});
    }
    return out;
}

double evaluate(const std::vector<ActiveTerm>& terms, double u, double du, double w, double y) {
    double acc = 0.0;
    for (const auto& a : terms) acc += a.coefficient * evaluate_term(a.term, u, du, w, y);
    return acc;
}

bool needs_aux(const std::vector<ActiveTerm>& terms) {
    return std::any_of(terms.begin(), terms.end(), [](const ActiveTerm& a) { return a.term.pow_y > 0; });
}

void check_finite_state(double w, double y, std::size_t index) {
    if (!std::isfinite(w) || !std::isfinite(y) || std::abs(w) > kDivergenceBound ||
        std::abs(y) > kDivergenceBound) {
        throw Error(ErrorCode::DivergedSimulation, "predicted state left the divergence bound", index);
    }
}

struct Exogenous {
    double u;
    double du;
};

// `stage(i, k)` yields the exogenous signal for step i at node (k = 0),
// half step (k = 1) or next node (k = 2).
template <typename Stage>
Prediction run(const SparseModel& model, const TimeSeries& ts, double w0,
               const std::optional<AuxModel>& aux, Stage stage) {
    if (ts.size() < 2) throw Error(ErrorCode::TooShort, "need at least 2 samples", ts.size());
    if (!std::isfinite(w0)) throw Error(ErrorCode::NonFinite, "initial value must be finite");
    const auto outer = active_terms(model);
    if (needs_aux(outer) && !aux) {
        throw Error(ErrorCode::MissingAuxModel, "model uses y but no aux model was supplied");
    }
    std::vector<ActiveTerm> inner;
    if (aux) {
        inner = active_terms(aux->model);
        if (needs_aux(inner)) {
            throw Error(ErrorCode::InvalidParameter, "aux model must not depend on y");
        }
    }

    const std::size_t n = ts.size();
    const double dt = ts.dt();
    Prediction p;
    p.w_pred.resize(n);
    p.w_pred[0] = w0;
    if (aux) {
        p.y_pred.resize(n);
        p.y_pred[0] = aux->y0;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Exogenous e0 = stage(i, 0);
        const Exogenous eh = stage(i, 1);
        const Exogenous e1 = stage(i, 2);
        const double w = p.w_pred[i];
        if (aux) {
            const double y = p.y_pred[i];
            auto fw = [&](const Exogenous& e, double ws, double ys) {
                return evaluate(outer, e.u, e.du, ws, ys);
            };
            auto fy = [&](const Exogenous& e, double ys) { return evaluate(inner, e.u, e.du, ys, 0.0); };
            const double kw1 = fw(e0, w, y);
            const double ky1 = fy(e0, y);
            const double kw2 = fw(eh, w + 0.5 * dt * kw1, y + 0.5 * dt * ky1);
            const double ky2 = fy(eh, y + 0.5 * dt * ky1);
            const double kw3 = fw(eh, w + 0.5 * dt * kw2, y + 0.5 * dt * ky2);
            const double ky3 = fy(eh, y + 0.5 * dt * ky2);
            const double kw4 = fw(e1, w + dt * kw3, y + dt * ky3);
            const double ky4 = fy(e1, y + dt * ky3);
            p.w_pred[i + 1] = w + dt / 6.0 * (kw1 + 2.0 * kw2 + 2.0 * kw3 + kw4);
            p.y_pred[i + 1] = y + dt / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
            check_finite_state(p.w_pred[i + 1], p.y_pred[i + 1], i + 1);
        } else {
            auto f = [&](const Exogenous& e, double ws) { return evaluate(outer, e.u, e.du, ws, 0.0); };
            const double k1 = f(e0, w);
            const double k2 = f(eh, w + 0.5 * dt * k1);
            const double k3 = f(eh, w + 0.5 * dt * k2);
            const double k4 = f(e1, w + dt * k3);
            p.w_pred[i + 1] = w + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            check_finite_state(p.w_pred[i + 1], 0.0, i + 1);
        }
    }

    p.abs_err.resize(n);
    if (ts.w.size() == n) {
        kernels::active().abs_diff(ts.w, p.w_pred, p.abs_err);
    } else {
        std::fill(p.abs_err.begin(), p.abs_err.end(), 0.0);
    }
    return p;
}

void check_pair(std::span<const double> w, std::span<const double> w_pred) {
    if (w.size() != w_pred.size()) {
        throw Error(ErrorCode::LengthMismatch, "reference and prediction lengths differ");
    }
    if (w.empty()) throw Error(ErrorCode::TooShort, "empty sequences");
}

}  // namespace

double evaluate_model(const SparseModel& model, double u, double du, double w, double y) {
    return evaluate(active_terms(model), u, du, w, y);
}

Prediction integrate_model(const SparseModel& model, const TimeSeries& ts, const DerivedSeries& ds,
                           double w0, const std::optional<AuxModel>& aux) {
    if (ds.du.size() != ts.size() || ts.u.size() != ts.size()) {
        throw Error(ErrorCode::LengthMismatch, "derivative and series lengths differ");
    }
    return run(model, ts, w0, aux, [&](std::size_t i, int k) -> Exogenous {
        if (k == 0) return {ts.u[i], ds.du[i]};
        if (k == 2) return {ts.u[i + 1], ds.du[i + 1]};
        return {0.5 * (ts.u[i] + ts.u[i + 1]), 0.5 * (ds.du[i] + ds.du[i + 1])};
    });
}

Prediction integrate_model(const SparseModel& model, const TimeSeries& ts,
                           const ExcitationFn& excitation, double w0,
                           const std::optional<AuxModel>& aux) {
    const double dt = ts.size() >= 2 ? ts.dt() : 0.0;
    return run(model, ts, w0, aux, [&](std::size_t i, int k) -> Exogenous {
        const auto [u, du] = excitation(ts.t[i] + 0.5 * static_cast<double>(k) * dt);
        return {u, du};
    });
}

double relative_percent_error(std::span<const double> w, std::span<const double> w_pred) {
    check_pair(w, w_pred);
    const auto& k = kernels::active();
    const double ref = k.dot(w, w);
    if (ref == 0.0) throw Error(ErrorCode::ZeroReference, "reference signal has zero norm");
    return 100.0 * std::sqrt(k.sum_sq_diff(w, w_pred)) / std::sqrt(ref);
}

double nrmse(std::span<const double> w, std::span<const double> w_pred) {
    check_pair(w, w_pred);
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) throw Error(ErrorCode::ConstantReference, "reference signal is constant");
    const double mse = kernels::active().sum_sq_diff(w, w_pred) / static_cast<double>(w.size());
    return std::sqrt(mse) / range;
}

double r2_score(std::span<const double> w, std::span<const double> w_pred) {
    check_pair(w, w_pred);
    const auto& k = kernels::active();
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(w.size());
    const std::vector<double> centre(w.size(), mean);
    const double ss_tot = k.sum_sq_diff(w, centre);
    if (!(ss_tot > 0.0)) throw Error(ErrorCode::ConstantReference, "reference signal is constant");
    return 1.0 - k.sum_sq_diff(w, w_pred) / ss_tot;
}

}  // namespace hysid
