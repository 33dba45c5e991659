#include <catch_amalgamated.hpp>

#include <cmath>

#include "hysid/diff.hpp"
#include "hysid/features.hpp"
#include "hysid/generators.hpp"
#include "hysid/simulate.hpp"
#include "support.hpp"

using namespace hysid;

namespace {

TermDescriptor T(DerivFactor f, int pu, int pw, int pa = 0, int py = 0) { return {f, pu, pw, pa, py}; }

SparseModel model_of(std::vector<std::pair<TermDescriptor, double>> entries, std::string target = "dw/dt") {
    SparseModel m;
    m.target_name = std::move(target);
    for (auto& [d, c] : entries) {
        m.terms.push_back(d);
        m.coefficients.push_back(c);
    }
    return m;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

SparseModel duhem_model(const DuhemParams& p, std::string target = "dw/dt") {
    using F = DerivFactor;
    return model_of({{T(F::Signed, 0, 0), p.gamma}, {T(F::Absolute, 1, 0), p.alpha}, {T(F::Absolute, 0, 1), -p.beta}},
                    std::move(target));
}

ExcitationFn analytic(const HarmonicExcitation& exc) {
    return [exc](double t) { return std::make_pair(exc.value(t), exc.derivative(t)); };
}

}  // namespace

TEST_CASE("integrating u' reproduces u") {
    const HarmonicExcitation exc;
    const std::size_t n = 10000;
    const double dt = default_dt(exc, n);
    auto ts = simulate_duhem({0, 0, 1}, exc, n, dt, 0.3);
    const auto [u, du] = excitation_signal(exc, n, dt);
    const auto model = model_of({{T(DerivFactor::Signed, 0, 0), 1.0}});
    const auto p = integrate_model(model, ts, DerivedSeries{du, {}}, 0.3);
    CHECK(p.w_pred[0] == 0.3);
    for (std::size_t i = 0; i < n; ++i) CHECK(p.w_pred[i] == Catch::Approx(0.3 + u[i] - u[0]).margin(1e-5));
    const auto exact = integrate_model(model, ts, analytic(exc), 0.3);
    for (std::size_t i = 0; i < n; ++i) CHECK(exact.w_pred[i] == Catch::Approx(0.3 + u[i] - u[0]).margin(1e-12));
}

TEST_CASE("zero model holds w0") {
    const auto ts = simulate_duhem({}, {}, 100, 0.01);
    const auto ds = differentiate_series(ts);
    const auto p = integrate_model(model_of({{T(DerivFactor::Signed, 0, 0), 0.0}}), ts, ds, -0.4);
    for (double w : p.w_pred) CHECK(w == -0.4);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(p.abs_err[i] == std::abs(ts.w[i] + 0.4));
}

TEST_CASE("true Duhem model reproduces its data") {
    const DuhemParams params{0.4, 0.5, 0.25};
    const HarmonicExcitation exc;
    const std::size_t n = 10000;
    const auto ts = simulate_duhem(params, exc, n, default_dt(exc, n));
    const double wmax = test::max_abs(ts.w);
    SECTION("from sampled, differentiated input") {
        const auto ds = differentiate_series(ts);
        const auto p = integrate_model(duhem_model(params), ts, ds, ts.w[0]);
        CHECK(test::max_abs(p.abs_err) <= 1e-6 * wmax);
    }
    SECTION("with the exact excitation it is the generator") {
        const auto p = integrate_model(duhem_model(params), ts, analytic(exc), ts.w[0]);
        CHECK(test::max_abs_diff(p.w_pred, ts.w) <= 1e-9 * wmax);
    }
}

TEST_CASE("butterfly coupled integration keeps w = y^2 + c") {
    using F = DerivFactor;
    const HarmonicExcitation exc;
    const std::size_t n = 10000;
    const auto b = simulate_butterfly({3.2, 1.7, 0.4}, exc, n, default_dt(exc, n), 0.0);
    const auto ds = differentiate_series(b.series);
    const auto outer = model_of({{T(F::Signed, 0, 0, 0, 1), 0.8}, {T(F::Absolute, 0, 1), -3.4},
                                 {T(F::Absolute, 1, 0, 0, 1), 6.4}});
    const AuxModel aux{duhem_model({3.2, 1.7, 0.4}, "dy/dt"), 0.0};
    const auto p = integrate_model(outer, b.series, ds, 0.0, aux);
    REQUIRE(p.y_pred.size() == n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(p.w_pred[i] - p.y_pred[i] * p.y_pred[i]));
    CHECK(worst <= 1e-3 * test::max_abs(p.w_pred));
    CHECK(relative_percent_error(b.series.w, p.w_pred) <= 0.1);
}

TEST_CASE("integrate_model errors") {
    const auto ts = simulate_duhem({}, {}, 100, 0.01);
    const auto ds = differentiate_series(ts);
    const auto needs_y = model_of({{T(DerivFactor::Signed, 0, 0, 0, 1), 1.0}});
    CHECK(code_of([&] { integrate_model(needs_y, ts, ds, 0.0); }) == ErrorCode::MissingAuxModel);
    const auto explode = model_of({{T(DerivFactor::None, 0, 2), 50.0}});
    CHECK(code_of([&] { integrate_model(explode, ts, ds, 1.0); }) == ErrorCode::DivergedSimulation);
    DerivedSeries short_ds{std::vector<double>(50, 0.0), {}};
    CHECK(code_of([&] { integrate_model(needs_y, ts, short_ds, 0.0); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("relative percent error") {
    const std::vector<double> w{1, 2, 3};
    CHECK(relative_percent_error(w, w) == 0.0);
    CHECK(relative_percent_error(w, std::vector<double>{1, 2, 4}) ==
          Catch::Approx(100.0 / std::sqrt(14.0)).epsilon(1e-14));
    CHECK(relative_percent_error(w, std::vector<double>{2, 4, 6}) == Catch::Approx(100.0).epsilon(1e-14));
    CHECK(code_of([] { relative_percent_error(std::vector<double>{0, 0}, std::vector<double>{1, 1}); }) ==
          ErrorCode::ZeroReference);
    CHECK(code_of([&] { relative_percent_error(w, std::vector<double>{1, 2}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("nrmse") {
    const std::vector<double> w{0, 2};
    CHECK(nrmse(w, w) == 0.0);
    CHECK(nrmse(w, std::vector<double>{1, 1}) == Catch::Approx(0.5).epsilon(1e-15));
    const auto r = test::random_vector(50, 8);
    std::vector<double> shifted(r);
    for (double& x : shifted) x += 0.3;
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    CHECK(nrmse(r, shifted) == Catch::Approx(0.3 / (*hi - *lo)).epsilon(1e-12));
    CHECK(code_of([] { nrmse(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }) ==
          ErrorCode::ConstantReference);
}

TEST_CASE("r2 score") {
    const std::vector<double> w{1, 2, 3};
    CHECK(r2_score(w, w) == 1.0);
    CHECK(r2_score(w, std::vector<double>{2, 2, 2}) == Catch::Approx(0.0).margin(1e-15));
    // Hand case: SS_res = 0.01 + 0.01 + 0.04, SS_tot = 2.
    CHECK(r2_score(w, std::vector<double>{1.1, 1.9, 3.2}) == Catch::Approx(1.0 - 0.06 / 2.0).margin(1e-12));
    CHECK(code_of([] { r2_score(std::vector<double>{4, 4}, std::vector<double>{1, 2}); }) ==
          ErrorCode::ConstantReference);
}

TEST_CASE("metrics match direct-formula oracles on random vectors") {
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = test::random_vector(257, 100 + trial, -3, 5);
        const auto p = test::random_vector(257, 200 + trial, -3, 5);
        double ss = 0.0, ref = 0.0, mean = 0.0;
        for (double x : w) mean += x;
        mean /= w.size();
        double tot = 0.0, lo = w[0], hi = w[0];
        for (std::size_t i = 0; i < w.size(); ++i) {
            ss += (w[i] - p[i]) * (w[i] - p[i]);
            ref += w[i] * w[i];
            tot += (w[i] - mean) * (w[i] - mean);
            lo = std::min(lo, w[i]);
            hi = std::max(hi, w[i]);
        }
        CHECK(relative_percent_error(w, p) == Catch::Approx(100 * std::sqrt(ss) / std::sqrt(ref)).epsilon(1e-12));
        CHECK(nrmse(w, p) == Catch::Approx(std::sqrt(ss / w.size()) / (hi - lo)).epsilon(1e-12));
        CHECK(r2_score(w, p) == Catch::Approx(1 - ss / tot).epsilon(1e-12));
    }
}

TEST_CASE("metrics reach their ideal values only for identical sequences") {
    const auto w = test::random_vector(64, 1);
    auto p = w;
    CHECK(relative_percent_error(w, p) == 0.0);
    CHECK(nrmse(w, p) == 0.0);
    CHECK(r2_score(w, p) == 1.0);
    p[17] += 1e-3;
    CHECK(relative_percent_error(w, p) > 0.0);
    CHECK(nrmse(w, p) > 0.0);
    CHECK(r2_score(w, p) < 1.0);
}
