#include <catch_amalgamated.hpp>

#include <cmath>

#include "hysid/diff.hpp"
#include "hysid/generators.hpp"
#include "support.hpp"

using namespace hysid;

namespace {

std::vector<double> sample(double dt, std::size_t n, double (*f)(double)) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(static_cast<double>(i) * dt);
    return v;
}

double max_error_sin(double dt, std::size_t n) {
    const auto d = central_difference(sample(dt, n, [](double t) { return std::sin(t); }), dt);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(d[i] - std::cos(i * dt)));
    return e;
}

}  // namespace

TEST_CASE("central_difference of a constant is zero") {
    const auto d = central_difference(std::vector<double>(10, 3.5), 0.1);
    CHECK(d.size() == 10);
    for (double x : d) CHECK(x == 0.0);
}

TEST_CASE("central_difference is exact on affine sequences") {
    const double a = -2.75, b = 1.3, dt = 0.01;
    std::vector<double> v(50);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * (i * dt) + b;
    for (double x : central_difference(v, dt)) CHECK(x == Catch::Approx(a).margin(1e-12));
}

TEST_CASE("central_difference is exact on quadratics") {
    // Both the central and the one-sided three-point stencils are exact to degree 2.
    const double dt = 0.05;
    std::vector<double> v(30);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = i * dt;
        v[i] = 0.7 * t * t - 1.1 * t + 0.2;
    }
    const auto d = central_difference(v, dt);
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(d[i] == Catch::Approx(1.4 * (i * dt) - 1.1).margin(1e-11));
    }
}

TEST_CASE("central_difference on sin meets the second-order bound") {
    CHECK(max_error_sin(1e-3, 10000) <= 5e-7);
}

TEST_CASE("central_difference converges at second order") {
    const double span = 6.0;
    double prev = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double dt = 0.01 / (1 << k);
        const auto n = static_cast<std::size_t>(span / dt) + 1;
        const double e = max_error_sin(dt, n);
        if (k > 0) {
            const double order = std::log2(prev / e);
            INFO("dt = " << dt << ", observed order " << order);
            CHECK(order >= 1.9);
            CHECK(prev / e >= 3.8);
        }
        prev = e;
    }
}

TEST_CASE("central_difference is linear") {
    const auto x = test::random_vector(200, 5);
    const auto y = test::random_vector(200, 6);
    std::vector<double> z(200);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = 2.5 * x[i] - 0.75 * y[i];
    const auto dx = central_difference(x, 0.1);
    const auto dy = central_difference(y, 0.1);
    const auto dz = central_difference(z, 0.1);
    for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK(dz[i] == Catch::Approx(2.5 * dx[i] - 0.75 * dy[i]).margin(1e-12));
    }
}

TEST_CASE("central_difference preconditions") {
    CHECK_THROWS_MATCHES(central_difference(std::vector<double>{1, 2, 3}, 0.1), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == ErrorCode::TooShort; }));
    CHECK_THROWS_AS(central_difference(std::vector<double>{1, 2, 3, 4}, 0.0), Error);
    CHECK(central_difference(std::vector<double>{0, 1, 2, 3}, 1.0) == std::vector<double>{1, 1, 1, 1});
}

TEST_CASE("differentiate_series") {
    SECTION("zero series") {
        const auto ds = differentiate_series(test::uniform_series(8, 0.1));
        for (double x : ds.du) CHECK(x == 0.0);
        for (double x : ds.dw) CHECK(x == 0.0);
    }
    SECTION("ramp input, constant output") {
        auto ts = test::uniform_series(12, 0.25);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            ts.u[i] = 3.0 * ts.t[i];
            ts.w[i] = -4.0;
        }
        const auto ds = differentiate_series(ts);
        for (double x : ds.du) CHECK(x == Catch::Approx(3.0).margin(1e-12));
        for (double x : ds.dw) CHECK(x == 0.0);
    }
    SECTION("Duhem output matches the right-hand side to second order") {
        const DuhemParams p;
        const HarmonicExcitation exc;
        double prev = 0.0;
        for (std::size_t n : {4000u, 8000u, 16000u}) {
            const double dt = default_dt(exc, n);
            const auto ts = simulate_duhem(p, exc, n, dt);
            const auto ds = differentiate_series(ts);
            double err = 0.0;
            // The right-hand side has kinks where u' changes sign; measure
            // away from the two one-sided boundary rows.
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double rhs = duhem_rhs(p, ts.u[i], exc.derivative(ts.t[i]), ts.w[i]);
                err += std::abs(ds.dw[i] - rhs);
            }
            err /= static_cast<double>(n);
            if (prev > 0.0) CHECK(prev / err >= 3.5);
            prev = err;
        }
        CHECK(prev <= 1e-5);
    }
}
