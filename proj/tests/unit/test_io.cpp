#include <catch_amalgamated.hpp>

#include <cmath>

#include "hysid/diff.hpp"
#include "hysid/generators.hpp"
#include "hysid/io.hpp"
#include "support.hpp"

using namespace hysid;
using Catch::Matchers::ContainsSubstring;

namespace {

TermDescriptor T(DerivFactor f, int pu, int pw, int pa = 0, int py = 0) { return {f, pu, pw, pa, py}; }

Error error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an Error");
    return Error(ErrorCode::IoError, "");
}

SparseModel actuator_model() {
    using F = DerivFactor;
    SparseModel m;
    m.terms = {T(F::None, 0, 0), T(F::None, 1, 0), T(F::None, 0, 1), T(F::Signed, 0, 0),
               T(F::Absolute, 0, 0), T(F::None, 0, 1, 1)};
    m.coefficients = {-0.17, -2.38, 0.0, 0.58, 0.12, -0.07};
    m.threshold = 0.01;
    m.iterations = 3;
    return m;
}

std::string numbered_rows(std::size_t n) {
    std::string s = "t,u,w\n";
    for (std::size_t i = 0; i < n; ++i) {
        s += std::to_string(i) + "e-3," + std::to_string(i % 7) + "," + std::to_string(i) + "\n";
    }
    return s;
}

}  // namespace

TEST_CASE("read_csv reads a small well-formed file") {
    test::TempDir dir("io_small");
    test::spit(dir / "a.csv", "t,u,w\n0,1,2\n0.1,1.5,2.5\n0.2,2,3\n0.3,2.5,3.5\n");
    const auto ts = read_csv(dir / "a.csv");
    CHECK(ts.size() == 4);
    CHECK(ts.u[1] == 1.5);
    CHECK(ts.w[3] == 3.5);
}

TEST_CASE("read_csv truncates to max_points") {
    test::TempDir dir("io_trunc");
    test::spit(dir / "big.csv", numbered_rows(45000));
    const auto ts = read_csv(dir / "big.csv", {}, 15000);
    REQUIRE(ts.size() == 15000);
    CHECK(ts.w.front() == 0.0);
    CHECK(ts.w.back() == 14999.0);
}

TEST_CASE("read_csv reports malformed cells with row and column") {
    test::TempDir dir("io_bad");
    test::spit(dir / "bad.csv", "t,u,w\n0,1,2\n0.1,x1,2\n");
    const Error e = error_of([&] { read_csv(dir / "bad.csv"); });
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.index() == 1u);
    CHECK_THAT(std::string(e.what()), ContainsSubstring("row 1"));
    CHECK_THAT(std::string(e.what()), ContainsSubstring("column 1"));

    test::spit(dir / "short.csv", "t,u,w\n0,1\n");
    CHECK(error_of([&] { read_csv(dir / "short.csv"); }).code() == ErrorCode::ParseError);
}

TEST_CASE("read_csv error paths") {
    test::TempDir dir("io_err");
    CHECK(error_of([&] { read_csv(dir / "missing.csv"); }).code() == ErrorCode::FileNotFound);
    test::spit(dir / "jitter.csv", "t,u,w\n0,0,0\n0.1,0,0\n0.25,0,0\n0.3,0,0\n");
    CHECK(error_of([&] { read_csv(dir / "jitter.csv"); }).code() == ErrorCode::NonUniformGrid);
    CsvSchema same;
    same.input_col = same.output_col = 1;
    CHECK(error_of([&] { read_csv(dir / "jitter.csv", same); }).code() == ErrorCode::InvalidParameter);
}

TEST_CASE("read_csv with custom layout and synthesized time") {
    test::TempDir dir("io_layout");
    test::spit(dir / "raw.txt", "5;10\n6;11\n7;12\n8;13\n9;14\n");
    CsvSchema s;
    s.time_col.reset();
    s.dt = 0.5;
    s.input_col = 1;
    s.output_col = 0;
    s.has_header = false;
    s.delimiter = ';';
    const auto ts = read_csv(dir / "raw.txt", s);
    CHECK(ts.t == std::vector<double>{0, 0.5, 1.0, 1.5, 2.0});
    CHECK(ts.u.front() == 10.0);
    CHECK(ts.w.back() == 9.0);
    s.dt.reset();
    CHECK(error_of([&] { read_csv(dir / "raw.txt", s); }).code() == ErrorCode::InvalidParameter);
}

TEST_CASE("series CSV round trip is exact") {
    test::TempDir dir("io_series");
    const auto ts = simulate_duhem({}, {}, 2000, default_dt({}, 2000));
    write_series_csv(dir / "s.csv", ts);
    const auto back = read_csv(dir / "s.csv");
    CHECK(back.t == ts.t);
    CHECK(back.u == ts.u);
    CHECK(back.w == ts.w);
    // Deterministic bytes.
    write_series_csv(dir / "s2.csv", back);
    CHECK(test::slurp(dir / "s.csv") == test::slurp(dir / "s2.csv"));
}

TEST_CASE("series CSV with a prediction has five columns") {
    test::TempDir dir("io_pred");
    const auto ts = simulate_duhem({}, {}, 50, 0.01);
    Prediction p;
    p.w_pred = ts.w;
    for (double& x : p.w_pred) x += 0.25;
    p.abs_err.assign(ts.size(), 0.25);
    write_series_csv(dir / "p.csv", ts, &p);
    const auto text = test::slurp(dir / "p.csv");
    CHECK(text.rfind("t,u,w,w_pred,abs_err\n", 0) == 0);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 4);
        ++rows;
    }
    CHECK(rows == ts.size());
    CsvSchema pred_cols;
    pred_cols.output_col = 3;
    const auto back = read_csv(dir / "p.csv", pred_cols);
    CHECK(back.w == p.w_pred);

    write_series_csv(dir / "plain.csv", ts);
    CHECK(test::slurp(dir / "plain.csv").rfind("t,u,w\n", 0) == 0);
}

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5e-7) == "-2.5e-07");
    for (double v : test::random_vector(200, 4, -1e6, 1e6)) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("model file") {
    test::TempDir dir("io_model");
    SECTION("actuator-style equation line") {
        FitReport r;
        r.r_percent = 1.5;
        r.nrmse = 0.23;
        r.r2 = 0.99;
        write_model(dir / "m.txt", actuator_model(), r);
        const auto text = test::slurp(dir / "m.txt");
        CHECK_THAT(text, ContainsSubstring("dw/dt = -0.17 - 2.38*u + 0.58*u' + 0.12*|u'| - 0.07*w*|w|\n"));
        CHECK_THAT(text, ContainsSubstring("threshold = 0.01\n"));
        CHECK_THAT(text, ContainsSubstring("-0.17\t1\n"));
    }
    SECTION("zero model") {
        SparseModel m = actuator_model();
        std::fill(m.coefficients.begin(), m.coefficients.end(), 0.0);
        const auto text = serialize_model(m, {});
        CHECK(text.find('\t') == std::string::npos);
        CHECK_THAT(text, ContainsSubstring("dw/dt = 0\n"));
        CHECK(parse_model(text).model.coefficients == m.coefficients);
    }
    SECTION("round trip") {
        SparseModel m = actuator_model();
        m.coefficients = {0.123456789012345, -2.000000000001, 0.0, 1e-9, 3.14159265358979, -7.5e3};
        m.converged = false;
        m.target_name = "dy/dt";
        FitReport r;
        r.r_percent = 0.00123;
        r.fit_seconds = 0.5;
        r.noise_percent = 5;
        write_model(dir / "rt.txt", m, r);
        const auto back = read_model(dir / "rt.txt");
        CHECK(back.model.terms == m.terms);
        for (std::size_t j = 0; j < m.coefficients.size(); ++j) {
            CHECK(back.model.coefficients[j] == Catch::Approx(m.coefficients[j]).epsilon(1e-12));
        }
        CHECK(back.model.threshold == m.threshold);
        CHECK(back.model.iterations == m.iterations);
        CHECK(back.model.converged == false);
        CHECK(back.model.target_name == "dy/dt");
        CHECK(back.report.r_percent == r.r_percent);
        CHECK(back.report.fit_seconds == r.fit_seconds);
        CHECK(back.report.noise_percent == 5);
        // Writing the parsed model again yields identical bytes.
        write_model(dir / "rt2.txt", back.model, back.report);
        CHECK(test::slurp(dir / "rt.txt") == test::slurp(dir / "rt2.txt"));
    }
    SECTION("parse errors") {
        CHECK(error_of([] { parse_model("nonsense\n"); }).code() == ErrorCode::ParseError);
        CHECK(error_of([] { parse_model("library = u\n1\tsin(u)\n"); }).code() == ErrorCode::ParseError);
        CHECK(error_of([] { parse_model("library = u\n1\tw\n"); }).code() == ErrorCode::ParseError);
        CHECK(error_of([] { parse_model("bogus = 1\n"); }).code() == ErrorCode::ParseError);
        CHECK(error_of([&] { read_model(dir / "none.txt"); }).code() == ErrorCode::FileNotFound);
    }
    SECTION("coefficient lines alone define the library") {
        const auto mf = parse_model("0.5\tu'\n-1\t|u'|*w\n");
        CHECK(mf.model.terms.size() == 2);
        CHECK(mf.model.coefficient(T(DerivFactor::Absolute, 0, 1)) == -1.0);
    }
}

TEST_CASE("aux CSV") {
    test::TempDir dir("io_aux");
    const auto b = simulate_butterfly({3.2, 1.7, 0.4}, {}, 100, 0.01);
    write_aux_csv(dir / "y.csv", b.series, b.y);
    CHECK(test::slurp(dir / "y.csv").rfind("t,u,y\n", 0) == 0);
    CHECK(read_csv(dir / "y.csv").w == b.y);
}
