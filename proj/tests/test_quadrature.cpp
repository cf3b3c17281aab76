#include "doctest.h"
#include "morreylab/errors.hpp"
#include "morreylab/quadrature.hpp"
#include "morreylab/rules.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace morreylab;

namespace {
const double pi = std::numbers::pi;
PointFn one = [](std::span<const double>) { return 1.0; };
} // namespace

TEST_CASE("graded rule integrates a power singularity") {
    const Focus f[] = {{0.0, 1e-14, -0.9}};
    const Rule r = graded_rule(0.0, 1.0, f);
    CHECK(integrate_rule(r, [](double x) { return std::pow(x, -0.9); }) == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(sphere_area(0) == doctest::Approx(2.0));
    CHECK(sphere_area(1) == doctest::Approx(2 * pi));
    CHECK(sphere_area(2) == doctest::Approx(4 * pi));
}

TEST_CASE("constant on the unit square") {
    const QuadratureResult r = integrate_box(one, Box{{0, 0}, {1, 1}}, std::nullopt);
    CHECK(std::fabs(r.value - 1.0) <= 1e-12);
    CHECK(r.evaluations > 0);
}

TEST_CASE("weighted ball closed form") {
    const double c[] = {0.0, 0.0};
    const QuadratureResult r = integrate_ball(one, c, 1.0, SingularWeight{{0.0, 0.0}, -0.5});
    CHECK(r.value == doctest::Approx(2 * pi / 1.5).epsilon(1e-6));
    CHECK(r.value == doctest::Approx(4.18879).epsilon(1e-6));
    CHECK_THROWS_AS(integrate_ball(one, c, 1.0, SingularWeight{{0.0, 0.0}, -2.0}), NonIntegrableHint);
    QuadratureOptions o;
    o.hints.push_back({{0.0, 0.0}, -2.5});
    CHECK_THROWS_AS(integrate_box(one, Box{{0, 0}, {1, 1}}, std::nullopt, o), NonIntegrableHint);
}

TEST_CASE("weighted ball corpus") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const int n = 2 + i % 2;
        const double lam = 0.3 + (n - 0.4) * u(rng);
        const double r = 0.1 + u(rng);
        std::vector<double> y(n);
        for (double& v : y) v = u(rng) - 0.5;
        const QuadratureResult q = integrate_ball(one, y, r, SingularWeight{y, lam - n});
        const double exact = sphere_area(n - 1) * std::pow(r, lam) / lam;
        CHECK(q.value == doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("box with weight centre inside") {
    // |x|^{-1} over [-1,1]^2 = 8 asinh(1)
    QuadratureOptions o;
    o.rel_tol = 1e-7;
    const QuadratureResult r = integrate_box(one, Box{{-1, -1}, {1, 1}}, SingularWeight{{0.0, 0.0}, -1.0}, o);
    CHECK(r.value == doctest::Approx(8.0 * std::asinh(1.0)).epsilon(1e-6));
}

TEST_CASE("additivity over dyadic children") {
    PointFn f = [](std::span<const double> x) { return std::exp(x[0]) * std::cos(x[1]); };
    QuadratureOptions o;
    o.rel_tol = 1e-14;
    const double whole = integrate_box(f, Box{{0, 0}, {1, 1}}, std::nullopt, o).value;
    double parts = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            parts += integrate_box(f, Box{{0.5 * i, 0.5 * j}, {0.5 * i + 0.5, 0.5 * j + 0.5}},
                                   std::nullopt, o)
                         .value;
    CHECK(std::fabs(whole - parts) <= 1e-12);
}

TEST_CASE("determinism across policies") {
    PointFn f = [](std::span<const double> x) { return std::pow(x[0] * x[0] + x[1] * x[1] + 1e-3, -0.6); };
    QuadratureOptions a, b;
    a.rel_tol = b.rel_tol = 1e-9;
    b.policy = ExecPolicy::parallel;
    const Box box{{-1, -1}, {1, 1}};
    const QuadratureResult r1 = integrate_box(f, box, std::nullopt, a);
    const QuadratureResult r2 = integrate_box(f, box, std::nullopt, a);
    const QuadratureResult r3 = integrate_box(f, box, std::nullopt, b);
    CHECK(r1.value == r2.value);
    CHECK(r1.value == r3.value);
    CHECK(r1.error_estimate == r3.error_estimate);
    CHECK(r1.evaluations == r3.evaluations);
}

TEST_CASE("budget flag") {
    PointFn f = [](std::span<const double> x) { return std::pow(x[0] * x[0] + x[1] * x[1], -0.7); };
    QuadratureOptions o;
    o.budget = 2000;
    o.rel_tol = 1e-12;
    o.hints.push_back({{0.0, 0.0}, -1.4});
    const QuadratureResult r = integrate_box(f, Box{{0, 0}, {1, 1}}, std::nullopt, o);
    CHECK(r.budget_exceeded);
}

TEST_CASE("trace csv") {
    std::vector<CellTrace> t;
    QuadratureOptions o;
    o.trace = &t;
    integrate_box(one, Box{{0, 0}, {1, 1}}, std::nullopt, o);
    CHECK(!t.empty());
    std::ostringstream os;
    write_trace_csv(t, os);
    CHECK(os.str().rfind("lo_0,lo_1,hi_0,hi_1,value,error\n", 0) == 0);
}

TEST_CASE("cylindrical reduction") {
    const PointFn c3 = reduce_cylindrical([](double, std::span<const double>) { return 1.0; }, 3);
    CHECK(integrate_box(c3, Box{{0.0, 0.0}, {0.25, 1.0}}, std::nullopt).value ==
          doctest::Approx(pi / 16).epsilon(1e-12));
    const PointFn c2 = reduce_cylindrical([](double r, std::span<const double>) { return r; }, 2);
    CHECK(integrate_box(c2, Box{{0.0, 0.0}, {0.25, 1.0}}, std::nullopt).value ==
          doctest::Approx(1.0 / 16).epsilon(1e-12));
    CHECK_THROWS_AS(reduce_cylindrical([](double, std::span<const double>) { return 1.0; }, 1),
                    DimensionError);
}

TEST_CASE("cylindrical reduction against a direct 4d box") {
    // A smooth x'-radial integrand on the region |x'| < 1/4, t in [0.1, 0.2].
    auto g = [](double r, double t) { return std::exp(-r * r) * (1.0 + t * t) * std::cos(r); };
    const PointFn red = reduce_cylindrical(
        [g](double r, std::span<const double> rest) { return g(r, rest[0]); }, 4);
    const double two_d =
        integrate_box(red, Box{{0.0, 0.1}, {0.25, 0.2}}, std::nullopt).value;
    PointFn full = [g](std::span<const double> x) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return r < 0.25 ? g(r, x[3]) : 0.0;
    };
    QuadratureOptions o;
    o.rel_tol = 1e-4;
    o.order = 4;
    const double four_d = integrate_box(full, Box{{-0.25, -0.25, -0.25, 0.1}, {0.25, 0.25, 0.25, 0.2}},
                                        std::nullopt, o)
                              .value;
    CHECK(four_d == doctest::Approx(two_d).epsilon(1e-3));
}

TEST_CASE("transverse factor bound") {
    const double x[] = {0.0, 0.0}, far[] = {2.0, 0.0}, near[] = {1e-8, 0.0};
    CHECK(transverse_factor_bound(x, far, 3, 2, 1.5, 3.0) == 3.0);
    const double b1 = transverse_factor_bound(x, near, 3, 2, 1.5);
    const double b2 = transverse_factor_bound(x, near, 3, 2, 1.5 - 1e-9);
    CHECK(b1 < 1.0 + 1.0 / 0.5);
    CHECK(b2 == doctest::Approx(b1).epsilon(1e-6));
    const double li = transverse_factor_bound(x, near, 3, 2, 2.0);
    CHECK(li == doctest::Approx(1.0 + std::log(2e8)));
    CHECK_THROWS_AS(transverse_factor_bound(x, near, 2, 2, 1.5), DimensionError);
}

TEST_CASE("gap-stratified: constant integrand") {
    const CantorSet c(0.5);
    PointFn f = [](std::span<const double>) { return 1.0; };
    const StratifiedResult r = integrate_gap_stratified(f, 2, c, std::nullopt, 10, 0.5);
    CHECK(r.value == doctest::Approx(gap_measure_partial_sum(c, 10) * 0.5).epsilon(1e-12));
    const StratifiedResult r3 = integrate_gap_stratified(f, 3, c, std::nullopt, 6, 0.5);
    CHECK(r3.value == doctest::Approx(gap_measure_partial_sum(c, 6) * pi / 16).epsilon(1e-12));
    CHECK(r.tail_label == "calibrated");
    CHECK_THROWS_AS(integrate_gap_stratified(f, 2, c, std::nullopt, 4, 0.0), TailDivergence);
}
