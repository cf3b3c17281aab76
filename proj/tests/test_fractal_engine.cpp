#include "doctest.h"
#include "morreylab/errors.hpp"
#include "morreylab/fractal_engine.hpp"

#include <cmath>
#include <numbers>

using namespace morreylab;

namespace {
const double pi = std::numbers::pi;

// |grad u|^p for the fractal counterexample with n = 2, lambda = 1.5, p = 1.2, alpha = 0.1.
constexpr double alpha = 0.1, p = 1.2, theta = 1.5 - alpha * p - p;
double g(double d) { return d >= 0.25 ? 0.0 : std::pow(alpha * std::pow(d, -alpha - 1.0), p); }
constexpr double g_power = -(alpha + 1.0) * p;

FractalEngine make(int n, int L, double eta = 6.0, double eta_ball = 20.0) {
    EngineOptions o;
    o.generations = L;
    o.eta = eta;
    o.eta_ball = eta_ball;
    o.tail_theta = theta;
    return FractalEngine(CantorSet(0.5), n, g, g_power, o);
}
} // namespace

TEST_CASE("cone measure") {
    CHECK(cone_measure(2, 0, 1) == doctest::Approx(pi));
    CHECK(cone_measure(3, 0, 1) == doctest::Approx(2 * pi));
    CHECK(cone_measure(4, 0, 1) == doctest::Approx(sphere_area(3) / 2));
    CHECK(cone_measure(5, 0, 1) == doctest::Approx(sphere_area(4) / 2));
    // n = 4: sigma_2 * int_{0.2}^{0.7} sqrt(1 - s^2) ds
    const auto F = [](double s) { return 0.5 * (s * std::sqrt(1 - s * s) + std::asin(s)); };
    CHECK(cone_measure(4, 0.2, 0.7) == doctest::Approx(4 * pi * (F(0.7) - F(0.2))).epsilon(1e-12));
    CHECK(cone_measure(3, 0.5, 0.5) == 0.0);
}

TEST_CASE("first gap against the direct box integral") {
    const FractalEngine E = make(2, 4);
    const double a = E.cantor().half_width(1);
    PointFn f = [a](std::span<const double> x) { return g(std::hypot(x[0], a - std::fabs(x[1]))); };
    QuadratureOptions o;
    o.rel_tol = 1e-9;
    o.hints = {{{0.0, a}, g_power}, {{0.0, -a}, g_power}};
    const auto box = integrate_box(f, Box{{-0.25, -a}, {0.25, a}}, std::nullopt, o);
    CHECK(E.gap_total(1) == doctest::Approx(box.value).epsilon(1e-6));
}

TEST_CASE("first gap in three dimensions through the cylindrical reduction") {
    const FractalEngine E = make(3, 3);
    const double a = E.cantor().half_width(1);
    PointFn f = reduce_cylindrical(
        [a](double r, std::span<const double> z) { return g(std::hypot(r, a - std::fabs(z[0]))); }, 3);
    QuadratureOptions o;
    o.rel_tol = 1e-9;
    o.hints = {{{0.0, a}, g_power + 1.0}, {{0.0, -a}, g_power + 1.0}};
    const auto box = integrate_box(f, Box{{0.0, -a}, {0.25, a}}, std::nullopt, o);
    CHECK(E.gap_total(1) == doctest::Approx(box.value).epsilon(1e-6));
}

TEST_CASE("weighted integral with exponent 0 reproduces the plain one") {
    for (int n : {2, 3}) {
        const FractalEngine E = make(n, 8);
        const auto pl = E.plain();
        std::vector<double> y(n, 0.0);
        y[n - 1] = 100.0;
        const auto far = E.weighted(y, 0.0);
        y[n - 1] = 0.25;
        const auto near = E.weighted(y, 0.0);
        for (int l = 1; l <= 8; ++l) {
            CHECK(far.per_generation[l - 1] == doctest::Approx(pl.per_generation[l - 1]).epsilon(1e-10));
            CHECK(near.per_generation[l - 1] == doctest::Approx(pl.per_generation[l - 1]).epsilon(1e-10));
        }
        CHECK(near.caps == doctest::Approx(E.caps_total()).epsilon(1e-12));
    }
}

TEST_CASE("far expansion agrees with direct polar integration") {
    const FractalEngine fast = make(2, 10, 6.0);
    const FractalEngine slow = make(2, 10, 40.0);
    for (double t : {0.0, 0.25, 0.3125, -0.4, 0.5, 0.7}) {
        for (double y1 : {0.0, 0.05, -0.3}) {
            const double y[] = {y1, t};
            const auto a = fast.weighted(y, -0.5);
            const auto b = slow.weighted(y, -0.5);
            CHECK(a.value == doctest::Approx(b.value).epsilon(1e-7));
        }
    }
    const FractalEngine f3 = make(3, 8, 6.0), s3 = make(3, 8, 40.0);
    const double y[] = {0.0, 0.0, 0.3125};
    CHECK(f3.weighted(y, -1.5).value == doctest::Approx(s3.weighted(y, -1.5).value).epsilon(1e-7));
}

TEST_CASE("first-generation weighted contribution against the box integral") {
    const FractalEngine E = make(2, 4);
    const double a = E.cantor().half_width(1);
    const double y[] = {0.0, 0.1};
    const auto w = E.weighted(y, -0.5);
    PointFn f = [a](std::span<const double> x) { return g(std::hypot(x[0], a - std::fabs(x[1]))); };
    QuadratureOptions o;
    o.rel_tol = 1e-9;
    o.hints = {{{0.0, a}, g_power}, {{0.0, -a}, g_power}};
    const auto box = integrate_box(f, Box{{-0.25, -a}, {0.25, a}}, SingularWeight{{0.0, 0.1}, -0.5}, o);
    CHECK(w.per_generation[0] == doctest::Approx(box.value).epsilon(1e-6));
}

TEST_CASE("ball expansion agrees with exact angular integration") {
    const FractalEngine fast = make(2, 10);
    const FractalEngine slow = make(2, 10, 6.0, 1e9);
    for (double t : {0.25, 0.3125, 0.4, -0.46875}) {
        for (double R : {0.003, 0.02, 0.07, 0.15, 0.3, 0.6}) {
            const double y[] = {0.0, t};
            CHECK(fast.ball(y, R).value == doctest::Approx(slow.ball(y, R).value).epsilon(1e-6));
        }
    }
    const double y[] = {0.0, 0.0};
    CHECK(fast.ball(y, 2.0).value == doctest::Approx(fast.plain().value).epsilon(1e-13));
    const double y3[] = {0.0, 0.0, 0.3125};
    const FractalEngine f3 = make(3, 8), s3 = make(3, 8, 6.0, 1e9);
    CHECK(f3.ball(y3, 0.1).value == doctest::Approx(s3.ball(y3, 0.1).value).epsilon(1e-6));
}

TEST_CASE("ball integrals grow with the radius") {
    const FractalEngine E = make(2, 10);
    const double y[] = {0.0, 0.3125};
    double prev = 0.0;
    for (double R = 1e-3; R < 1.5; R *= 1.3) {
        const double v = E.ball(y, R).value;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("tail bound decreases in L and covers later generations") {
    const double y[] = {0.0, 0.25};
    std::vector<FractalIntegral> runs;
    for (int L = 4; L <= 14; ++L) runs.push_back(make(2, L).weighted(y, -0.5));
    for (std::size_t i = 1; i < runs.size(); ++i) CHECK(runs[i].tail_bound < runs[i - 1].tail_bound);
    for (std::size_t i = 0; i + 4 < runs.size(); ++i) {
        CHECK(runs[i].tail_label == "calibrated");
        CHECK(std::fabs(runs[i + 4].value - runs[i].value) < runs[i].tail_bound);
    }
}

TEST_CASE("engine argument checks") {
    CHECK_THROWS_AS(FractalEngine(CantorSet(0.5), 1, g, g_power), DimensionError);
    CHECK_THROWS_AS(FractalEngine(CantorSet(0.5), 2, g, -2.5), NonIntegrableHint);
    const FractalEngine E3 = make(3, 4);
    const double off[] = {0.1, 0.0, 0.2};
    CHECK_THROWS_AS(E3.weighted(off, -1.5), DimensionError);
    const FractalEngine E2 = make(2, 4);
    const double off2[] = {0.1, 0.2};
    CHECK_THROWS_AS(E2.ball(off2, 0.1), DimensionError);
    CHECK_THROWS_AS(E2.weighted(off2, -2.0), NonIntegrableHint);
    CHECK_THROWS_AS(E2.gap_total(5), DomainError);
}
