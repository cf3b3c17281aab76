#include "doctest.h"
#include "morreylab/errors.hpp"
#include "morreylab/quadrature.hpp"
#include "morreylab/reduced.hpp"
#include "morreylab/rules.hpp"

#include <cmath>
#include <numbers>

using namespace morreylab;

namespace {
const double pi = std::numbers::pi;

double lens_area(double R, double s) {
    // |B_R(y) & B_1| in the plane, |y| = s
    if (s >= 1.0 + R) return 0.0;
    if (s <= std::fabs(1.0 - R)) return pi * std::pow(std::min(1.0, R), 2);
    const double a = std::acos((s * s + 1.0 - R * R) / (2.0 * s));
    const double b = std::acos((s * s + R * R - 1.0) / (2.0 * s * R));
    return a + R * R * b - 0.5 * std::sqrt((-s + 1 + R) * (s + 1 - R) * (s - 1 + R) * (s + 1 + R));
}

double lens_volume(double R, double s) {
    if (s >= 1.0 + R) return 0.0;
    if (s <= std::fabs(1.0 - R)) return 4.0 / 3.0 * pi * std::pow(std::min(1.0, R), 3);
    const double u = 1.0 + R - s;
    return pi * u * u * (s * s + 2 * s * R - 3 * R * R + 2 * s + 6 * R - 3) / (12.0 * s);
}
} // namespace

TEST_CASE("sphere means of powers") {
    // Newtonian kernel: the sphere mean of |x - y|^(2-n) is |max(rho, s)|^(2-n)
    for (int n : {3, 4, 5})
        for (double rho : {0.3, 0.7, 1.0})
            for (double s : {0.0, 0.2, 0.7, 1.5})
                CHECK(sphere_mean_power(n, rho, s, 2.0 - n) ==
                      doctest::Approx(sphere_area(n - 1) * std::pow(std::max(rho, s), 2.0 - n))
                          .epsilon(1e-9));
    // n = 2 against a direct angular integral
    for (double e : {-0.5, 1.3}) {
        const double rho = 0.4, s = 0.9;
        const double ref = 2.0 * tanh_sinh([&](double t) {
            return std::pow(rho * rho + s * s - 2 * rho * s * std::cos(t), 0.5 * e);
        }, 0.0, pi, 1e-13);
        CHECK(sphere_mean_power(2, rho, s, e) == doctest::Approx(ref).epsilon(1e-10));
    }
    // n = 3 with the logarithmic exponent
    CHECK(sphere_mean_power(3, 0.5, 0.25, -2.0) ==
          doctest::Approx(2 * pi / (0.5 * 0.25) * std::log(0.75 / 0.25)).epsilon(1e-12));
}

TEST_CASE("cap measure") {
    CHECK(cap_measure(3, 0.25) == doctest::Approx(2 * pi * 0.75));
    CHECK(cap_measure(3, -0.25) == doctest::Approx(2 * pi * 1.25));
    CHECK(cap_measure(2, 0.0) == doctest::Approx(pi));
    CHECK(cap_measure(2, -1.5) == doctest::Approx(2 * pi));
    CHECK(cap_measure(4, 1.0) == 0.0);
}

TEST_CASE("radial weighted integrals") {
    // Newton potential of the unit ball in R^3
    const RadialIntegrand one{[](double) { return 1.0; }, 0.0, 1.0};
    for (double s : {0.0, 0.3, 0.99, 1.0, 2.0}) {
        const double ref = s <= 1.0 ? 2 * pi * (1 - s * s / 3) : 4 * pi / (3 * s);
        CHECK(radial_weighted(one, 3, s, -1.0) == doctest::Approx(ref).epsilon(1e-9));
    }
    // singular profile at the centre: sigma a^p / (lambda - a p - p)
    const double a = 0.3, p = 1.5, lambda = 2.5;
    const RadialIntegrand h{[=](double r) { return std::pow(a * std::pow(r, -a - 1), p); }, -(a + 1) * p, 1.0};
    CHECK(radial_weighted(h, 3, 0.0, lambda - 3) ==
          doctest::Approx(4 * pi * std::pow(a, p) / (lambda - a * p - p)).epsilon(1e-9));
}

TEST_CASE("radial ball integrals against lens measures") {
    const RadialIntegrand one{[](double) { return 1.0; }, 0.0, 1.0};
    for (double s : {0.0, 0.4, 0.9, 1.3})
        for (double R : {0.05, 0.5, 1.2, 3.0}) {
            CHECK(radial_ball(one, 2, s, R) == doctest::Approx(lens_area(R, s)).epsilon(1e-9));
            CHECK(radial_ball(one, 3, s, R) == doctest::Approx(lens_volume(R, s)).epsilon(1e-9));
        }
}

TEST_CASE("radial shells add up") {
    const RadialIntegrand one{[](double) { return 1.0; }, 0.0, 1.0};
    const auto s = radial_shells(one, 3, 30);
    double total = 0.0;
    for (double v : s) total += v;
    CHECK(total == doctest::Approx(4 * pi / 3 * (1 - std::pow(2.0, -90))).epsilon(1e-12));
}

TEST_CASE("axial integrals") {
    AxialIntegrand cyl{[](double, double) { return 1.0; }, 0.0, 0.5, 0.6, {}};
    const double vol = pi * 0.25 * 1.2;
    CHECK(axial_ball(cyl, 3, 0.1, 0.3) == doctest::Approx(4.0 / 3 * pi * 0.027).epsilon(1e-9));
    CHECK(axial_ball(cyl, 3, 0.1, 2.0) == doctest::Approx(vol).epsilon(1e-9));
    CHECK(axial_weighted(cyl, 3, 0.0, 0.2, 0.0) == doctest::Approx(vol).epsilon(1e-9));
    CHECK(axial_weighted(cyl, 3, 0.3, 0.2, 0.0) == doctest::Approx(vol).epsilon(1e-9));

    // smooth profile against the generic box engine
    AxialIntegrand sm{[](double r, double z) { return (0.25 - r * r) * (0.36 - z * z); }, 0.0, 0.5, 0.6, {}};
    PointFn f = [](std::span<const double> x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return r2 >= 0.25 ? 0.0 : (0.25 - r2) * (0.36 - x[2] * x[2]);
    };
    QuadratureOptions o;
    o.rel_tol = 1e-7;
    for (double b : {0.0, 0.2}) {
        const auto ref = integrate_box(f, Box{{-0.5, -0.5, -0.6}, {0.5, 0.5, 0.6}},
                                       SingularWeight{{b, 0.0, 0.1}, -1.0}, o);
        CHECK(axial_weighted(sm, 3, b, 0.1, -1.0) == doctest::Approx(ref.value).epsilon(1e-5));
    }
}

TEST_CASE("non-integrable reduced integrands are rejected") {
    const RadialIntegrand h{[](double r) { return std::pow(r, -3.5); }, -3.5, 1.0};
    CHECK_THROWS_AS(radial_weighted(h, 3, 0.0, 0.0), NonIntegrableHint);
    CHECK_THROWS_AS(radial_ball(h, 3, 0.0, 0.5), NonIntegrableHint);
}
