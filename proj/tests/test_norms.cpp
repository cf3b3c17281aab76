#include "doctest.h"
#include "morreylab/errors.hpp"
#include "morreylab/norms.hpp"
#include "morreylab/rules.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace morreylab;

namespace {
const double pi = std::numbers::pi;

SearchOptions quick() {
    SearchOptions o;
    o.axis_points = 17;
    o.refinements = 1;
    o.audit_points = 8;
    return o;
}

GridFunction indicator(int n, double step = 1.0 / 32) {
    const int m = int(std::lround(3.0 / step)) + 1;
    return GridFunction::sample(
        [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s <= 1.0 ? 1.0 : 0.0;
        },
        std::vector<double>(n, -1.5), step, std::vector<int>(n, m));
}
} // namespace

TEST_CASE("radial closed forms") {
    const auto P = derive(3, 1.5, 2.5, std::nullopt, 0.3);
    const auto tri = triple_norm(make_field("radial-triple-ce", P), P, quick());
    const double sigma = 4 * pi;
    CHECK(tri.power_value == doctest::Approx(sigma * std::pow(0.3, 1.5) / (2.5 - 0.45 - 1.5)).epsilon(1e-4));
    CHECK(tri.witness_y[2] == 0.0);
    CHECK(tri.audit_passed);

    const auto mor = morrey_norm(make_field("radial-morrey-ce", P), P, quick());
    const double a = (2.5 - 1.5) / 1.5;
    CHECK(mor.power_value == doctest::Approx(sigma * std::pow(a, 1.5) / (3 - 2.5)).epsilon(1e-4));
    CHECK(*mor.witness_r <= 1.0 + 1e-9);
}

TEST_CASE("far candidates lose to the centre") {
    const auto P = derive(3, 1.5, 2.5, std::nullopt, 0.3);
    SearchOptions o = quick();
    o.extra_candidates = {{0.0, 0.0, 10.0}};
    const auto tri = triple_norm(make_field("radial-triple-ce", P), P, o);
    CHECK(tri.candidates.back().value < tri.power_value);
    CHECK(tri.witness_y[2] == 0.0);
}

TEST_CASE("Lebesgue partial sums") {
    const auto P = derive(3, 1.5, 2.5, std::nullopt, 0.3);
    const auto morrey_ce = make_field("radial-morrey-ce", P);
    const auto div = lq_partial_sums(morrey_ce, P.p2);
    CHECK(div.diverged);
    // deep shells of r^(-n): sigma ln 2 each
    for (std::size_t i = 30; i < div.trace.size(); ++i)
        CHECK(div.trace[i] == doctest::Approx(4 * pi * std::log(2.0)).epsilon(1e-5));
    CHECK(div.to_json()["value"] == "DIVERGED");

    const auto fin = lq_partial_sums(morrey_ce, 0.95 * P.p2);
    CHECK_FALSE(fin.diverged);
    // int_B1 (r^-a - 1)^q dx against a direct radial quadrature
    const double a = (2.5 - 1.5) / 1.5, q = 0.95 * P.p2;
    const double ref = 4 * pi * tanh_sinh([&](double r) { return std::pow(std::pow(r, -a) - 1, q) * r * r; },
                                          0.0, 1.0, 1e-12);
    CHECK(fin.power_value == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("fractal growth ratios") {
    SearchOptions o;
    o.generations = 13;
    const auto P = derive(2, 1.2, 1.5, std::nullopt, 1.5);
    const auto at = lq_partial_sums(make_field("fractal-ce", P), 1.0, o);
    CHECK(at.diverged);
    for (int l = 6; l <= 12; ++l) {
        CHECK(at.ratios[l - 1] >= 0.98);
        CHECK(at.ratios[l - 1] <= 1.02);
    }
    const auto P2 = derive(2, 1.2, 1.5, std::nullopt, 1.7);
    const auto above = lq_partial_sums(make_field("fractal-ce", P2), 1.0, o);
    CHECK(above.diverged);
    CHECK(above.ratios.back() > 1.05);
}

TEST_CASE("fractal partial sums against the stratified box engine") {
    SearchOptions o;
    o.generations = 6;
    const auto P = derive(2, 1.2, 1.5, std::nullopt, 0.5);
    const auto f = make_field("fractal-ce", P);
    const auto lq = lq_partial_sums(f, 1.0, o);
    CHECK_FALSE(lq.diverged);
    QuadratureOptions qo;
    qo.rel_tol = 1e-6;
    const auto ref = integrate_gap_stratified(f.value, 2, *f.cantor, std::nullopt, 6, 1.0, qo);
    for (int l = 1; l <= 6; ++l)
        CHECK(lq.trace[l - 1] == doctest::Approx(ref.per_generation[l - 1]).epsilon(1e-3));
}

TEST_CASE("Morrey norm never exceeds the triple norm") {
    const auto P = derive(3, 1.5, 2.5, std::nullopt, 0.3);
    for (const char* id : {"radial-triple-ce", "talenti"}) {
        const auto f = make_field(id, P);
        const auto t = triple_norm(f, P, quick());
        const auto m = morrey_norm(f, P, quick());
        CHECK(m.power_value <= t.power_value + t.error_estimate + m.error_estimate);
    }
    const auto zero = constant_field(3, 0.0, 1.0);
    CHECK(morrey_norm(zero, P, quick()).value == 0.0);
}

TEST_CASE("integer-lambda field on and off the axis") {
    const auto P = derive(3, 1.5, 2.0, std::nullopt, 0.2);
    const auto f = make_field("integer-ce", P);
    const double on[] = {0.0, 0.0, 0.1};
    const double off[] = {0.3, 0.0, 0.1};
    const double v_on = triple_integrand(f, P, on);
    CHECK(v_on > triple_integrand(f, P, off));
    // the integrand depends on |y'| only
    const double off2[] = {0.0, 0.3, 0.1};
    CHECK(triple_integrand(f, P, off2) == doctest::Approx(triple_integrand(f, P, off)).epsilon(1e-12));
    CHECK(morrey_ratio(f, P, on, 0.2) > 0.0);
    CHECK_THROWS_AS(morrey_ratio(f, P, off, 0.2), DimensionError);
}

TEST_CASE("budget") {
    const auto P = derive(3, 1.5, 2.5, std::nullopt, 0.3);
    SearchOptions o = quick();
    o.budget = 10;
    CHECK_THROWS_AS(triple_norm(make_field("radial-triple-ce", P), P, o), BudgetExceeded);
}

TEST_CASE("monotonicity scans") {
    const std::vector<double> path{0.0, 0.5, 1.0, 1.5, 3.0};
    const RadialIntegrand one{[](double) { return 1.0; }, 0.0, 1.0};
    const auto s = monotonicity_scan(3, 0.5, one, path);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].value <= s[i - 1].value + 2 * s[i].error);

    const double a = 0.3, p = 1.5;
    const RadialIntegrand h{[=](double r) { return std::pow(r, -a * p - p); }, -a * p - p, 1.0};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const double j0 = monotonicity_scan(3, 0.5, h, std::vector<double>{0.0})[0].value;
    for (int i = 0; i < 10; ++i) {
        const std::vector<double> y{u(rng)};
        CHECK(monotonicity_scan(3, 0.5, h, y)[0].value <= j0);
    }
    CHECK_THROWS_AS(monotonicity_scan(3, 0.0, one, path), DomainError);
}

TEST_CASE("maximal function and Riesz potential of the unit disc") {
    const auto f = indicator(2);
    const double x[] = {0.0, 0.0};
    const auto m0 = maximal_function(f, 0.0, x);
    CHECK(m0.value == doctest::Approx(pi).epsilon(1e-12));
    CHECK(maximal_function(f, 0.0, x, true).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m0.ratio <= 1.15);
    const auto m1 = maximal_function(f, 1.0, x);
    CHECK(m1.value <= pi * 1.02);
    CHECK(m1.upper >= pi);
    CHECK(maximal_function(f.scaled(3.0), 0.0, x).value == doctest::Approx(3 * m0.value).epsilon(1e-14));

    CHECK(riesz_potential(f, x) == doctest::Approx(2 * pi).epsilon(2e-3));
    const auto g = f.scaled(0.5);
    const double y[] = {0.3, -0.2};
    CHECK(riesz_potential(f.plus(g), y) ==
          doctest::Approx(riesz_potential(f, y) + riesz_potential(g, y)).epsilon(1e-12));

    const auto f3 = indicator(3, 1.0 / 12);
    const double x3[] = {0.0, 0.0, 0.0};
    CHECK(riesz_potential(f3, x3) == doctest::Approx(4 * pi).epsilon(1e-2));

    const auto zero = GridFunction::sample([](std::span<const double>) { return 0.0; }, {-1.0, -1.0}, 0.5, {5, 5});
    CHECK_THROWS_AS(riesz_potential(zero, x), EmptySupport);
}

TEST_CASE("Adams splitting") {
    const auto P = derive(2, 1.2, 1.5, std::nullopt, 0.1);
    const auto f = indicator(2);
    const double x[] = {0.0, 0.0};
    const auto r = check_adams_splitting(f, x, P);
    CHECK(r.holds);
    CHECK(r.slack >= 1.0);
    const auto r10 = check_adams_splitting(f.scaled(10.0), x, P);
    CHECK(r10.riesz == doctest::Approx(10 * r.riesz).epsilon(1e-10));
    CHECK(r10.slack == doctest::Approx(r.slack).epsilon(1e-10));
    CHECK(adams_annulus_constant(2, 1.25) ==
          doctest::Approx(std::pow(2.0, 0.75) / (1 - std::pow(2.0, -0.25))));
    CHECK_THROWS_AS(adams_annulus_constant(2, 0.9), DomainError);
}

TEST_CASE("rearrangement inequality") {
    const Step flat[] = {{1.0, 1.0}};
    const auto e = check_rearrangement_inequality(flat, 2.0);
    CHECK(e.lhs == doctest::Approx(1.0));
    CHECK(e.rhs == doctest::Approx(1.0));
    CHECK(e.holds);
    const Step two[] = {{1.0, 2.0}, {1.0, 1.0}};
    const auto t = check_rearrangement_inequality(two, 2.0);
    CHECK(t.lhs == doctest::Approx(5.0));
    CHECK(t.rhs == doctest::Approx(3 + 2 * std::sqrt(2.0)));
    CHECK(t.holds);
    const Step up[] = {{1.0, 1.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(check_rearrangement_inequality(up, 2.0), NotMonotone);
    CHECK_THROWS_AS(check_rearrangement_inequality(two, 1.0), DomainError);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    for (int i = 0; i < 100; ++i) {
        std::vector<Step> s(1 + i % 7);
        double v = 5.0;
        for (auto& st : s) {
            v *= u(rng) / 2.0;
            st = {u(rng), v};
        }
        for (double q : {1.5, 2.0, 3.0}) CHECK(check_rearrangement_inequality(s, q).holds);
    }
}

TEST_CASE("radial embedding") {
    const auto P = derive(3, 1.5, 2.5);
    const auto zero = constant_field(3, 0.0, 1.0);
    const auto z = check_radial_embedding(zero, P, 2.0, quick());
    CHECK(z.lq.value == 0.0);
    CHECK(z.morrey.value == 0.0);
    CHECK_FALSE(z.ratio);

    std::vector<double> ratios;
    for (double beta : {0.1, 0.25, 0.4, 0.55, 0.65}) {
        const auto Pb = derive(3, 1.5, 2.5, std::nullopt, beta);
        const auto f = radial_counterexample(Pb, RadialVariant::triple);
        const auto rep = check_radial_embedding(f, Pb, 0.95 * P.p2, quick());
        REQUIRE(rep.ratio);
        ratios.push_back(*rep.ratio);
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*hi / *lo < 20.0);
}

TEST_CASE("Adams chain on radial fields") {
    const auto P = derive(3, 1.5, 2.5, std::nullopt, 0.3);
    const auto rep = check_adams_chain(make_field("radial-triple-ce", P), 50, 0xC0FFEE);
    CHECK(rep.samples.size() == 50);
    CHECK(rep.max_ratio <= 1.0 + 1e-9);
    CHECK(rep.max_ratio > 0.1);
}

TEST_CASE("estimate serialization") {
    const auto P = derive(3, 1.5, 2.5, std::nullopt, 0.3);
    const auto tri = triple_norm(make_field("radial-triple-ce", P), P, quick());
    const auto j = tri.to_json();
    CHECK(j["kind"] == "triple");
    CHECK(j["value"].is_number());
    CHECK(j["witness"]["y"].size() == 3);
    CHECK(j["audit"]["passed"] == true);
    CHECK(j["evaluations"].get<std::int64_t>() > 0);
    CHECK(j.contains("tolerances"));
}

TEST_CASE("serial reference matches the parallel search") {
    const auto P = derive(3, 1.5, 2.5, std::nullopt, 0.3);
    const auto f = make_field("talenti", P);
    auto s = quick();
    s.policy = ExecPolicy::serial;
    auto p = quick();
    p.policy = ExecPolicy::parallel;
    const auto a = triple_norm(f, P, s), b = triple_norm(f, P, p);
    CHECK(a.power_value == b.power_value);
    CHECK(a.witness_y == b.witness_y);
    CHECK(a.to_json().dump() == b.to_json().dump());
    const auto ma = morrey_norm(f, P, s), mb = morrey_norm(f, P, p);
    CHECK(ma.power_value == mb.power_value);
    CHECK(ma.witness_r == mb.witness_r);
}
