#include "doctest.h"
#include "morreylab/errors.hpp"
#include "morreylab/params.hpp"

#include <cmath>
#include <random>

using namespace morreylab;

TEST_CASE("derive: n=3 p=2 lambda=2.5") {
    const MorreyParams m = derive(3, 2.0, 2.5);
    CHECK(m.p1 == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(m.p2 == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(m.k == 3);
    CHECK(m.gamma().value == 0.5);
    CHECK(m.gamma().complement == 0.5);
}

TEST_CASE("derive: lambda = n is rejected") {
    CHECK_THROWS_AS(derive(2, 1.5, 2.0), OrderingViolation);
    CHECK_THROWS_AS(derive(3, 2.5, 2.0), OrderingViolation);
    CHECK_THROWS_AS(derive(3, 1.0, 2.0), OrderingViolation);
    CHECK_NOTHROW(derive(3, 1.0, 2.0, {}, {}, ParamMode::radial));
    CHECK_THROWS_AS(derive(3, 0.9, 2.0, {}, {}, ParamMode::radial), OrderingViolation);
    CHECK_THROWS_AS(derive(1, 1.2, 1.5), OrderingViolation);
}

TEST_CASE("derive: alpha window is half open") {
    CHECK_THROWS_AS(derive(3, 2.0, 2.5, 12.0, 0.25), AlphaRangeViolation);
    CHECK_NOTHROW(derive(3, 2.0, 2.5, 12.0, 0.21));
    CHECK_THROWS_AS(derive(3, 2.0, 2.5, 12.0, 0.2), AlphaRangeViolation); // 2.5/12 > 0.2
    CHECK_NOTHROW(derive(3, 2.0, 2.5, 12.0, 2.5 / 12.0));
}

TEST_CASE("gamma is undefined for integer lambda") {
    const MorreyParams m = derive(3, 1.5, 2.0);
    CHECK(m.lambda_integer);
    CHECK_THROWS_AS(m.gamma(), IntegerLambdaGamma);
}

TEST_CASE("hausdorff_dimension examples") {
    CHECK(hausdorff_dimension(1.0 / 3.0) == doctest::Approx(0.6309297536).epsilon(1e-10));
    CHECK(hausdorff_dimension(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(hausdorff_dimension(1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(hausdorff_dimension(0.0), DomainError);
    CHECK_THROWS_AS(hausdorff_dimension(1.0), DomainError);
    CHECK_THROWS_AS(hausdorff_dimension(-0.2), DomainError);
}

TEST_CASE("dimension round trip for random lambda") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k : {2, 3, 4}) {
        for (int i = 0; i < 100; ++i) {
            double lam = k - 1 + u(rng);
            if (lam <= k - 1 || lam >= k) continue;
            const MorreyParams m = derive(k + 1, 1.0 + 0.5 * (lam - 1.0), lam);
            CHECK(m.k == k);
            CHECK(std::fabs(hausdorff_dimension(m.gamma()) - (k - lam)) < 1e-12);
        }
    }
}

TEST_CASE("p1 < p2 and p1 increasing in p") {
    for (double lam : {1.3, 1.7, 2.0, 2.6}) {
        double prev = 0.0;
        for (double p = 1.01; p < lam; p += 0.02) {
            const MorreyParams m = derive(3, p, lam);
            CHECK(m.p1 < m.p2);
            CHECK(m.p1 > prev);
            prev = m.p1;
        }
    }
}

TEST_CASE("parse_config") {
    const MorreyParams m = parse_config("# demo\nn = 2\np=1.2\nlambda: 1.5\nalpha = 0.2\nq = 8\n");
    CHECK(m.n == 2);
    CHECK(m.lambda == 1.5);
    CHECK(*m.alpha == 0.2);
    CHECK(m.mode == ParamMode::general);
    const MorreyParams r = parse_config("n=3\np=1\nlambda=2\nmode=radial\n");
    CHECK(r.mode == ParamMode::radial);
    CHECK_THROWS_AS(parse_config("n=3\np=2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n=3\np=2\nlambda=x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n=3\np=2\nlambda=2.5\ncolour=red\n"), ConfigError);
}
