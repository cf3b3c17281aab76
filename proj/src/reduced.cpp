#include "morreylab/reduced.hpp"

#include "morreylab/errors.hpp"
#include "morreylab/fractal_engine.hpp"
#include "morreylab/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace morreylab {

namespace {

constexpr double pi = std::numbers::pi;

void count(std::int64_t* evaluations, std::size_t k) {
    if (evaluations) *evaluations += std::int64_t(k);
}

// Integral over S^(m-1) of (|r w - b e|^2 + D2)^(e/2).
double sphere_mean(int m, double r, double b, double D2, double e) {
    const double rb = r * b;
    if (rb == 0.0) return sphere_area(m - 1) * std::pow(r * r + b * b + D2, 0.5 * e);
    const double M = (r - b) * (r - b) + D2;
    if (m == 1) return std::pow(M, 0.5 * e) + std::pow(M + 4.0 * rb, 0.5 * e);
    if (m == 3) {
        // 2 pi / (2 r b) * int_M^(M + 4rb) u^(e/2) du
        const double k = 0.5 * e + 1.0;
        if (M == 0.0) return k > 0.0 ? pi / rb * std::pow(4.0 * rb, k) / k : inf;
        const double x = 4.0 * rb / M;
        if (k == 0.0) return pi / rb * std::log1p(x);
        return pi / rb * std::pow(M, k) * std::expm1(k * std::log1p(x)) / k;
    }
    const double scale = 0.5 * std::sqrt(M / rb);
    std::vector<Focus> foci;
    if (scale < 1.0) foci.push_back({0.0, std::max(scale, 1e-14)});
    const Rule rule = graded_rule(0.0, pi, foci);
    double s = 0.0;
    for (const Node& nd : rule) {
        const double sh = std::sin(0.5 * nd.x);
        double v = std::pow(M + 4.0 * rb * sh * sh, 0.5 * e);
        if (m > 2) v *= std::pow(std::sin(nd.x), m - 2);
        s += nd.w * v;
    }
    return sphere_area(m - 2) * s;
}

} // namespace

double sphere_mean_power(int n, double rho, double s, double e) {
    if (n < 1) throw DimensionError("sphere_mean_power needs n >= 1");
    return sphere_mean(n, rho, s, 0.0, e);
}

double cap_measure(int n, double c) {
    if (c >= 1.0) return 0.0;
    const double all = sphere_area(n - 1);
    if (c <= -1.0) return all;
    if (n == 1) return c < 0.0 ? 2.0 : 1.0;
    return c >= 0.0 ? cone_measure(n, c, 1.0) : all - cone_measure(n, -c, 1.0);
}

double radial_weighted(const RadialIntegrand& f, int n, double s, double e,
                       std::int64_t* evaluations) {
    const double top = f.outer;
    const double p0 = f.power + n - 1 + (s == 0.0 ? e : 0.0);
    if (!(p0 > -1.0)) throw NonIntegrableHint("radial integrand is not integrable at the origin");
    std::vector<Focus> foci{{0.0, 1e-10 * (s > 0.0 ? std::min(s, top) : top), p0}};
    std::vector<double> br;
    if (s > 0.0 && s < top) {
        foci.push_back({s, 1e-9 * s});
        br.push_back(s);
    }
    const Rule rule = graded_rule(0.0, top, foci, br);
    count(evaluations, rule.size());
    KahanSum acc;
    for (const Node& nd : rule) {
        const double h = f.h(nd.x);
        if (h == 0.0) continue;
        acc.add(nd.w * h * std::pow(nd.x, n - 1) * sphere_mean(n, nd.x, s, 0.0, e));
    }
    return acc.value();
}

double radial_ball(const RadialIntegrand& f, int n, double s, double R,
                   std::int64_t* evaluations) {
    if (!(R > 0.0)) throw DomainError("ball radius must be positive");
    const double lo = std::max(0.0, s - R);
    const double hi = std::min(f.outer, s + R);
    if (!(hi > lo)) return 0.0;
    const double p0 = f.power + n - 1;
    std::vector<Focus> foci;
    std::vector<double> br;
    if (lo == 0.0) {
        if (!(p0 > -1.0)) throw NonIntegrableHint("radial integrand is not integrable at the origin");
        foci.push_back({0.0, 1e-10 * hi, p0});
    } else {
        foci.push_back({lo, 1e-9 * lo});
    }
    if (s + R <= f.outer) foci.push_back({hi, 1e-9 * hi});
    if (s > 0.0 && R > s && R - s < hi) {
        foci.push_back({R - s, 1e-9 * (R - s)});
        br.push_back(R - s);
    }
    const Rule rule = graded_rule(lo, hi, foci, br);
    count(evaluations, rule.size());
    const double all = sphere_area(n - 1);
    KahanSum acc;
    for (const Node& nd : rule) {
        const double rho = nd.x;
        const double h = f.h(rho);
        if (h == 0.0) continue;
        const double cap = s == 0.0 ? all : cap_measure(n, (rho * rho + s * s - R * R) / (2.0 * rho * s));
        acc.add(nd.w * h * std::pow(rho, n - 1) * cap);
    }
    return acc.value();
}

std::vector<double> radial_shells(const RadialIntegrand& f, int n, int count_) {
    std::vector<double> out;
    const double all = sphere_area(n - 1);
    for (int k = 0; k < count_; ++k) {
        const double b = std::ldexp(f.outer, -k), a = 0.5 * b;
        Rule rule;
        for (int c = 0; c < 4; ++c) append_gauss(rule, a + c * (b - a) / 4, a + (c + 1) * (b - a) / 4, 16);
        KahanSum acc;
        for (const Node& nd : rule) acc.add(nd.w * f.h(nd.x) * std::pow(nd.x, n - 1));
        out.push_back(all * acc.value());
    }
    return out;
}

namespace {

std::vector<double> z_breaks(const AxialIntegrand& f, double lo, double hi, std::vector<double> extra) {
    std::vector<double> br;
    for (double b : f.z_breaks) {
        extra.push_back(b);
        extra.push_back(-b);
    }
    for (double b : extra)
        if (b > lo && b < hi) br.push_back(b);
    return br;
}

} // namespace

double axial_weighted(const AxialIntegrand& f, int n, double b, double t, double e,
                      std::int64_t* evaluations) {
    const int m = n - 1;
    const double Z = f.z_support, Rs = f.r_support;
    const double pr = m - 1 + f.power;
    if (!(pr > -1.0)) throw NonIntegrableHint("axial integrand is not integrable at the axis");

    std::vector<Focus> zf;
    if (t > -Z && t < Z) {
        const double pz = m + f.power + e;
        if (b == 0.0 && pz < 0.0)
            zf.push_back({t, 1e-12, pz});
        else
            zf.push_back({t, 1e-12});
    }
    const Rule outer = graded_rule(-Z, Z, zf, z_breaks(f, -Z, Z, {t}));
    std::int64_t evals = 0;
    KahanSum acc;
    for (const Node& zn : outer) {
        const double D = zn.x - t, z = std::fabs(zn.x), D2 = D * D;
        std::vector<Focus> rf{{0.0, 1e-10 * std::min(Rs, b > 0.0 ? b : std::max(std::fabs(D), 1e-300)), pr}};
        std::vector<double> br;
        if (b > 0.0 && b < Rs) {
            rf.push_back({b, std::max(0.5 * std::fabs(D), 1e-12 * b)});
            br.push_back(b);
        }
        const Rule inner = graded_rule(0.0, Rs, rf, br);
        evals += std::int64_t(inner.size());
        double s = 0.0;
        for (const Node& rn : inner) {
            const double g = f.g(rn.x, z);
            if (g == 0.0) continue;
            s += rn.w * g * std::pow(rn.x, m - 1) * sphere_mean(m, rn.x, b, D2, e);
        }
        acc.add(zn.w * s);
    }
    count(evaluations, evals);
    return acc.value();
}

double axial_ball(const AxialIntegrand& f, int n, double t, double R, std::int64_t* evaluations) {
    if (!(R > 0.0)) throw DomainError("ball radius must be positive");
    const int m = n - 1;
    const double Z = f.z_support, Rs = f.r_support;
    const double pr = m - 1 + f.power;
    if (!(pr > -1.0)) throw NonIntegrableHint("axial integrand is not integrable at the axis");
    const double lo = std::max(-Z, t - R), hi = std::min(Z, t + R);
    if (!(hi > lo)) return 0.0;

    std::vector<double> extra{t};
    if (R > Rs) {
        const double w = std::sqrt(R * R - Rs * Rs);
        extra.push_back(t - w);
        extra.push_back(t + w);
    }
    std::vector<Focus> zf;
    for (double edge : {t - R, t + R})
        if (edge > -Z && edge < Z) zf.push_back({edge, 1e-9 * R, 0.5 * (pr + 1.0)});
    const Rule outer = graded_rule(lo, hi, zf, z_breaks(f, lo, hi, extra));
    const double sph = sphere_area(m - 1);
    std::int64_t evals = 0;
    KahanSum acc;
    for (const Node& zn : outer) {
        const double D = zn.x - t, z = std::fabs(zn.x);
        const double u = std::min(Rs, std::sqrt(std::max(0.0, R * R - D * D)));
        if (!(u > 0.0)) continue;
        const Rule inner = graded_rule(0.0, u, std::vector<Focus>{{0.0, 1e-10 * u, pr}});
        evals += std::int64_t(inner.size());
        double s = 0.0;
        for (const Node& rn : inner) s += rn.w * f.g(rn.x, z) * std::pow(rn.x, m - 1);
        acc.add(zn.w * sph * s);
    }
    count(evaluations, evals);
    return acc.value();
}

} // namespace morreylab
