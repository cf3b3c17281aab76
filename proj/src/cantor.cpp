#include "morreylab/cantor.hpp"

#include "morreylab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace morreylab {

CantorSet::CantorSet(double gamma) : CantorSet(GapFraction::from_gamma(gamma)) {}

CantorSet::CantorSet(GapFraction g) : gamma_(g) {
    if (!(g.complement > 0.0 && g.complement < 1.0))
        throw DomainError("gap fraction must lie in (0,1)");
    rho_ = 0.5 * g.complement;
    off_ = 0.5 - 0.5 * rho_;
    log_rho_ = std::log(g.complement) - std::log(2.0);
    s1_ = {rho_, -off_};
    s2_ = {rho_, off_};
}

double CantorSet::scale_pow(double e) const {
    if (e == 0.0) return 1.0;
    return std::exp(e * log_rho_);
}

double CantorSet::half_width(int l) const {
    return 0.5 * gamma_.value * scale_pow(l - 1);
}

GapInterval make_gap(const CantorSet& set, int l, std::uint64_t m) {
    GapInterval g;
    g.l = l;
    g.m = m;
    g.bits = m - 1;
    g.half_width = set.half_width(l);
    const double rho = set.scale_ratio();
    // (1 + gamma)/2 = 1 - rho
    const double step = 1.0 - rho;
    double sum = 0.0;
    double pw = 1.0;
    for (int j = 1; j <= l - 1; ++j) {
        if (g.coefficient(j)) sum += pw;
        pw *= rho;
    }
    g.center = -0.5 + 0.5 * set.scale_pow(l - 1) + step * sum;
    return g;
}

std::vector<GapInterval> enumerate_gaps(const CantorSet& set, int max_generation,
                                        std::uint64_t budget) {
    if (max_generation < 1) throw DomainError("max_generation must be at least 1");
    if (max_generation >= 63 || (std::uint64_t(1) << max_generation) > budget)
        throw CapacityError("2^" + std::to_string(max_generation) +
                            " gaps exceed the enumeration budget");
    std::vector<GapInterval> out;
    out.reserve((std::size_t(1) << max_generation) - 1);
    for (int l = 1; l <= max_generation; ++l)
        for (std::uint64_t m = 1; m <= (std::uint64_t(1) << (l - 1)); ++m)
            out.push_back(make_gap(set, l, m));
    return out;
}

double gap_measure_partial_sum(const CantorSet& set, int max_generation) {
    if (max_generation < 1) throw DomainError("max_generation must be at least 1");
    // 1 - (1 - gamma)^L
    return -std::expm1(max_generation * std::log(set.gap_fraction().complement));
}

Enclosure distance_1d(const CantorSet& set, double t, double tolerance) {
    if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
    const double half_gap = 0.5 * set.gamma();
    const double rho = set.scale_ratio();
    const double off = set.map_offset();
    double scale = 1.0;
    t = std::fabs(t);
    for (int depth = 0; depth < 60; ++depth) {
        if (t >= 0.5) {
            const double d = scale * (t - 0.5);
            return {d, d};
        }
        if (t <= half_gap) {
            const double d = scale * (half_gap - t);
            return {d, d};
        }
        if (scale * 0.5 <= tolerance) break;
        // t lies in S2([-1/2,1/2]); pull back and fold by symmetry.
        t = std::fabs((t - off) / rho);
        scale *= rho;
    }
    return {0.0, scale * std::max(0.0, 0.5 - t)};
}

Enclosure distance_embedded(const CantorSet& set, std::span<const double> x,
                            double tolerance) {
    if (x.size() < 2) throw DimensionError("embedded distance needs k >= 2");
    double r2 = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) r2 += x[i] * x[i];
    const Enclosure e = distance_1d(set, x.back(), tolerance);
    return {std::sqrt(r2 + e.lower * e.lower), std::sqrt(r2 + e.upper * e.upper)};
}

namespace {

std::vector<std::pair<double, double>> oracle_intervals(const CantorSet& set, int depth, int depth_limit) {
    if (depth < 0) throw DomainError("depth must be non-negative");
    if (depth > depth_limit)
        throw CapacityError("oracle depth " + std::to_string(depth) + " exceeds limit");
    // Explicit interval removal, independent of the gap-center formula.
    const double keep = set.scale_ratio();
    std::vector<std::pair<double, double>> cur{{-0.5, 0.5}}, next;
    for (int l = 0; l < depth; ++l) {
        next.clear();
        next.reserve(cur.size() * 2);
        for (auto [a, b] : cur) {
            const double len = (b - a) * keep;
            next.emplace_back(a, a + len);
            next.emplace_back(b - len, b);
        }
        cur.swap(next);
    }
    return cur;
}

double oracle_scan(const std::vector<std::pair<double, double>>& cur, double t) {
    double best = std::numeric_limits<double>::infinity();
    for (auto [a, b] : cur) {
        if (t >= a && t <= b)
            best = std::min(best, std::min(t - a, b - t));
        else
            best = std::min(best, t < a ? a - t : t - b);
    }
    return best;
}

} // namespace

double brute_force_distance_oracle(const CantorSet& set, double t, int depth,
                                   int depth_limit) {
    return oracle_scan(oracle_intervals(set, depth, depth_limit), t);
}

std::vector<double> brute_force_distance_oracle(const CantorSet& set, std::span<const double> ts,
                                                int depth, int depth_limit) {
    const auto cur = oracle_intervals(set, depth, depth_limit);
    std::vector<double> out(ts.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(ts.size()); ++i) out[i] = oracle_scan(cur, ts[i]);
    return out;
}

} // namespace morreylab
