#include "morreylab/rules.hpp"

#include "morreylab/errors.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

namespace morreylab {

namespace {
template <int N>
std::vector<Node> build_gauss() {
    using G = boost::math::quadrature::gauss<double, N>;
    std::vector<Node> out;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            out.push_back({0.0, w[i]});
        } else {
            out.push_back({-x[i], w[i]});
            out.push_back({x[i], w[i]});
        }
    }
    std::sort(out.begin(), out.end(), [](const Node& a, const Node& b) { return a.x < b.x; });
    return out;
}
} // namespace

std::span<const Node> gauss_legendre(int order) {
    static const std::vector<Node> g4 = build_gauss<4>();
    static const std::vector<Node> g8 = build_gauss<8>();
    static const std::vector<Node> g16 = build_gauss<16>();
    switch (order) {
    case 4: return g4;
    case 8: return g8;
    case 16: return g16;
    default: throw DomainError("unsupported Gauss order " + std::to_string(order));
    }
}

void append_gauss(Rule& rule, double a, double b, int order) {
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (const Node& n : gauss_legendre(order)) rule.push_back({c + h * n.x, h * n.w});
}

Rule graded_rule(double a, double b, std::span<const Focus> foci, std::span<const double> breaks,
                 int order, int min_cells) {
    Rule rule;
    if (!(b > a)) return rule;
    std::vector<double> pts{a, b};
    for (int i = 1; i < min_cells; ++i) pts.push_back(a + (b - a) * i / min_cells);
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    for (const Focus& f : foci) {
        const double s = std::max(f.scale, 1e-300);
        if (f.at > a && f.at < b) pts.push_back(f.at);
        for (int side = -1; side <= 1; side += 2) {
            double h = s;
            for (int j = 0; j < 1100; ++j, h *= 2.0) {
                const double x = f.at + side * h;
                if (side < 0 ? x <= a : x >= b) break;
                if (x > a && x < b) pts.push_back(x);
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    rule.reserve((pts.size() - 1) * order);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double x0 = pts[i], x1 = pts[i + 1];
        bool done = false;
        for (const Focus& f : foci) {
            if (!std::isfinite(f.power) || x1 - x0 > f.scale * (1.0 + 1e-12)) continue;
            if (x0 == f.at) {
                rule.push_back({x1, (x1 - x0) / (f.power + 1.0)});
                done = true;
            } else if (x1 == f.at) {
                rule.push_back({x0, (x1 - x0) / (f.power + 1.0)});
                done = true;
            }
            if (done) break;
        }
        if (!done) append_gauss(rule, x0, x1, order);
    }
    return rule;
}

double integrate_rule(const Rule& rule, const std::function<double(double)>& f) {
    KahanSum s;
    for (const Node& n : rule) s.add(n.w * f(n.x));
    return s.value();
}

void KahanSum::add(double x) {
    const double t = s_ + x;
    if (std::fabs(s_) >= std::fabs(x))
        c_ += (s_ - t) + x;
    else
        c_ += (x - t) + s_;
    s_ = t;
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol,
                 std::int64_t* evaluations) {
    if (!(b > a)) return 0.0;
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
    std::int64_t count = 0;
    auto g = [&](double x) {
        ++count;
        const double v = f(x);
        return std::isfinite(v) ? v : 0.0;
    };
    double err = 0.0;
    const double v = integrator.integrate(g, a, b, tol, &err);
    if (evaluations) *evaluations += count;
    return v;
}

double sphere_area(int m) {
    // 2 pi^((m+1)/2) / Gamma((m+1)/2)
    const double h = 0.5 * (m + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

} // namespace morreylab
