#include "morreylab/fractal_engine.hpp"

#include "morreylab/errors.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

namespace morreylab {

namespace {

constexpr double support = 0.25;
constexpr double support_sq = 1.0 / 16.0;
constexpr double split_r = 0.2;  // axis rules switch to v = sqrt(1/16 - r^2) above this
constexpr double split_v = 0.15; // sqrt(1/16 - 0.2^2)

double binom(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Taylor coefficients in z of (X^2 + (T + z)^2)^beta up to z^6.
std::array<double, 7> weight_taylor(double X2, double T, double beta) {
    std::array<double, 7> p{};
    const double q0 = X2 + T * T, q1 = 2.0 * T;
    p[0] = std::pow(q0, beta);
    for (int k = 1; k <= 6; ++k) {
        double s = (beta + 1.0 - k) * q1 * p[k - 1];
        if (k >= 2) s += (2.0 * (beta + 1.0) - k) * p[k - 2];
        p[k] = s / (k * q0);
    }
    return p;
}

double x_measure(int n, double r) {
    return n == 2 ? 2.0 : sphere_area(n - 2) * std::pow(r, n - 2);
}

} // namespace

double cone_measure(int n, double lo, double hi) {
    lo = std::clamp(lo, 0.0, 1.0);
    hi = std::clamp(hi, 0.0, 1.0);
    if (!(hi > lo)) return 0.0;
    if (n == 2) return 2.0 * (std::asin(hi) - std::asin(lo));
    if (n == 3) return 2.0 * std::numbers::pi * (hi - lo);
    const double m = 0.5 * (n - 3);
    const double part = boost::math::beta(0.5, m + 1.0, hi * hi) -
                        boost::math::beta(0.5, m + 1.0, lo * lo);
    return sphere_area(n - 2) * 0.5 * part;
}

struct FractalEngine::WeightCtx {
    double y1 = 0.0;
    double yn = 0.0;
    bool on_axis = true;
    double exponent = 0.0;
    double dx = 0.0;
    const std::vector<AxisNode>* nodes = nullptr;
    const std::vector<std::vector<Moments>>* f = nullptr; // [l][node]
    std::vector<double> x2;                               // |x' - y'|^2 per node
    mutable std::int64_t evals = 0;
};

struct FractalEngine::BallTables {
    struct Table {
        bool valid = false;
        double s_top = 0.0;
        double x0 = 0.0, step = 0.0;
        double slope0 = 0.0; // d ln(Phi0) / d ln S at the left end
        std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> ln_phi0, ln_phi2,
            ln_cum0;

        struct Values {
            double cum0, phi0, phi2, dphi0, dphi2;
        };
        Values at(double S) const;
    };
    std::vector<Table> gen; // gen[l]
};

FractalEngine::BallTables::Table::Values FractalEngine::BallTables::Table::at(double S) const {
    const double x = std::log(S);
    Values v{};
    if (x < x0) {
        // power law below the table
        const double p0 = std::exp((*ln_phi0)(x0) + slope0 * (x - x0));
        const double s2 = ln_phi2->prime(x0);
        const double p2 = std::exp((*ln_phi2)(x0) + s2 * (x - x0));
        v.phi0 = p0;
        v.phi2 = p2;
        v.dphi0 = p0 * slope0 / S;
        v.dphi2 = p2 * s2 / S;
        v.cum0 = p0 * S / (slope0 + 1.0);
        return v;
    }
    v.phi0 = std::exp((*ln_phi0)(x));
    v.phi2 = std::exp((*ln_phi2)(x));
    v.dphi0 = v.phi0 * ln_phi0->prime(x) / S;
    v.dphi2 = v.phi2 * ln_phi2->prime(x) / S;
    v.cum0 = std::exp((*ln_cum0)(x));
    return v;
}

FractalEngine::~FractalEngine() = default;
FractalEngine::FractalEngine(FractalEngine&&) noexcept = default;

FractalEngine::FractalEngine(const CantorSet& set, int n, ProfileFn g, double g_power,
                             EngineOptions opt)
    : set_(set), n_(n), g_(std::move(g)), g_power_(g_power), opt_(opt), L_(opt.generations) {
    if (n < 2) throw DimensionError("fractal engine needs n >= 2");
    if (L_ < 1 || L_ > 40) throw DomainError("generations must lie in [1, 40]");
    if (!(g_power > -double(n))) throw NonIntegrableHint("g is not integrable near the set");
    if (!(opt.eta > 2.0) || !(opt.eta_ball > 2.0)) throw ConfigError("eta must exceed 2");

    a_.assign(L_ + 1, 0.0);
    for (int l = 1; l <= L_; ++l) a_[l] = set_.half_width(l);

    const double rho = set_.scale_ratio(), off = set_.map_offset();
    base_.assign(L_ + 1, Moments{});
    base_[1] = {1.0, 0.0, 0.0, 0.0};
    for (int gg = 1; gg < L_; ++gg)
        for (int K = 0; K < 4; ++K) {
            double s = 0.0;
            for (int i = 0; i <= K; ++i)
                s += binom(2 * K, 2 * i) * std::pow(rho, 2 * i) * std::pow(off, 2 * K - 2 * i) *
                     base_[gg][i];
            base_[gg + 1][K] = 2.0 * s;
        }

    std_rule_ = axis_rule(std::nullopt);
    for (auto& nd : std_rule_) nd.w *= x_measure(n_, nd.x);
    std_f_.assign(L_ + 1, std::vector<Moments>(std_rule_.size()));
    const int count = int(std_rule_.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < count; ++i)
        for (int l = 1; l <= L_; ++l) std_f_[l][i] = gap_moments(l, std_rule_[i].x);

    const double p0 = g_power_ + n_ - 1;
    gap_total_.assign(L_ + 1, 0.0);
    for (int l = 1; l <= L_; ++l) {
        const double a = a_[l];
        std::vector<Focus> foci{{0.0, 1e-6 * std::min(a, support), p0}};
        std::vector<double> br;
        if (a < support) {
            foci.push_back({a, 1e-7 * a});
            br.push_back(a);
        }
        const Rule rule = graded_rule(0.0, support, foci, br);
        gap_total_[l] = 2.0 * integrate_rule(rule, [&](double d) {
            return g_(d) * std::pow(d, n_ - 1) * cone_measure(n_, 0.0, a >= d ? 1.0 : a / d);
        });
    }
    const Rule cap_rule = graded_rule(0.0, support, std::vector<Focus>{{0.0, 1e-8, p0}});
    caps_ = 2.0 * integrate_rule(cap_rule, [&](double d) {
        return g_(d) * std::pow(d, n_ - 1) * cone_measure(n_, 0.0, 1.0);
    });

    tables_once_ = std::make_unique<std::once_flag>();
}

std::vector<FractalEngine::AxisNode> FractalEngine::axis_rule(std::optional<double> focus) const {
    std::vector<AxisNode> out;
    std::vector<Focus> foci{{0.0, 1e-12 * a_[L_], axis_power()}};
    std::vector<double> br;
    for (int l = 1; l <= L_; ++l) {
        const double a = a_[l];
        if (a > split_v && a < support) br.push_back(std::sqrt(support_sq - a * a));
    }
    const double fscale = 0.25 * a_[L_];
    if (focus && *focus > 0.0 && *focus < split_r) foci.push_back({*focus, fscale});
    for (const Node& nd : graded_rule(0.0, split_r, foci, br)) out.push_back({nd.x, nd.w});

    std::vector<Focus> vfoci;
    std::vector<double> vbr;
    for (int l = 1; l <= L_; ++l)
        if (a_[l] < split_v) vbr.push_back(a_[l]);
    if (focus && *focus >= split_r && *focus < support)
        vfoci.push_back({std::sqrt(support_sq - *focus * *focus), fscale});
    for (const Node& nd : graded_rule(0.0, split_v, vfoci, vbr, 8, 2)) {
        const double r = std::sqrt(support_sq - nd.x * nd.x);
        out.push_back({r, nd.w * nd.x / r});
    }
    return out;
}

double FractalEngine::axis_power() const {
    return (g_power_ < -1.0 ? 1.0 + g_power_ : 0.0) + (n_ - 2);
}

FractalEngine::Moments FractalEngine::gap_moments(int l, double r) const {
    Moments m{};
    const double a = a_[l];
    const double top = std::sqrt(std::max(0.0, support_sq - r * r));
    const double U = std::min(a, top);
    if (!(U > 0.0)) return m;
    const std::vector<Focus> foci{{0.0, 0.5 * r}};
    for (const Node& nd : graded_rule(0.0, U, foci)) {
        const double v = nd.w * g_(std::hypot(r, nd.x));
        const double t2 = (a - nd.x) * (a - nd.x);
        m[0] += v;
        m[1] += v * t2;
        m[2] += v * t2 * t2;
        m[3] += v * t2 * t2 * t2;
    }
    for (double& x : m) x *= 2.0;
    return m;
}

double FractalEngine::gap_total(int l) const {
    if (l < 1 || l > L_) throw DomainError("generation outside the engine range");
    return gap_total_[l];
}

namespace {
void finish(FractalIntegral& res, std::span<const double> acc, double caps,
            const std::optional<double>& theta, double rho) {
    res.per_generation.assign(acc.begin() + 1, acc.end());
    KahanSum s;
    for (double v : res.per_generation) s.add(v);
    s.add(caps);
    res.caps = caps;
    res.value = s.value();
    if (theta) attach_tail(res, TailEnvelope{rho, *theta});
}
} // namespace

FractalIntegral FractalEngine::plain() const {
    std::vector<double> acc(L_ + 1, 0.0);
    for (int l = 1; l <= L_; ++l) acc[l] = std::ldexp(gap_total_[l], l - 1);
    FractalIntegral res;
    finish(res, acc, caps_, opt_.tail_theta, set_.scale_ratio());
    return res;
}

// ---- weighted integrals ----------------------------------------------------

FractalIntegral FractalEngine::weighted(std::span<const double> y, double exponent) const {
    if (int(y.size()) != n_) throw DimensionError("weight center has the wrong dimension");
    if (!(exponent > -double(n_))) throw NonIntegrableHint("weight exponent must exceed -n");
    WeightCtx ctx;
    ctx.exponent = exponent;
    ctx.yn = y[n_ - 1];
    double yp2 = 0.0;
    for (int i = 0; i + 1 < n_; ++i) yp2 += y[i] * y[i];
    ctx.on_axis = yp2 == 0.0;
    if (!ctx.on_axis && n_ != 2)
        throw DimensionError("off-axis weighted fractal integrals need n = 2");

    std::vector<AxisNode> nodes;
    std::vector<std::vector<Moments>> f;
    if (ctx.on_axis) {
        ctx.nodes = &std_rule_;
        ctx.f = &std_f_;
        for (const auto& nd : std_rule_) ctx.x2.push_back(nd.x * nd.x);
    } else {
        ctx.y1 = y[0];
        ctx.dx = std::max(0.0, std::fabs(ctx.y1) - support);
        for (int side = -1; side <= 1; side += 2)
            for (const auto& nd : axis_rule(side * ctx.y1)) nodes.push_back({side * nd.x, nd.w});
        f.assign(L_ + 1, std::vector<Moments>(nodes.size()));
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (int l = 1; l <= L_; ++l) f[l][i] = gap_moments(l, std::fabs(nodes[i].x));
        ctx.nodes = &nodes;
        ctx.f = &f;
        for (const auto& nd : nodes) ctx.x2.push_back((nd.x - ctx.y1) * (nd.x - ctx.y1));
    }

    std::vector<double> acc(L_ + 1, 0.0);
    walk(ctx, 0, 0.0, acc);
    const double caps = near_direct(ctx, -0.5, -1, inf) + near_direct(ctx, 0.5, 1, inf);
    FractalIntegral res;
    finish(res, acc, caps, opt_.tail_theta, set_.scale_ratio());
    res.evaluations = ctx.evals;
    return res;
}

void FractalEngine::walk(const WeightCtx& ctx, int j, double c, std::vector<double>& acc) const {
    if (j >= L_) return;
    const double ell = set_.scale_pow(j);
    const double R = std::hypot(ctx.dx, c - ctx.yn);
    if (R >= opt_.eta * 0.5 * ell) {
        far_piece(ctx, j, c, L_, acc);
        return;
    }
    const double a = a_[j + 1];
    if (R >= opt_.eta * a)
        far_piece(ctx, j, c, j + 1, acc);
    else
        acc[j + 1] += near_direct(ctx, c - a, 1, a) + near_direct(ctx, c + a, -1, a);
    const double step = set_.map_offset() * ell;
    walk(ctx, j + 1, c - step, acc);
    walk(ctx, j + 1, c + step, acc);
}

// Gaps of generations j+1..lmax inside the depth-j piece centred at c, with the weight
// expanded in the offset from c. lmax = j+1 keeps only the top gap.
void FractalEngine::far_piece(const WeightCtx& ctx, int j, double c, int lmax,
                              std::vector<double>& acc) const {
    const auto& nodes = *ctx.nodes;
    const auto& f = *ctx.f;
    const std::size_t count = nodes.size();
    const double T = c - ctx.yn;
    const double beta = 0.5 * ctx.exponent;
    std::vector<std::array<double, 4>> w(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto p = weight_taylor(ctx.x2[i], T, beta);
        for (int K = 0; K < 4; ++K) w[i][K] = nodes[i].w * p[2 * K];
    }
    ctx.evals += std::int64_t(count);
    const double rho = set_.scale_ratio();
    for (int l = j + 1; l <= lmax; ++l) {
        double coef[4][4] = {};
        const Moments& M = base_[l - j];
        for (int K = 0; K < 4; ++K)
            for (int i = 0; i <= K; ++i)
                coef[K][i] = binom(2 * K, 2 * i) * std::pow(rho, double(j) * (2 * K - 2 * i)) *
                             M[K - i];
        KahanSum s;
        for (std::size_t i = 0; i < count; ++i) {
            const Moments& F = f[l][i];
            double v = 0.0;
            for (int K = 0; K < 4; ++K) {
                double inner = 0.0;
                for (int ii = 0; ii <= K; ++ii) inner += coef[K][ii] * F[ii];
                v += w[i][K] * inner;
            }
            s.add(v);
        }
        acc[l] += s.value();
    }
}

// Half gap {e + s u : 0 <= u <= a} x B^(n-1)_(1/4) in polar coordinates around (0, e).
double FractalEngine::near_direct(const WeightCtx& ctx, double e, int s, double a) const {
    const double Y1 = ctx.on_axis ? 0.0 : ctx.y1;
    const double Y2 = s * (ctx.yn - e);
    const double dy = std::hypot(Y1, Y2);
    const double psi_y = std::atan2(Y1, Y2);
    const double beta = 0.5 * ctx.exponent;
    const double top = std::min(a, support);

    std::vector<Focus> foci;
    std::vector<double> br;
    if (dy == 0.0) {
        foci.push_back({0.0, 1e-6 * top, g_power_ + n_ - 1 + ctx.exponent});
    } else {
        foci.push_back({0.0, 1e-6 * std::min(top, dy), g_power_ + n_ - 1});
        if (dy < support) foci.push_back({dy, 1e-7 * dy});
    }
    if (a < support) {
        foci.push_back({a, 1e-7 * a});
        br.push_back(a);
    }
    const Rule outer = graded_rule(0.0, support, foci, br);
    const double sph = n_ > 2 ? sphere_area(n_ - 2) : 1.0;
    const double half_pi = 0.5 * std::numbers::pi;

    KahanSum total;
    std::int64_t evals = 0;
    for (const Node& od : outer) {
        const double d = od.x;
        const double gd = g_(d);
        if (gd == 0.0) continue;
        const double psi_m = d <= a ? 0.0 : std::acos(a / d);
        const double fs = std::max(0.5 * std::fabs(d - dy) / std::max(d, dy), 1e-12);
        const std::vector<Focus> pf{{psi_y, fs}};
        auto dist_pow = [&](double psi) {
            const double sh = std::sin(0.5 * (psi - psi_y));
            const double r2 = (d - dy) * (d - dy) + 4.0 * d * dy * sh * sh;
            return std::pow(r2, beta);
        };
        double inner = 0.0;
        if (n_ == 2) {
            for (int side = -1; side <= 1; side += 2) {
                const double lo = side < 0 ? -half_pi : psi_m;
                const double hi = side < 0 ? -psi_m : half_pi;
                const Rule ir = graded_rule(lo, hi, pf);
                for (const Node& nd : ir) inner += nd.w * dist_pow(nd.x);
                evals += std::int64_t(ir.size());
            }
            inner *= d;
        } else {
            const Rule ir = graded_rule(psi_m, half_pi, pf);
            for (const Node& nd : ir) inner += nd.w * dist_pow(nd.x) * std::pow(std::sin(nd.x), n_ - 2);
            evals += std::int64_t(ir.size());
            inner *= sph * std::pow(d, n_ - 1);
        }
        total.add(od.w * gd * inner);
    }
    ctx.evals += evals;
    return total.value();
}

// ---- balls centred on the axis ----------------------------------------------

const FractalEngine::BallTables& FractalEngine::tables() const {
    std::call_once(*tables_once_, [this] {
        auto tb = std::make_unique<BallTables>();
        tb->gen.resize(L_ + 1);
        const double step = std::log(4.0) / 32.0;
        for (int l = 1; l <= L_; ++l) {
            auto& t = tb->gen[l];
            const double a = a_[l];
            t.s_top = support_sq - a * a;
            if (!(t.s_top > 0.0)) continue;
            const double xmin = 1e-3 * a;
            t.x0 = std::log(xmin * xmin);
            const int npts = int(std::ceil((std::log(t.s_top) - t.x0) / step)) + 1;
            t.step = (std::log(t.s_top) - t.x0) / (npts - 1);
            std::vector<double> p0(npts), p2(npts);
#pragma omp parallel for schedule(dynamic, 16)
            for (int i = 0; i < npts; ++i) {
                const double S = std::exp(t.x0 + i * t.step);
                const double r = std::sqrt(S);
                const Moments F = gap_moments(l, r);
                const double m = x_measure(n_, r) / (2.0 * r);
                p0[i] = std::log(m * F[0]);
                p2[i] = std::log(m * F[1]);
            }
            using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
            t.ln_phi0 = std::make_unique<Spline>(p0.data(), p0.size(), t.x0, t.step);
            t.ln_phi2 = std::make_unique<Spline>(p2.data(), p2.size(), t.x0, t.step);
            t.slope0 = t.ln_phi0->prime(t.x0);
            if (!(t.slope0 > -1.0)) continue;
            std::vector<double> cum(npts);
            const std::vector<Focus> f0{{0.0, 1e-12 * xmin, axis_power()}};
            double c = 0.0;
            for (const Node& nd : graded_rule(0.0, xmin, f0))
                c += nd.w * x_measure(n_, nd.x) * gap_moments(l, nd.x)[0];
            cum[0] = std::log(c);
            const auto gl = gauss_legendre(8);
            for (int i = 0; i + 1 < npts; ++i) {
                const double xa = t.x0 + i * t.step, h = 0.5 * t.step;
                double s = 0.0;
                for (const Node& nd : gl) {
                    const double x = xa + h * (1.0 + nd.x);
                    s += h * nd.w * std::exp((*t.ln_phi0)(x) + x);
                }
                c += s;
                cum[i + 1] = std::log(c);
            }
            t.ln_cum0 = std::make_unique<Spline>(cum.data(), cum.size(), t.x0, t.step);
            t.valid = true;
        }
        tables_ = std::move(tb);
    });
    return *tables_;
}

FractalIntegral FractalEngine::ball(std::span<const double> y, double radius) const {
    if (int(y.size()) != n_) throw DimensionError("ball center has the wrong dimension");
    for (int i = 0; i + 1 < n_; ++i)
        if (y[i] != 0.0) throw DimensionError("fractal ball integrals need an on-axis center");
    if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
    const double yn = y[n_ - 1];
    std::vector<double> acc(L_ + 1, 0.0);
    ball_walk(yn, radius, 0, 0.0, acc);
    const double caps = ball_halfgap(-0.5, -1, inf, yn, radius) +
                        ball_halfgap(0.5, 1, inf, yn, radius);
    FractalIntegral res;
    finish(res, acc, caps, opt_.tail_theta, set_.scale_ratio());
    return res;
}

void FractalEngine::ball_walk(double yn, double R, int j, double c, std::vector<double>& acc) const {
    if (j >= L_) return;
    const double ell = set_.scale_pow(j);
    const double D = c - yn;
    const double R2 = R * R;
    auto s_range = [&](double half) {
        const double dmin = std::max(0.0, std::fabs(D) - half);
        const double dmax = std::fabs(D) + half;
        return std::pair{R2 - dmax * dmax, R2 - dmin * dmin};
    };
    const auto [smin, smax] = s_range(0.5 * ell);
    if (smax <= 0.0) return;
    if (smin >= support_sq) {
        for (int l = j + 1; l <= L_; ++l) acc[l] += std::ldexp(gap_total_[l], l - j - 1);
        return;
    }
    // S(c + z) = S0 + S1 z - z^2 bounds the x' radius inside the ball.
    const double S0 = R2 - D * D, S1 = -2.0 * D;
    const auto& tb = tables();
    const double eta = opt_.eta_ball;
    // The S excursion over a piece has a linear part |S1| h and a quadratic part h^2;
    // the dropped terms are fourth order in the first and second order in the second.
    auto expandable = [&](double h, int lmin, int lmax) {
        for (int l = lmin; l <= lmax; ++l)
            if (!tb.gen[l].valid) return false;
        const double lin = std::fabs(S1) * h, quad = h * h;
        return S0 > 0.0 && lin * eta <= S0 && quad * eta * eta <= S0 &&
               (lin + quad) * eta <= tb.gen[lmin].s_top - S0;
    };
    const double rho2j = set_.scale_pow(2.0 * j);
    if (expandable(0.5 * ell, j + 1, L_)) {
        for (int l = j + 1; l <= L_; ++l) {
            const auto v = tb.gen[l].at(S0);
            const double N = std::ldexp(1.0, l - j - 1);
            const double m2 = rho2j * base_[l - j][1];
            acc[l] += N * v.cum0 - (m2 * v.phi0 + N * v.phi2) +
                      0.5 * S1 * S1 * (m2 * v.dphi0 + N * v.dphi2);
        }
        return;
    }
    const double a = a_[j + 1];
    const auto [gmin, gmax] = s_range(a);
    if (gmax <= 0.0) {
        // gap misses the ball
    } else if (gmin >= support_sq) {
        acc[j + 1] += gap_total_[j + 1];
    } else if (expandable(a, j + 1, j + 1)) {
        const auto v = tb.gen[j + 1].at(S0);
        acc[j + 1] += v.cum0 - v.phi2 + 0.5 * S1 * S1 * v.dphi2;
    } else {
        acc[j + 1] += ball_halfgap(c - a, 1, a, yn, R) + ball_halfgap(c + a, -1, a, yn, R);
    }
    const double step = set_.map_offset() * ell;
    ball_walk(yn, R, j + 1, c - step, acc);
    ball_walk(yn, R, j + 1, c + step, acc);
}

// Exact angular measure of the half gap inside the ball, integrated over d.
double FractalEngine::ball_halfgap(double e, int s, double a, double yn, double R) const {
    const double D = e - yn;
    const double sD = s * D;
    const double R2 = R * R, D2 = D * D;
    std::vector<double> pts;
    if (a < support) pts.push_back(a);
    if (R2 > D2) pts.push_back(std::sqrt(R2 - D2));
    for (double b : {-sD - R, -sD + R})
        if (b > 0.0) pts.push_back(b);
    if (std::isfinite(a) && R2 - D2 - 2.0 * sD * a > 0.0)
        pts.push_back(std::sqrt(R2 - D2 - 2.0 * sD * a));
    std::vector<Focus> foci;
    std::vector<double> br;
    for (double b : pts)
        if (b > 0.0 && b < support) {
            foci.push_back({b, 1e-7 * b});
            br.push_back(b);
        }
    if (std::fabs(D) < R)
        foci.push_back({0.0, 1e-6 * std::min({a, R - std::fabs(D), support}), g_power_ + n_ - 1});
    auto meas = [&](double d) {
        const double hi0 = a >= d ? 1.0 : a / d;
        const double Q = (R2 - d * d - D2) / (2.0 * d);
        double lo = 0.0, hi = hi0;
        if (sD > 0.0)
            hi = std::min(hi, Q / sD);
        else if (sD < 0.0)
            lo = std::max(lo, Q / sD);
        else if (!(Q > 0.0))
            return 0.0;
        return cone_measure(n_, lo, hi);
    };
    const Rule rule = graded_rule(0.0, support, foci, br);
    return integrate_rule(rule, [&](double d) {
        const double m = meas(d);
        return m == 0.0 ? 0.0 : g_(d) * std::pow(d, n_ - 1) * m;
    });
}

} // namespace morreylab
