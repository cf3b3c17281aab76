#pragma once
#include "morreylab/cantor.hpp"
#include "morreylab/fields.hpp"
#include "morreylab/quadrature.hpp"
#include "morreylab/rules.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

namespace morreylab {

// Integrals of g(dist(x, {0} x C_gamma)) over R^n, where g vanishes for d >= 1/4.
// The region splits into gap strips B^(n-1)_(1/4) x G_(l,m) and the two caps |x_n| > 1/2.
struct EngineOptions {
    int generations = 12;
    // A piece of length l is expanded when the weight center is eta * l / 2 away.
    double eta = 6.0;
    // Ball boundaries: the excursion of S = |x'|^2 over a piece must stay below S / eta_ball.
    double eta_ball = 30.0;
    // Per-generation envelope exponent; the tail is attached only when set.
    std::optional<double> tail_theta;
};

struct FractalIntegral : StratifiedResult {
    double caps = 0.0;
    double estimate() const { return value + tail_estimate; }
};

class FractalEngine {
public:
    // g_power: g(d) ~ d^g_power as d -> 0.
    FractalEngine(const CantorSet& set, int n, ProfileFn g, double g_power,
                  EngineOptions opt = {});
    ~FractalEngine();
    FractalEngine(FractalEngine&&) noexcept;

    int dim() const { return n_; }
    int generations() const { return L_; }
    const CantorSet& cantor() const { return set_; }

    // Integral of g over one gap strip of generation l.
    double gap_total(int l) const;
    double caps_total() const { return caps_; }

    // per_generation[l-1] = 2^(l-1) gap_total(l).
    FractalIntegral plain() const;
    // Integral of g(d) |x - y|^exponent. Off-axis y needs n = 2.
    FractalIntegral weighted(std::span<const double> y, double exponent) const;
    // Integral of g over B_radius(y) for y on the axis {0} x R.
    FractalIntegral ball(std::span<const double> y, double radius) const;

private:
    struct AxisNode {
        double x;  // signed x_1 for n = 2 off-axis rules, r = |x'| otherwise
        double w;  // includes the x' measure
    };
    using Moments = std::array<double, 4>; // tau^0, tau^2, tau^4, tau^6

    std::vector<AxisNode> axis_rule(std::optional<double> focus) const;
    Moments gap_moments(int l, double r) const;
    // F_l(r) ~ r^axis_power() times the x' measure as r -> 0.
    double axis_power() const;
    double half_width(int l) const { return a_[l]; }

    struct WeightCtx;
    void walk(const WeightCtx& ctx, int j, double c, std::vector<double>& acc) const;
    void far_piece(const WeightCtx& ctx, int j, double c, int lmax,
                   std::vector<double>& acc) const;
    double near_direct(const WeightCtx& ctx, double e, int s, double a) const;

    struct BallTables;
    const BallTables& tables() const;
    void ball_walk(double yn, double R, int j, double c, std::vector<double>& acc) const;
    double ball_halfgap(double e, int s, double a, double yn, double R) const;

    CantorSet set_;
    int n_;
    ProfileFn g_;
    double g_power_;
    EngineOptions opt_;
    int L_;
    std::vector<double> a_;                  // a_[l], l = 1..L
    std::vector<Moments> base_;              // base_[g]: sums of centre^(2K), generation g
    std::vector<AxisNode> std_rule_;
    std::vector<std::vector<Moments>> std_f_; // std_f_[l][node]
    std::vector<double> gap_total_;
    double caps_ = 0.0;
    mutable std::unique_ptr<BallTables> tables_;
    mutable std::unique_ptr<std::once_flag> tables_once_;
};

// Measure of the directions on S^(n-1) whose cosine with a fixed axis lies in [lo, hi],
// 0 <= lo <= hi <= 1.
double cone_measure(int n, double lo, double hi);

} // namespace morreylab
