#pragma once
#include "morreylab/cantor.hpp"
#include "morreylab/fields.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace morreylab {

enum class ExecPolicy { serial, parallel };

inline constexpr std::int64_t default_budget = 10'000'000;

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::int64_t evaluations = 0;
    double tail_bound = 0.0;
    bool budget_exceeded = false;
    std::string tail_label; // "calibrated" whenever tail_bound comes from fitted constants
};

struct SingularWeight {
    std::vector<double> center;
    double exponent = 0.0; // lambda - n
};

struct PointHint {
    std::vector<double> at;
    double power = 0.0; // integrand ~ |x - at|^power
};

struct Box {
    std::vector<double> lo, hi;
    int dim() const { return int(lo.size()); }
    double volume() const;
};

struct CellTrace {
    std::vector<double> lo, hi;
    double value, error;
};

struct QuadratureOptions {
    double rel_tol = 1e-6;
    double abs_tol = 0.0;
    std::int64_t budget = default_budget;
    int order = 8;
    ExecPolicy policy = ExecPolicy::serial;
    std::vector<PointHint> hints;
    // When set, skip adaptivity and use 2^uniform_level cells per axis.
    std::optional<int> uniform_level;
    std::vector<CellTrace>* trace = nullptr;
};

// Writes "lo_0,...,hi_0,...,value,error" rows.
void write_trace_csv(const std::vector<CellTrace>& trace, std::ostream& out);

QuadratureResult integrate_box(const PointFn& f, const Box& box,
                               const std::optional<SingularWeight>& weight,
                               const QuadratureOptions& opt = {});

// Integral over the ball B_radius(center) through spherical coordinates.
QuadratureResult integrate_ball(const PointFn& f, std::span<const double> center, double radius,
                                const std::optional<SingularWeight>& weight,
                                const QuadratureOptions& opt = {});

// g(r, x'') with r = |x'|, x' in R^(n-1); returns (r, x''...) -> sigma_{n-2} r^(n-2) g.
using CylindricalProfile = std::function<double(double, std::span<const double>)>;
PointFn reduce_cylindrical(CylindricalProfile g, int n);

double transverse_factor_bound(std::span<const double> x_prime, std::span<const double> y_prime,
                               int n, int k, double lambda, double C = 1.0);

// Tail envelope l (rho^(theta (l-1)) + rho^(l-1)) of the per-generation contributions.
struct TailEnvelope {
    double rho;
    double theta;
    double at(int l) const;
    double sum_after(int L) const; // sum over l > L, closed form
};

struct StratifiedResult : QuadratureResult {
    std::vector<double> per_generation; // index l-1
    double tail_constant = 0.0;         // C = 2 max_l contribution_l / envelope_l
    double tail_estimate = 0.0;         // (A + B l) x^l fitted to the last two generations
};

// Fills tail_bound / tail_constant / tail_estimate from per_generation.
void attach_tail(StratifiedResult& r, const TailEnvelope& env);

// Sum over gaps G_{l,m}, l <= L, of the integral over B^(n-1)_{1/4} x G_{l,m} of f.
// The x' ball is handled as a box for n = 2 and through the cylindrical reduction
// (f must then depend on x' only through |x'|) for n > 2.
StratifiedResult integrate_gap_stratified(const PointFn& f, int n, const CantorSet& cantor,
                                          const std::optional<SingularWeight>& weight,
                                          int max_generation, double envelope_theta,
                                          const QuadratureOptions& opt = {});

} // namespace morreylab
