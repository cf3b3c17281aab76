#pragma once
#include "morreylab/fields.hpp"
#include "morreylab/params.hpp"
#include "morreylab/quadrature.hpp"
#include "morreylab/reduced.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace morreylab {

enum class NormKind { lebesgue, morrey, triple };
const char* to_string(NormKind k);

struct Candidate {
    std::vector<double> y;
    double value = 0.0;             // integral-level quantity (norm^p)
    std::optional<double> radius;   // Morrey maximiser
};

struct NormEstimate {
    NormKind kind = NormKind::lebesgue;
    std::string field;
    bool diverged = false;
    double value = 0.0;          // the norm; meaningless when diverged
    double power_value = 0.0;    // value^p (or value^q)
    double exponent = 1.0;       // p or q
    double error_estimate = 0.0; // on power_value
    std::vector<double> witness_y;
    std::optional<double> witness_r;
    // lebesgue: per-generation or per-shell contributions; otherwise candidate values in
    // evaluation order.
    std::vector<double> trace;
    std::vector<double> ratios; // lebesgue only
    std::vector<Candidate> candidates;
    std::vector<Candidate> audit;
    bool audit_passed = true;
    double rel_tol = 1e-6;
    std::int64_t evaluations = 0;
    std::string tail_label;

    nlohmann::ordered_json to_json() const;
};

struct SearchOptions {
    int axis_points = 65;
    int refinements = 2;
    int refine_points = 9;
    int audit_points = 32;
    std::uint64_t seed = 0xC0FFEE;
    int generations = 12;
    double rel_tol = 1e-6;
    // Per integral; exceeding it throws BudgetExceeded.
    std::int64_t budget = default_budget;
    ExecPolicy policy = ExecPolicy::parallel;
    // Evaluated in addition to the axis search; may lie outside the closed unit ball.
    std::vector<std::vector<double>> extra_candidates;
    int radius_scan = 25;
    double r_min = 1e-4;
    double r_max = 2.0;
};

inline constexpr double ratio_epsilon = 0.02;
inline constexpr int ratio_window = 5;

// Contributions of Cantor generations (fractal fields) or dyadic shells (radial and
// axial fields) to the integral of |u|^q over the unit ball.
NormEstimate lq_partial_sums(const ScalarField& field, double q, const SearchOptions& opt = {});

// Integral of |grad u|^p |x - y|^(lambda - n) over the unit ball.
double triple_integrand(const ScalarField& field, const MorreyParams& params,
                        std::span<const double> y, const SearchOptions& opt = {});
NormEstimate triple_norm(const ScalarField& field, const MorreyParams& params,
                         const SearchOptions& opt = {});

// r^(lambda - n) times the integral of |grad u|^p over B_r(y) in the unit ball.
double morrey_ratio(const ScalarField& field, const MorreyParams& params,
                    std::span<const double> y, double r, const SearchOptions& opt = {});
NormEstimate morrey_norm(const ScalarField& field, const MorreyParams& params,
                         const SearchOptions& opt = {});

struct ScanPoint {
    double y1;
    double value;
    double error;
};
// J(y1) = integral of h(|z|) |z - y1 e_1|^(-theta) over |z| < h.outer.
std::vector<ScanPoint> monotonicity_scan(int n, double theta, const RadialIntegrand& h,
                                         std::span<const double> y_path, double rel_tol = 1e-9);

// Samples on a uniform grid with multilinear interpolation, zero outside the grid.
class GridFunction {
public:
    GridFunction(std::vector<double> lo, double step, std::vector<int> counts,
                 std::vector<double> values);
    static GridFunction sample(const PointFn& f, std::vector<double> lo, double step,
                               std::vector<int> counts);

    int dim() const { return int(lo_.size()); }
    double step() const { return step_; }
    double operator()(std::span<const double> x) const;
    GridFunction scaled(double c) const;
    GridFunction plus(const GridFunction& other) const;
    // Largest distance from x to a grid cell touching a non-zero sample; throws
    // EmptySupport when every sample vanishes.
    double reach(std::span<const double> x) const;
    double support_diameter() const;

private:
    std::vector<double> lo_;
    double step_;
    std::vector<int> counts_;
    std::vector<double> values_;
};

struct MaximalResult {
    double value = 0.0;  // max over the radius grid
    double upper = 0.0;  // value * ratio^(n - beta), bounds the true sup
    double radius = 0.0; // maximiser
    double ratio = 0.0;  // consecutive radii
};

// sup_r r^(beta - n) integral over B_r(x) of |f|; normalized divides by |B_1|.
MaximalResult maximal_function(const GridFunction& f, double beta, std::span<const double> x,
                               bool normalized = false);
// Integral of f(y) |y - x|^(1 - n), optionally restricted to |y - x| < cutoff.
double riesz_potential(const GridFunction& f, std::span<const double> x,
                       std::optional<double> cutoff = std::nullopt);

struct AdamsReport {
    double riesz = 0.0;
    double m0 = 0.0;
    double m_beta = 0.0;
    double delta = 0.0;
    double near = 0.0, far = 0.0;
    double near_bound = 0.0, far_bound = 0.0;
    double slack = 0.0; // (near_bound + far_bound) / riesz
    bool holds = false;
    nlohmann::ordered_json to_json() const;
};
double adams_annulus_constant(int n, double beta);
AdamsReport check_adams_splitting(const GridFunction& f, std::span<const double> x,
                                  const MorreyParams& params);

struct Step {
    double length;
    double value;
};
struct RearrangementReport {
    double lhs = 0.0, rhs = 0.0;
    bool holds = false;
};
RearrangementReport check_rearrangement_inequality(std::span<const Step> phi, double q);

struct EmbeddingReport {
    NormEstimate lq;
    NormEstimate morrey;
    std::optional<double> ratio; // lq / morrey when both are finite and morrey > 0
};
EmbeddingReport check_radial_embedding(const ScalarField& field, const MorreyParams& params,
                                       double q, const SearchOptions& opt = {});

struct AdamsChainReport {
    double max_ratio = 0.0; // max |u(x)| / (I_1 |grad u|(x) / sigma_(n-1))
    std::vector<std::pair<double, double>> samples; // (|u(x)|, bound)
};
// |u(x)| <= I_1 |grad u|(x) / sigma_(n-1) at `count` random points of the unit ball.
AdamsChainReport check_adams_chain(const ScalarField& field, int count, std::uint64_t seed);

} // namespace morreylab
