#pragma once
#include "morreylab/params.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace morreylab {

struct Affine {
    double slope = 1;
    double offset = 0;
    double operator()(double t) const { return slope * t + offset; }
};

struct Enclosure {
    double lower = 0;
    double upper = 0;
    double mid() const { return 0.5 * (lower + upper); }
    double width() const { return upper - lower; }
};

// C_gamma in [-1/2, 1/2]: remove the middle gamma fraction, repeat on both halves.
class CantorSet {
public:
    explicit CantorSet(double gamma);
    explicit CantorSet(GapFraction gamma);

    double gamma() const { return gamma_.value; }
    const GapFraction& gap_fraction() const { return gamma_; }
    double scale_ratio() const { return rho_; }
    // (1 + gamma)/4, written as 1/2 - rho/2 so it stays accurate for gamma near 1.
    double map_offset() const { return off_; }
    double log_scale_ratio() const { return log_rho_; }
    // rho^e evaluated in the log domain.
    double scale_pow(double e) const;
    double half_width(int l) const;
    const Affine& s1() const { return s1_; }
    const Affine& s2() const { return s2_; }

private:
    GapFraction gamma_;
    double rho_, off_, log_rho_;
    Affine s1_, s2_;
};

struct GapInterval {
    int l = 1;
    std::uint64_t m = 1;
    double center = 0;
    double half_width = 0;
    std::uint64_t bits = 0; // c_1 is the most significant of the l-1 bits

    int coefficient(int j) const { return int((bits >> (l - 1 - j)) & 1u); }
    double lo() const { return center - half_width; }
    double hi() const { return center + half_width; }
};

inline constexpr std::uint64_t default_gap_budget = std::uint64_t(1) << 22;
inline constexpr int default_oracle_depth_limit = 24;

GapInterval make_gap(const CantorSet& set, int l, std::uint64_t m);
std::vector<GapInterval> enumerate_gaps(const CantorSet& set, int max_generation,
                                        std::uint64_t budget = default_gap_budget);
double gap_measure_partial_sum(const CantorSet& set, int max_generation);

Enclosure distance_1d(const CantorSet& set, double t, double tolerance = 1e-14);
// x = (x', x_k); x' collects all but the last coordinate.
Enclosure distance_embedded(const CantorSet& set, std::span<const double> x,
                            double tolerance = 1e-14);
double brute_force_distance_oracle(const CantorSet& set, double t, int depth,
                                   int depth_limit = default_oracle_depth_limit);
// Same oracle for many points; the interval list is built once.
std::vector<double> brute_force_distance_oracle(const CantorSet& set, std::span<const double> ts,
                                                int depth,
                                                int depth_limit = default_oracle_depth_limit);

} // namespace morreylab
