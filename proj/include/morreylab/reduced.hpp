#pragma once
#include "morreylab/fields.hpp"

#include <cstdint>
#include <vector>

namespace morreylab {

// A radial profile h(|x|) with h(rho) ~ rho^power as rho -> 0, restricted to |x| < outer.
struct RadialIntegrand {
    ProfileFn h;
    double power = 0.0;
    double outer = 1.0;
};

// Integral over the unit sphere S^(n-1) of |rho w - s e|^e dw for a unit vector e.
double sphere_mean_power(int n, double rho, double s, double e);

// Measure of {w in S^(n-1) : w . e > c}.
double cap_measure(int n, double c);

// Integral of h(|x|) |x - y|^e over |x| < outer, |y| = s.
double radial_weighted(const RadialIntegrand& f, int n, double s, double e,
                       std::int64_t* evaluations = nullptr);
// Integral of h(|x|) over B_R(y) intersected with |x| < outer, |y| = s.
double radial_ball(const RadialIntegrand& f, int n, double s, double R,
                   std::int64_t* evaluations = nullptr);
// Integrals of h over the shells outer 2^-(k+1) < |x| < outer 2^-k, k = 0..count-1.
std::vector<double> radial_shells(const RadialIntegrand& f, int n, int count);

// G(r, z) with r = |x'| in R^(n-1) and z = x_n; singular along the x_n axis like r^power.
struct AxialIntegrand {
    std::function<double(double, double)> g; // even in z
    double power = 0.0;
    double r_support = 0.5;
    double z_support = 1.0;
    std::vector<double> z_breaks; // kinks in z, positive values
};

// Integral of G |x - y|^e for y = (y', t) with |y'| = b.
double axial_weighted(const AxialIntegrand& f, int n, double b, double t, double e,
                      std::int64_t* evaluations = nullptr);
// Integral of G over B_R((0, t)).
double axial_ball(const AxialIntegrand& f, int n, double t, double R,
                  std::int64_t* evaluations = nullptr);

} // namespace morreylab
