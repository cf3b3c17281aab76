#pragma once
#include "morreylab/cantor.hpp"
#include "morreylab/params.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>

namespace morreylab {

inline constexpr double inf = std::numeric_limits<double>::infinity();

enum class Singularity { none, origin, axis, fractal };

const char* to_string(Singularity s);

using PointFn = std::function<double(std::span<const double>)>;
using ProfileFn = std::function<double(double)>;

// Field of the form u(x) = v(|x|).
struct RadialShape {
    ProfileFn value;
    ProfileFn slope; // |v'|
    double support = 1.0;
};

// Field depending on r = |x'| (first `split` coordinates) and z = |x''| (the rest).
struct AxialShape {
    int split = 0;
    std::function<double(double, double)> value;
    std::function<double(double, double)> grad;
    double r_support = 0.5;
    double z_support = 0.0;
    double z_flat = 0.0; // the field is independent of z for z < z_flat
};

// Field depending only on the distance d to the embedded Cantor set {0} x C_gamma.
struct FractalShape {
    ProfileFn value; // phi(d)
    ProfileFn slope; // |phi'(d)|
    double dist_support = 0.25;
    int k = 0;
};

struct ScalarField {
    std::string name;
    int dim = 0;
    PointFn value;
    PointFn grad_norm;
    double support_radius = inf;
    Singularity singularity = Singularity::none;
    // Local blow-up power of |grad u| near the singular set (|grad u| ~ dist^power).
    double grad_power = 0.0;
    // Same for u itself (u ~ dist^value_power); 0 when u stays bounded.
    double value_power = 0.0;

    std::shared_ptr<const RadialShape> radial;
    std::shared_ptr<const AxialShape> axial;
    std::shared_ptr<const FractalShape> fractal;
    std::shared_ptr<const CantorSet> cantor;

    double evaluate(std::span<const double> x) const;
    double gradient_magnitude(std::span<const double> x) const;
};

namespace cutoff {
inline constexpr double inner = 0.5;
double outer();
double xi(double s);
double xi_slope(double s); // |xi'(s)|
} // namespace cutoff

ScalarField counterexample_integer(const MorreyParams& params);
ScalarField counterexample_fractal(const MorreyParams& params, const CantorSet& cantor);
ScalarField counterexample_fractal(const MorreyParams& params);

enum class RadialVariant { morrey, triple };
ScalarField radial_counterexample(const MorreyParams& params, RadialVariant variant);

// One-dimensional profile v(s); evaluated at s = |x_0|.
ScalarField talenti_extremal(const MorreyParams& params, double c1, double c2);
// The radial field u(x) = (c1 + c2 |x|^((n+p-lambda)/(p-1)))^((p-lambda)/(n+p-lambda)) on R^n.
ScalarField talenti_radial(const MorreyParams& params, double c1, double c2);

ScalarField power_transform(const ScalarField& field, double b);
ScalarField constant_field(int dim, double c, double support_radius = inf);

// Registry names: integer-ce, fractal-ce, radial-morrey-ce, radial-triple-ce, talenti.
ScalarField make_field(const std::string& id, const MorreyParams& params);

} // namespace morreylab
