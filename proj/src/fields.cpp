#include "morreylab/fields.hpp"

#include "morreylab/errors.hpp"

#include <cmath>

namespace morreylab {

const char* to_string(Singularity s) {
    switch (s) {
    case Singularity::none: return "none";
    case Singularity::origin: return "origin";
    case Singularity::axis: return "axis";
    case Singularity::fractal: return "fractal";
    }
    return "none";
}

double ScalarField::evaluate(std::span<const double> x) const {
    if (int(x.size()) != dim) throw DimensionError(name + ": point has wrong dimension");
    return value(x);
}

double ScalarField::gradient_magnitude(std::span<const double> x) const {
    if (int(x.size()) != dim) throw DimensionError(name + ": point has wrong dimension");
    return grad_norm(x);
}

namespace cutoff {
double outer() { return std::sqrt(3.0) / 3.0; }

double xi(double s) {
    if (s < inner) return 1.0;
    const double w = outer() - inner;
    if (s >= outer()) return 0.0;
    const double t = (s - inner) / w;
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

double xi_slope(double s) {
    const double w = outer() - inner;
    if (s < inner || s >= outer()) return 0.0;
    const double t = (s - inner) / w;
    return 6.0 * t * (1.0 - t) / w;
}
} // namespace cutoff

namespace {

double norm_range(std::span<const double> x, std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

double require_alpha(const MorreyParams& p) {
    if (!p.alpha) throw ConfigError("this field needs alpha");
    return *p.alpha;
}

ScalarField radial_field(std::string name, int dim, ProfileFn v, ProfileFn dv, double support) {
    auto shape = std::make_shared<RadialShape>(RadialShape{v, dv, support});
    ScalarField f;
    f.name = std::move(name);
    f.dim = dim;
    f.support_radius = support;
    f.radial = shape;
    f.value = [shape](std::span<const double> x) {
        const double r = norm_range(x, 0, x.size());
        return r >= shape->support ? 0.0 : shape->value(r);
    };
    f.grad_norm = [shape](std::span<const double> x) {
        const double r = norm_range(x, 0, x.size());
        return r >= shape->support ? 0.0 : shape->slope(r);
    };
    return f;
}

} // namespace

ScalarField counterexample_integer(const MorreyParams& params) {
    if (!params.lambda_integer)
        throw NonIntegerLambda("counterexample_integer needs an integer lambda");
    const double a = require_alpha(params);
    const int split = int(params.lambda);
    const double cut = std::pow(2.0, a);

    auto shape = std::make_shared<AxialShape>();
    shape->split = split;
    shape->r_support = 0.5;
    shape->z_support = cutoff::outer();
    shape->z_flat = cutoff::inner;
    shape->value = [a, cut](double r, double z) {
        if (r >= 0.5 || z >= cutoff::outer()) return 0.0;
        if (r <= 1e-300) return inf;
        return (std::pow(r, -a) - cut) * cutoff::xi(z);
    };
    shape->grad = [a, cut](double r, double z) {
        if (r >= 0.5 || z >= cutoff::outer()) return 0.0;
        if (r <= 1e-300) return inf;
        const double gr = a * std::pow(r, -a - 1.0) * cutoff::xi(z);
        const double gz = (std::pow(r, -a) - cut) * cutoff::xi_slope(z);
        return std::hypot(gr, gz);
    };

    ScalarField f;
    f.name = "integer-ce";
    f.dim = params.n;
    f.support_radius = std::sqrt(0.25 + 1.0 / 3.0);
    f.singularity = Singularity::axis;
    f.grad_power = -a - 1.0;
    f.value_power = -a;
    f.axial = shape;
    f.value = [shape, split](std::span<const double> x) {
        return shape->value(norm_range(x, 0, split), norm_range(x, split, x.size()));
    };
    f.grad_norm = [shape, split](std::span<const double> x) {
        return shape->grad(norm_range(x, 0, split), norm_range(x, split, x.size()));
    };
    return f;
}

ScalarField counterexample_fractal(const MorreyParams& params, const CantorSet& cantor) {
    if (params.lambda_integer)
        throw IntegerLambda("counterexample_fractal needs a non-integer lambda");
    const double a = require_alpha(params);
    const int k = params.k;
    const int n = params.n;
    const double cut = std::pow(4.0, a);

    auto shape = std::make_shared<FractalShape>();
    shape->k = k;
    shape->dist_support = 0.25;
    shape->value = [a, cut](double d) {
        if (d >= 0.25) return 0.0;
        if (d <= 1e-300) return inf;
        return std::pow(d, -a) - cut;
    };
    shape->slope = [a](double d) {
        if (d >= 0.25) return 0.0;
        if (d <= 1e-300) return inf;
        return a * std::pow(d, -a - 1.0);
    };
    auto set = std::make_shared<CantorSet>(cantor);

    ScalarField f;
    f.name = "fractal-ce";
    f.dim = n;
    f.support_radius = k == n ? 0.75 : 1.0;
    f.singularity = Singularity::fractal;
    f.grad_power = -a - 1.0;
    f.value_power = -a;
    f.fractal = shape;
    f.cantor = set;
    f.value = [shape, set, k](std::span<const double> x) {
        const double d = distance_embedded(*set, x.first(k)).mid();
        double v = shape->value(d);
        if (k < int(x.size()) && v != 0.0) v *= cutoff::xi(norm_range(x, k, x.size()));
        return v;
    };
    f.grad_norm = [shape, set, k](std::span<const double> x) {
        const double d = distance_embedded(*set, x.first(k)).mid();
        if (k == int(x.size())) return shape->slope(d);
        const double z = norm_range(x, k, x.size());
        const double v = shape->value(d);
        if (v == 0.0) return 0.0;
        return std::hypot(shape->slope(d) * cutoff::xi(z), v * cutoff::xi_slope(z));
    };
    return f;
}

ScalarField counterexample_fractal(const MorreyParams& params) {
    if (params.lambda_integer)
        throw IntegerLambda("counterexample_fractal needs a non-integer lambda");
    return counterexample_fractal(params, CantorSet(params.gamma()));
}

ScalarField radial_counterexample(const MorreyParams& params, RadialVariant variant) {
    const double top = (params.lambda - params.p) / params.p;
    double a = top;
    if (variant == RadialVariant::triple) {
        a = require_alpha(params);
        const double lo = params.q ? params.n / *params.q : 0.0;
        if (!(lo < top))
            throw AlphaRangeViolation("[n/q, (lambda-p)/p) is empty");
        if (!(a >= lo && a < top && a > 0.0))
            throw AlphaRangeViolation("triple variant needs n/q <= alpha < (lambda-p)/p");
    }
    ScalarField f = radial_field(
        variant == RadialVariant::morrey ? "radial-morrey-ce" : "radial-triple-ce", params.n,
        [a](double r) { return r <= 1e-300 ? inf : std::pow(r, -a) - 1.0; },
        [a](double r) { return r <= 1e-300 ? inf : a * std::pow(r, -a - 1.0); }, 1.0);
    f.singularity = Singularity::origin;
    f.grad_power = -a - 1.0;
    f.value_power = -a;
    return f;
}

namespace {
void check_talenti(const MorreyParams& params, double c1, double c2) {
    if (params.p == 1.0)
        throw DegenerateProfile("the p = 1 extremal is not attained");
    if (!(c1 > 0.0 && c2 > 0.0)) throw DomainError("talenti constants must be positive");
}
} // namespace

ScalarField talenti_extremal(const MorreyParams& params, double c1, double c2) {
    check_talenti(params, c1, c2);
    const double e = (params.p - params.lambda) / (params.n + params.p - params.lambda);
    const double g = params.p / (params.p - 1.0);
    ScalarField f = radial_field(
        "talenti-profile", 1,
        [=](double s) { return std::pow(c1 + c2 * std::pow(s, g), e); },
        [=](double s) {
            return -e * std::pow(c1 + c2 * std::pow(s, g), e - 1.0) * c2 * g * std::pow(s, g - 1.0);
        },
        inf);
    return f;
}

ScalarField talenti_radial(const MorreyParams& params, double c1, double c2) {
    check_talenti(params, c1, c2);
    const double e = (params.p - params.lambda) / (params.n + params.p - params.lambda);
    const double g = (params.n + params.p - params.lambda) / (params.p - 1.0);
    return radial_field(
        "talenti", params.n,
        [=](double r) { return std::pow(c1 + c2 * std::pow(r, g), e); },
        [=](double r) {
            return -e * std::pow(c1 + c2 * std::pow(r, g), e - 1.0) * c2 * g * std::pow(r, g - 1.0);
        },
        inf);
}

ScalarField power_transform(const ScalarField& field, double b) {
    if (!(b >= 1.0)) throw DomainError("power_transform needs b >= 1");
    auto pw = [b](double u) {
        if (u < 0.0) throw NegativeFieldError("power_transform needs a non-negative field");
        return std::pow(u, b);
    };
    auto dpw = [b](double u, double g) {
        if (u < 0.0) throw NegativeFieldError("power_transform needs a non-negative field");
        if (b == 1.0) return g;
        if (g == 0.0) return 0.0;
        return b * std::pow(u, b - 1.0) * g;
    };

    ScalarField f = field;
    f.name = field.name + "^" + std::to_string(b);
    f.value = [v = field.value, pw](std::span<const double> x) { return pw(v(x)); };
    f.grad_norm = [v = field.value, g = field.grad_norm, dpw](std::span<const double> x) {
        return dpw(v(x), g(x));
    };
    f.grad_power = field.grad_power + (b - 1.0) * field.value_power;
    f.value_power = b * field.value_power;
    if (field.radial) {
        auto s = field.radial;
        f.radial = std::make_shared<RadialShape>(RadialShape{
            [s, pw](double r) { return pw(s->value(r)); },
            [s, dpw](double r) { return dpw(s->value(r), s->slope(r)); }, s->support});
    }
    if (field.axial) {
        auto s = field.axial;
        auto t = std::make_shared<AxialShape>(*s);
        t->value = [s, pw](double r, double z) { return pw(s->value(r, z)); };
        t->grad = [s, dpw](double r, double z) { return dpw(s->value(r, z), s->grad(r, z)); };
        f.axial = t;
    }
    if (field.fractal) {
        auto s = field.fractal;
        auto t = std::make_shared<FractalShape>(*s);
        t->value = [s, pw](double d) { return pw(s->value(d)); };
        t->slope = [s, dpw](double d) { return dpw(s->value(d), s->slope(d)); };
        f.fractal = t;
    }
    return f;
}

ScalarField constant_field(int dim, double c, double support_radius) {
    ScalarField f = radial_field(
        "constant", dim, [c](double) { return c; }, [](double) { return 0.0; }, support_radius);
    return f;
}

ScalarField make_field(const std::string& id, const MorreyParams& params) {
    if (id == "integer-ce") return counterexample_integer(params);
    if (id == "fractal-ce") return counterexample_fractal(params);
    if (id == "radial-morrey-ce") return radial_counterexample(params, RadialVariant::morrey);
    if (id == "radial-triple-ce") return radial_counterexample(params, RadialVariant::triple);
    if (id == "talenti") return talenti_radial(params, 1.0, 1.0);
    throw UnknownField("unknown field '" + id + "'");
}

} // namespace morreylab
