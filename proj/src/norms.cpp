#include "morreylab/norms.hpp"

#include "morreylab/errors.hpp"
#include "morreylab/fractal_engine.hpp"
#include "morreylab/rules.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <exception>
#include <limits>
#include <tuple>

namespace morreylab {

const char* to_string(NormKind k) {
    switch (k) {
    case NormKind::lebesgue: return "lebesgue";
    case NormKind::morrey: return "morrey";
    case NormKind::triple: return "triple";
    }
    return "lebesgue";
}

namespace {

using json = nlohmann::ordered_json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json candidate_json(const Candidate& c) {
    json j;
    j["y"] = c.y;
    j["value"] = number(c.value);
    if (c.radius) j["r"] = *c.radius;
    return j;
}

// |grad u|^p (or |u|^q) in one of the reduced forms.
struct Reduction {
    enum class Kind { radial, axial, fractal } kind;
    int n = 0;
    RadialIntegrand radial;
    AxialIntegrand axial;
    std::shared_ptr<FractalEngine> engine;
    double axis_half = 1.0;
};

struct Value {
    double value = 0.0;
    double error = 0.0;
    std::int64_t evaluations = 0;
    std::string tail_label;
};

void check_budget(std::int64_t evals, const SearchOptions& opt) {
    if (evals > opt.budget)
        throw BudgetExceeded("integral needed " + std::to_string(evals) +
                             " evaluations, budget is " + std::to_string(opt.budget));
}

// Integrand g(|grad u|) = |grad u|^p (gradient = true) or |u|^q.
Reduction reduce(const ScalarField& field, int n, double power, bool gradient,
                 const SearchOptions& opt, std::optional<double> tail_theta) {
    if (field.dim != n) throw DimensionError(field.name + ": field dimension differs from n");
    Reduction r;
    r.n = n;
    const double sing = (gradient ? field.grad_power : field.value_power) * power;
    if (field.radial) {
        auto s = field.radial;
        r.kind = Reduction::Kind::radial;
        r.radial.h = gradient ? ProfileFn([s, power](double x) { return std::pow(std::fabs(s->slope(x)), power); })
                              : ProfileFn([s, power](double x) { return std::pow(std::fabs(s->value(x)), power); });
        r.radial.power = sing;
        r.radial.outer = std::min(s->support, 1.0);
        return r;
    }
    if (field.axial) {
        auto s = field.axial;
        if (n - s->split != 1)
            throw DimensionError("axial reductions need a one-dimensional axis (n = lambda + 1)");
        r.kind = Reduction::Kind::axial;
        r.axial.g = gradient
                        ? std::function<double(double, double)>([s, power](double a, double z) {
                              return std::pow(std::fabs(s->grad(a, z)), power);
                          })
                        : std::function<double(double, double)>([s, power](double a, double z) {
                              return std::pow(std::fabs(s->value(a, z)), power);
                          });
        r.axial.power = sing;
        r.axial.r_support = s->r_support;
        r.axial.z_support = s->z_support;
        if (s->z_flat > 0.0) r.axial.z_breaks.push_back(s->z_flat);
        return r;
    }
    if (field.fractal && field.cantor) {
        auto s = field.fractal;
        if (s->k != n) throw DimensionError("fractal norms need the set embedded in R^n (k = n)");
        r.kind = Reduction::Kind::fractal;
        r.axis_half = 0.5;
        ProfileFn g = gradient ? ProfileFn([s, power](double d) { return std::pow(std::fabs(s->slope(d)), power); })
                               : ProfileFn([s, power](double d) { return std::pow(std::fabs(s->value(d)), power); });
        EngineOptions eo;
        eo.generations = opt.generations;
        eo.tail_theta = tail_theta;
        r.engine = std::make_shared<FractalEngine>(*field.cantor, n, g, sing, eo);
        return r;
    }
    throw DomainError(field.name + ": no radial, axial or fractal structure to reduce");
}

// Spread of value + tail_estimate when the deepest generation is dropped.
double tail_spread(const FractalIntegral& w, double rho, double theta) {
    if (w.per_generation.size() < 3) return std::fabs(w.tail_estimate);
    FractalIntegral t = w;
    t.value -= t.per_generation.back();
    t.per_generation.pop_back();
    attach_tail(t, TailEnvelope{rho, theta});
    return std::fabs(w.estimate() - t.estimate());
}

Value weighted_value(const Reduction& r, std::span<const double> y, double e,
                     const SearchOptions& opt, double theta) {
    Value v;
    const int n = r.n;
    double yp2 = 0.0;
    for (int i = 0; i + 1 < n; ++i) yp2 += y[i] * y[i];
    const double t = y[n - 1];
    switch (r.kind) {
    case Reduction::Kind::radial:
        v.value = radial_weighted(r.radial, n, std::sqrt(yp2 + t * t), e, &v.evaluations);
        v.error = opt.rel_tol * std::fabs(v.value);
        break;
    case Reduction::Kind::axial:
        v.value = axial_weighted(r.axial, n, std::sqrt(yp2), t, e, &v.evaluations);
        v.error = opt.rel_tol * std::fabs(v.value);
        break;
    case Reduction::Kind::fractal: {
        const auto w = r.engine->weighted(y, e);
        v.value = w.estimate();
        v.evaluations = w.evaluations;
        v.error = opt.rel_tol * std::fabs(v.value) +
                  tail_spread(w, r.engine->cantor().scale_ratio(), theta);
        v.tail_label = w.tail_label;
        break;
    }
    }
    check_budget(v.evaluations, opt);
    return v;
}

Value ball_value(const Reduction& r, std::span<const double> y, double R, const SearchOptions& opt,
                 double theta) {
    Value v;
    const int n = r.n;
    double yp2 = 0.0;
    for (int i = 0; i + 1 < n; ++i) yp2 += y[i] * y[i];
    const double t = y[n - 1];
    switch (r.kind) {
    case Reduction::Kind::radial:
        v.value = radial_ball(r.radial, n, std::sqrt(yp2 + t * t), R, &v.evaluations);
        v.error = opt.rel_tol * std::fabs(v.value);
        break;
    case Reduction::Kind::axial:
        if (yp2 != 0.0) throw DimensionError("axial ball integrals need an on-axis center");
        v.value = axial_ball(r.axial, n, t, R, &v.evaluations);
        v.error = opt.rel_tol * std::fabs(v.value);
        break;
    case Reduction::Kind::fractal: {
        const auto w = r.engine->ball(y, R);
        v.value = w.estimate();
        v.evaluations = w.evaluations;
        v.error = opt.rel_tol * std::fabs(v.value) +
                  tail_spread(w, r.engine->cantor().scale_ratio(), theta);
        v.tail_label = w.tail_label;
        break;
    }
    }
    check_budget(v.evaluations, opt);
    return v;
}

double nearest_cantor_point(const CantorSet& set, double t) {
    // x = shift + scale * local, local in [-1/2, 1/2]
    double shift = 0.0, scale = 1.0;
    const double rho = set.scale_ratio(), off = set.map_offset(), a1 = set.half_width(1);
    for (int depth = 0; depth < 64; ++depth) {
        const double u = (t - shift) / scale;
        if (u >= 0.5) return shift + 0.5 * scale;
        if (u <= -0.5) return shift - 0.5 * scale;
        if (std::fabs(u) < a1) return shift + (u < 0.0 ? -a1 : a1) * scale;
        const double c = u < 0.0 ? -off : off;
        shift += c * scale;
        scale *= rho;
        if (scale < 1e-17) break;
    }
    return t;
}

std::vector<double> axis_point(int n, double t) {
    std::vector<double> y(n, 0.0);
    y[n - 1] = t;
    return y;
}

// Axis grid, refinements around the running max, Cantor snapping for fractal fields.
template <class Eval>
void axis_search(const Reduction& r, const SearchOptions& opt, NormEstimate& out, Eval&& eval) {
    std::map<double, std::size_t> seen; // t -> index in out.candidates
    const double A = r.axis_half;
    const CantorSet* set = r.kind == Reduction::Kind::fractal ? &r.engine->cantor() : nullptr;

    auto run = [&](std::vector<double> ts) {
        if (set) {
            const std::size_t m = ts.size();
            for (std::size_t i = 0; i < m; ++i) ts.push_back(nearest_cantor_point(*set, ts[i]));
        }
        std::vector<double> fresh;
        for (double t : ts)
            if (seen.emplace(t, 0).second) fresh.push_back(t);
        std::vector<Candidate> res(fresh.size());
        std::vector<std::int64_t> evals(fresh.size(), 0);
        std::vector<double> errs(fresh.size(), 0.0);
        std::vector<std::string> labels(fresh.size());
        const int count = int(fresh.size());
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) if (opt.policy == ExecPolicy::parallel)
        for (int i = 0; i < count; ++i) {
            try {
                res[i].y = axis_point(r.n, fresh[i]);
                const auto [v, e, ev, rad, lab] = eval(res[i].y);
                res[i].value = v;
                res[i].radius = rad;
                errs[i] = e;
                evals[i] = ev;
                labels[i] = lab;
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        for (int i = 0; i < count; ++i) {
            seen[fresh[i]] = out.candidates.size();
            out.candidates.push_back(res[i]);
            out.trace.push_back(res[i].value);
            out.evaluations += evals[i];
            const bool better = out.candidates.size() == 1 || res[i].value > out.power_value;
            if (better) {
                out.power_value = res[i].value;
                out.witness_y = res[i].y;
                out.witness_r = res[i].radius;
                out.error_estimate = errs[i];
                out.tail_label = labels[i];
            }
        }
    };

    auto linspace = [](double a, double b, int m) {
        std::vector<double> v(m);
        for (int i = 0; i < m; ++i) v[i] = m == 1 ? 0.5 * (a + b) : a + (b - a) * i / (m - 1);
        return v;
    };
    run(linspace(-A, A, opt.axis_points));
    double h = 2.0 * A / std::max(1, opt.axis_points - 1);
    for (int k = 0; k < opt.refinements; ++k) {
        const double c = out.witness_y[r.n - 1];
        run(linspace(std::max(-A, c - h), std::min(A, c + h), opt.refine_points));
        h = 2.0 * h / std::max(1, opt.refine_points - 1);
    }
}

double fractal_theta(const ScalarField& field, const MorreyParams& params) {
    return params.lambda + field.grad_power * params.p;
}

void check_weight(const ScalarField& field, const MorreyParams& params) {
    if (field.dim != params.n) throw DimensionError(field.name + ": field dimension differs from n");
}

std::vector<double> random_ball_point(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    std::vector<double> y(n);
    double s = 0.0;
    for (double& v : y) {
        v = gauss(rng);
        s += v * v;
    }
    const double rad = std::pow(unif(rng), 1.0 / n) / std::sqrt(s);
    for (double& v : y) v *= rad;
    return y;
}

} // namespace

json NormEstimate::to_json() const {
    json j;
    j["kind"] = to_string(kind);
    j["field"] = field;
    if (diverged)
        j["value"] = "DIVERGED";
    else
        j["value"] = number(value);
    j["power_value"] = diverged ? json(nullptr) : number(power_value);
    j["exponent"] = exponent;
    json w;
    w["y"] = witness_y;
    w["r"] = witness_r ? json(*witness_r) : json(nullptr);
    j["witness"] = w;
    json tr = json::array();
    for (double v : trace) tr.push_back(number(v));
    j["trace"] = tr;
    json cs = json::array();
    for (const auto& c : candidates) cs.push_back(candidate_json(c));
    j["candidates"] = cs;
    if (kind == NormKind::lebesgue) {
        json ra = json::array();
        for (double v : ratios) ra.push_back(number(v));
        j["ratios"] = ra;
    }
    if (!audit.empty()) {
        json a;
        double mx = -inf;
        for (const auto& c : audit) mx = std::max(mx, c.value);
        a["points"] = audit.size();
        a["max"] = number(mx);
        a["passed"] = audit_passed;
        j["audit"] = a;
    }
    j["tolerances"] = {{"rel_tol", rel_tol}, {"error_estimate", number(error_estimate)}};
    j["tail"] = tail_label;
    j["evaluations"] = evaluations;
    return j;
}

// ---- Lebesgue ---------------------------------------------------------------

namespace {

std::vector<double> axial_shells(const AxialIntegrand& f, int n, int count) {
    const int m = n - 1;
    const double Z = f.z_support;
    std::vector<double> br;
    for (double b : f.z_breaks) {
        br.push_back(b);
        br.push_back(-b);
    }
    const Rule zr = graded_rule(-Z, Z, {}, br, 8, 4);
    const double sph = sphere_area(m - 1);
    std::vector<double> out;
    for (int k = 0; k < count; ++k) {
        const double b = std::ldexp(f.r_support, -k), a = 0.5 * b;
        Rule rr;
        for (int c = 0; c < 4; ++c) append_gauss(rr, a + c * (b - a) / 4, a + (c + 1) * (b - a) / 4, 16);
        KahanSum acc;
        for (const Node& zn : zr)
            for (const Node& rn : rr)
                acc.add(zn.w * rn.w * f.g(rn.x, std::fabs(zn.x)) * std::pow(rn.x, m - 1));
        out.push_back(sph * acc.value());
    }
    return out;
}

} // namespace

NormEstimate lq_partial_sums(const ScalarField& field, double q, const SearchOptions& opt) {
    if (!(q >= 1.0)) throw DomainError("lq_partial_sums needs q >= 1");
    NormEstimate out;
    out.kind = NormKind::lebesgue;
    out.field = field.name;
    out.exponent = q;
    out.rel_tol = opt.rel_tol;
    const Reduction r = reduce(field, field.dim, q, false, opt, std::nullopt);

    double base = 0.0; // contributions outside the traced sequence
    constexpr int shells = 40;
    switch (r.kind) {
    case Reduction::Kind::radial:
        out.trace = radial_shells(r.radial, r.n, shells);
        out.evaluations = std::int64_t(shells) * 64;
        break;
    case Reduction::Kind::axial:
        out.trace = axial_shells(r.axial, r.n, shells);
        out.evaluations = std::int64_t(shells) * 64;
        break;
    case Reduction::Kind::fractal: {
        const auto pl = r.engine->plain();
        out.trace = pl.per_generation;
        base = pl.caps;
        break;
    }
    }
    for (std::size_t i = 0; i + 1 < out.trace.size(); ++i)
        out.ratios.push_back(out.trace[i] > 0.0 ? out.trace[i + 1] / out.trace[i] : 0.0);

    const std::size_t nr = out.ratios.size();
    if (nr >= std::size_t(ratio_window)) {
        bool growing = true;
        for (std::size_t i = nr - ratio_window; i < nr; ++i)
            growing = growing && out.ratios[i] >= 1.0 - ratio_epsilon;
        out.diverged = growing;
    }
    if (out.diverged) {
        out.value = out.power_value = inf;
        return out;
    }
    KahanSum s;
    for (double v : out.trace) s.add(v);
    s.add(base);
    double tail = 0.0, spread = 0.0;
    if (nr >= 1) {
        const double last = out.ratios.back();
        if (last >= 1.0) throw TailDivergence("last growth ratio is not below 1");
        tail = out.trace.back() * last / (1.0 - last);
        if (nr >= 2) {
            const double prev = std::min(out.ratios[nr - 2], 1.0 - 1e-12);
            spread = std::fabs(tail - out.trace.back() * prev / (1.0 - prev));
        }
    }
    out.power_value = s.value() + tail;
    out.value = std::pow(out.power_value, 1.0 / q);
    out.error_estimate = opt.rel_tol * out.power_value + spread;
    out.tail_label = "geometric";
    return out;
}

// ---- triple and Morrey ------------------------------------------------------

double triple_integrand(const ScalarField& field, const MorreyParams& params,
                        std::span<const double> y, const SearchOptions& opt) {
    check_weight(field, params);
    const double theta = fractal_theta(field, params);
    const Reduction r = reduce(field, params.n, params.p, true, opt, theta);
    return weighted_value(r, y, params.lambda - params.n, opt, theta).value;
}

NormEstimate triple_norm(const ScalarField& field, const MorreyParams& params,
                         const SearchOptions& opt) {
    check_weight(field, params);
    const double theta = fractal_theta(field, params);
    const double e = params.lambda - params.n;
    if (field.singularity == Singularity::origin && !(field.grad_power * params.p + params.lambda > 0.0))
        throw NonIntegrableHint(field.name + ": |grad u|^p |x|^(lambda-n) is not integrable at 0");
    const Reduction r = reduce(field, params.n, params.p, true, opt, theta);

    NormEstimate out;
    out.kind = NormKind::triple;
    out.field = field.name;
    out.exponent = params.p;
    out.rel_tol = opt.rel_tol;
    auto eval = [&](std::span<const double> y) {
        const Value v = weighted_value(r, y, e, opt, theta);
        return std::tuple{v.value, v.error, v.evaluations, std::optional<double>{}, v.tail_label};
    };
    axis_search(r, opt, out, eval);

    std::vector<Candidate> extra(opt.extra_candidates.size());
    for (std::size_t i = 0; i < extra.size(); ++i) {
        extra[i].y = opt.extra_candidates[i];
        if (int(extra[i].y.size()) != params.n) throw DimensionError("candidate has the wrong dimension");
        const Value v = weighted_value(r, extra[i].y, e, opt, theta);
        extra[i].value = v.value;
        out.evaluations += v.evaluations;
        out.trace.push_back(v.value);
        if (v.value > out.power_value) {
            out.power_value = v.value;
            out.witness_y = extra[i].y;
            out.error_estimate = v.error;
        }
    }
    out.candidates.insert(out.candidates.end(), extra.begin(), extra.end());

    // off-axis audit; fractal off-axis weights are available for n = 2 only
    if (opt.audit_points > 0 && !(r.kind == Reduction::Kind::fractal && params.n != 2)) {
        std::mt19937_64 rng(opt.seed);
        out.audit.resize(opt.audit_points);
        for (auto& c : out.audit) c.y = random_ball_point(rng, params.n);
        std::vector<std::int64_t> evals(out.audit.size(), 0);
        const int count = int(out.audit.size());
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) if (opt.policy == ExecPolicy::parallel)
        for (int i = 0; i < count; ++i) {
            try {
                const Value v = weighted_value(r, out.audit[i].y, e, opt, theta);
                out.audit[i].value = v.value;
                evals[i] = v.evaluations;
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        for (auto ev : evals) out.evaluations += ev;
        for (const auto& c : out.audit)
            out.audit_passed = out.audit_passed && c.value <= out.power_value + out.error_estimate;
    }
    out.value = std::pow(out.power_value, 1.0 / params.p);
    return out;
}

double morrey_ratio(const ScalarField& field, const MorreyParams& params,
                    std::span<const double> y, double r, const SearchOptions& opt) {
    check_weight(field, params);
    const double theta = fractal_theta(field, params);
    const Reduction red = reduce(field, params.n, params.p, true, opt, theta);
    return std::pow(r, params.lambda - params.n) * ball_value(red, y, r, opt, theta).value;
}

NormEstimate morrey_norm(const ScalarField& field, const MorreyParams& params,
                         const SearchOptions& opt) {
    check_weight(field, params);
    if (!(opt.r_min > 0.0 && opt.r_max > opt.r_min && opt.radius_scan >= 3))
        throw ConfigError("invalid Morrey radius scan");
    const double theta = fractal_theta(field, params);
    const double e = params.lambda - params.n;
    const Reduction r = reduce(field, params.n, params.p, true, opt, theta);

    NormEstimate out;
    out.kind = NormKind::morrey;
    out.field = field.name;
    out.exponent = params.p;
    out.rel_tol = opt.rel_tol;

    // sup over r: coarse log scan, then golden section around the best scan point
    auto sup_r = [&](std::span<const double> y) {
        std::int64_t evals = 0;
        double err = 0.0;
        std::string label;
        auto obj = [&](double lr) {
            const double R = std::exp(lr);
            const Value v = ball_value(r, y, R, opt, theta);
            evals += v.evaluations;
            if (!v.tail_label.empty()) label = v.tail_label;
            const double f = std::exp(e * lr);
            return std::pair{f * v.value, f * v.error};
        };
        const double a = std::log(opt.r_min), b = std::log(opt.r_max);
        const int m = opt.radius_scan;
        std::vector<double> vals(m), errs(m);
        int best = 0;
        for (int i = 0; i < m; ++i) {
            std::tie(vals[i], errs[i]) = obj(a + (b - a) * i / (m - 1));
            if (vals[i] > vals[best]) best = i;
        }
        double best_v = vals[best], best_lr = a + (b - a) * best / (m - 1);
        err = errs[best];
        double lo = a + (b - a) * std::max(0, best - 1) / (m - 1);
        double hi = a + (b - a) * std::min(m - 1, best + 1) / (m - 1);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        auto [f1, e1] = obj(x1);
        auto [f2, e2] = obj(x2);
        while (hi - lo > 1e-4) {
            if (f1 >= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                e2 = e1;
                x1 = hi - g * (hi - lo);
                std::tie(f1, e1) = obj(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                e1 = e2;
                x2 = lo + g * (hi - lo);
                std::tie(f2, e2) = obj(x2);
            }
        }
        for (auto [f, ee, lr] : {std::tuple{f1, e1, x1}, std::tuple{f2, e2, x2}})
            if (f > best_v) {
                best_v = f;
                best_lr = lr;
                err = ee;
            }
        return std::tuple{best_v, err, evals, std::optional<double>{std::exp(best_lr)}, label};
    };
    axis_search(r, opt, out, sup_r);
    for (const auto& y : opt.extra_candidates) {
        if (int(y.size()) != params.n) throw DimensionError("candidate has the wrong dimension");
        const auto [v, err, ev, rad, lab] = sup_r(y);
        out.candidates.push_back({y, v, rad});
        out.trace.push_back(v);
        out.evaluations += ev;
        if (v > out.power_value) {
            out.power_value = v;
            out.witness_y = y;
            out.witness_r = rad;
            out.error_estimate = err;
        }
    }
    out.value = std::pow(out.power_value, 1.0 / params.p);
    return out;
}

// ---- monotonicity -----------------------------------------------------------

std::vector<ScanPoint> monotonicity_scan(int n, double theta, const RadialIntegrand& h,
                                         std::span<const double> y_path, double rel_tol) {
    if (!(theta > 0.0)) throw DomainError("monotonicity_scan needs theta > 0");
    for (std::size_t i = 1; i < y_path.size(); ++i)
        if (!(y_path[i] > y_path[i - 1])) throw DomainError("y_path must be increasing");
    std::vector<ScanPoint> out;
    for (double y1 : y_path) {
        if (y1 < 0.0) throw DomainError("y_path must lie on the half axis y1 >= 0");
        const double v = radial_weighted(h, n, y1, -theta);
        out.push_back({y1, v, rel_tol * std::fabs(v)});
    }
    return out;
}

// ---- grid functions ---------------------------------------------------------

GridFunction::GridFunction(std::vector<double> lo, double step, std::vector<int> counts,
                           std::vector<double> values)
    : lo_(std::move(lo)), step_(step), counts_(std::move(counts)), values_(std::move(values)) {
    if (lo_.size() != counts_.size() || lo_.empty()) throw DimensionError("grid shape mismatch");
    if (!(step_ > 0.0)) throw DomainError("grid step must be positive");
    std::size_t total = 1;
    for (int c : counts_) {
        if (c < 2) throw DomainError("grid needs at least two samples per axis");
        total *= std::size_t(c);
    }
    if (values_.size() != total) throw DimensionError("grid value count mismatch");
}

GridFunction GridFunction::sample(const PointFn& f, std::vector<double> lo, double step,
                                  std::vector<int> counts) {
    const int d = int(lo.size());
    std::size_t total = 1;
    for (int c : counts) total *= std::size_t(std::max(c, 0));
    std::vector<double> vals(total);
    std::vector<double> x(d);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (int k = d - 1; k >= 0; --k) {
            x[k] = lo[k] + step * double(rest % counts[k]);
            rest /= counts[k];
        }
        vals[idx] = f(x);
    }
    return GridFunction(std::move(lo), step, std::move(counts), std::move(vals));
}

double GridFunction::operator()(std::span<const double> x) const {
    const int d = dim();
    int base[8];
    double frac[8];
    for (int k = 0; k < d; ++k) {
        const double u = (x[k] - lo_[k]) / step_;
        if (!(u > -1.0 && u < double(counts_[k]))) return 0.0;
        const double fl = std::floor(u);
        base[k] = int(fl);
        frac[k] = u - fl;
    }
    double s = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
        double w = 1.0;
        std::size_t idx = 0;
        bool inside = true;
        for (int k = 0; k < d; ++k) {
            const int bit = (corner >> k) & 1;
            const int i = base[k] + bit;
            if (i < 0 || i >= counts_[k]) {
                inside = false;
                break;
            }
            w *= bit ? frac[k] : 1.0 - frac[k];
            idx = idx * std::size_t(counts_[k]) + std::size_t(i);
        }
        if (inside && w != 0.0) s += w * values_[idx];
    }
    return s;
}

GridFunction GridFunction::scaled(double c) const {
    GridFunction g = *this;
    for (double& v : g.values_) v *= c;
    return g;
}

GridFunction GridFunction::plus(const GridFunction& other) const {
    if (other.lo_ != lo_ || other.counts_ != counts_ || other.step_ != step_)
        throw DimensionError("grid functions live on different grids");
    GridFunction g = *this;
    for (std::size_t i = 0; i < values_.size(); ++i) g.values_[i] += other.values_[i];
    return g;
}

namespace {
struct BoundingBox {
    std::vector<double> lo, hi;
};
} // namespace

static BoundingBox support_box(const std::vector<double>& lo, double step, const std::vector<int>& counts,
                               const std::vector<double>& values) {
    const int d = int(lo.size());
    std::vector<int> mn(d, std::numeric_limits<int>::max()), mx(d, -1);
    std::vector<int> idx(d);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == 0.0) continue;
        std::size_t rest = i;
        for (int k = d - 1; k >= 0; --k) {
            idx[k] = int(rest % counts[k]);
            rest /= counts[k];
        }
        for (int k = 0; k < d; ++k) {
            mn[k] = std::min(mn[k], idx[k]);
            mx[k] = std::max(mx[k], idx[k]);
        }
    }
    if (mx[0] < 0) throw EmptySupport("grid function vanishes identically");
    BoundingBox b;
    for (int k = 0; k < d; ++k) {
        b.lo.push_back(lo[k] + step * (mn[k] - 1));
        b.hi.push_back(lo[k] + step * (mx[k] + 1));
    }
    return b;
}

double GridFunction::reach(std::span<const double> x) const {
    const auto b = support_box(lo_, step_, counts_, values_);
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) {
        const double m = std::max(std::fabs(x[k] - b.lo[k]), std::fabs(x[k] - b.hi[k]));
        s += m * m;
    }
    return std::sqrt(s);
}

double GridFunction::support_diameter() const {
    const auto b = support_box(lo_, step_, counts_, values_);
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) s += (b.hi[k] - b.lo[k]) * (b.hi[k] - b.lo[k]);
    return std::sqrt(s);
}

namespace {

// Integral over r0 < |y - x| < r1 of |f(y)| |y - x|^(power - n + 1) dy in polar form,
// i.e. int rho^power int_S |f(x + rho w)| dw drho. Fixed rules, so the result is linear in f.
double polar_shell(const GridFunction& f, std::span<const double> x, double r0, double r1, double power) {
    const int n = f.dim();
    if (n != 2 && n != 3) throw DimensionError("grid operators support n = 2 and n = 3");
    if (!(r1 > r0)) return 0.0;
    const double h = f.step();
    const int cells = std::max(1, int(std::ceil((r1 - r0) / (0.5 * h))));
    const auto gl = gauss_legendre(4);
    const double two_pi = 2.0 * std::numbers::pi;
    KahanSum total;
    std::vector<double> y(n);
    for (int c = 0; c < cells; ++c) {
        const double a = r0 + (r1 - r0) * c / cells, b = r0 + (r1 - r0) * (c + 1) / cells;
        for (const Node& nd : gl) {
            const double rho = 0.5 * (a + b) + 0.5 * (b - a) * nd.x;
            const double wr = 0.5 * (b - a) * nd.w * std::pow(rho, power);
            const int M = std::max(32, 4 * int(std::ceil(two_pi * rho / h)));
            double ang = 0.0;
            if (n == 2) {
                for (int j = 0; j < M; ++j) {
                    const double t = two_pi * (j + 0.5) / M;
                    y[0] = x[0] + rho * std::cos(t);
                    y[1] = x[1] + rho * std::sin(t);
                    ang += std::fabs(f(y));
                }
                ang *= two_pi / M;
            } else {
                const int K = std::max(4, int(std::ceil(std::numbers::pi * rho / h)));
                for (int kc = 0; kc < K; ++kc) {
                    const double ca = -1.0 + 2.0 * kc / K, cb = -1.0 + 2.0 * (kc + 1) / K;
                    for (const Node& cn : gl) {
                        const double ct = 0.5 * (ca + cb) + 0.5 * (cb - ca) * cn.x;
                        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                        const double wc = 0.5 * (cb - ca) * cn.w;
                        double ring = 0.0;
                        for (int j = 0; j < M; ++j) {
                            const double t = two_pi * (j + 0.5) / M;
                            y[0] = x[0] + rho * st * std::cos(t);
                            y[1] = x[1] + rho * st * std::sin(t);
                            y[2] = x[2] + rho * ct;
                            ring += std::fabs(f(y));
                        }
                        ang += wc * ring * two_pi / M;
                    }
                }
            }
            total.add(wr * ang);
        }
    }
    return total.value();
}

void check_point(const GridFunction& f, std::span<const double> x) {
    if (int(x.size()) != f.dim()) throw DimensionError("point has the wrong dimension");
}

} // namespace

MaximalResult maximal_function(const GridFunction& f, double beta, std::span<const double> x,
                               bool normalized) {
    check_point(f, x);
    const int n = f.dim();
    if (!(beta >= 0.0 && beta <= n)) throw DomainError("beta must lie in [0, n]");
    const double reach = f.reach(x);
    const double r0 = f.step(), r1 = 2.0 * f.support_diameter();
    const double span = std::log(r1 / r0);
    const int count = std::max(64, int(std::ceil(span / std::log(1.15))) + 1);
    MaximalResult res;
    res.ratio = std::exp(span / (count - 1));
    double cum = 0.0, prev = 0.0;
    res.value = -1.0;
    for (int i = 0; i < count; ++i) {
        const double r = r0 * std::exp(span * i / (count - 1));
        const double top = std::min(r, reach);
        if (top > prev) {
            cum += polar_shell(f, x, prev, top, n - 1);
            prev = top;
        }
        const double v = std::pow(r, beta - n) * cum;
        if (v > res.value) {
            res.value = v;
            res.radius = r;
        }
    }
    if (normalized) res.value /= sphere_area(n - 1) / n;
    res.upper = res.value * std::pow(res.ratio, n - beta);
    return res;
}

double riesz_potential(const GridFunction& f, std::span<const double> x, std::optional<double> cutoff) {
    check_point(f, x);
    double top = f.reach(x);
    if (cutoff) top = std::min(top, *cutoff);
    return polar_shell(f, x, 0.0, top, 0.0);
}

double adams_annulus_constant(int n, double beta) {
    if (!(beta > 1.0)) throw DomainError("the annulus series needs lambda / p > 1");
    return std::pow(2.0, n - beta) / (1.0 - std::pow(2.0, 1.0 - beta));
}

json AdamsReport::to_json() const {
    return {{"riesz", riesz},           {"m0", m0},
            {"m_beta", m_beta},         {"delta", delta},
            {"near", near},             {"far", far},
            {"near_bound", near_bound}, {"far_bound", far_bound},
            {"slack", slack},           {"holds", holds}};
}

AdamsReport check_adams_splitting(const GridFunction& f, std::span<const double> x,
                                  const MorreyParams& params) {
    check_point(f, x);
    const int n = f.dim();
    if (n != params.n) throw DimensionError("grid dimension differs from n");
    const double beta = params.lambda / params.p;
    AdamsReport rep;
    const auto m0 = maximal_function(f, 0.0, x);
    const auto mb = maximal_function(f, beta, x);
    if (!(m0.value > 0.0)) throw ZeroDenominator("M_0 f(x) vanishes");
    // the radius grid under-reports the sup; the bounds use the sound upper values
    rep.m0 = m0.upper;
    rep.m_beta = mb.upper;
    rep.delta = std::pow(rep.m_beta / rep.m0, 1.0 / beta);
    const double reach = f.reach(x);
    rep.near = polar_shell(f, x, 0.0, std::min(rep.delta, reach), 0.0);
    rep.far = rep.delta < reach ? polar_shell(f, x, rep.delta, reach, 0.0) : 0.0;
    rep.riesz = rep.near + rep.far;
    rep.near_bound = std::pow(2.0, n) * rep.delta * rep.m0;
    rep.far_bound = adams_annulus_constant(n, beta) * std::pow(rep.delta, 1.0 - beta) * rep.m_beta;
    rep.slack = (rep.near_bound + rep.far_bound) / rep.riesz;
    rep.holds = rep.near <= rep.near_bound && rep.far <= rep.far_bound &&
                rep.riesz <= rep.near_bound + rep.far_bound;
    return rep;
}

// ---- rearrangement ----------------------------------------------------------

RearrangementReport check_rearrangement_inequality(std::span<const Step> phi, double q) {
    if (!(q > 1.0)) throw DomainError("the rearrangement check needs q > 1");
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!(phi[i].length > 0.0)) throw DomainError("step lengths must be positive");
        if (!(phi[i].value >= 0.0)) throw DomainError("phi must be non-negative");
        if (i > 0 && phi[i].value > phi[i - 1].value) throw NotMonotone("phi must be non-increasing");
    }
    KahanSum lhs, inner;
    double t = 0.0;
    for (const Step& s : phi) {
        const double t1 = t + s.length;
        lhs.add(s.value * (std::pow(t1, q) - std::pow(t, q)));
        inner.add(std::pow(s.value, 1.0 / q) * s.length);
        t = t1;
    }
    RearrangementReport r;
    r.lhs = lhs.value();
    r.rhs = std::pow(inner.value(), q);
    r.holds = r.lhs <= r.rhs + 1e-12 * std::max(1.0, r.rhs);
    return r;
}

// ---- radial embedding -------------------------------------------------------

EmbeddingReport check_radial_embedding(const ScalarField& field, const MorreyParams& params,
                                       double q, const SearchOptions& opt) {
    if (!field.radial) throw DomainError("check_radial_embedding needs a radial field");
    EmbeddingReport rep;
    rep.lq = lq_partial_sums(field, q, opt);
    SearchOptions mo = opt;
    mo.audit_points = 0;
    rep.morrey = morrey_norm(field, params, mo);
    if (!rep.lq.diverged && rep.morrey.value > 0.0) rep.ratio = rep.lq.value / rep.morrey.value;
    return rep;
}

AdamsChainReport check_adams_chain(const ScalarField& field, int count, std::uint64_t seed) {
    if (!field.radial) throw DomainError("the Adams chain check needs a radial field");
    const int n = field.dim;
    auto s = field.radial;
    const RadialIntegrand h{[s](double r) { return std::fabs(s->slope(r)); }, field.grad_power,
                            std::min(s->support, 1.0)};
    std::mt19937_64 rng(seed);
    AdamsChainReport rep;
    for (int i = 0; i < count; ++i) {
        const auto x = random_ball_point(rng, n);
        double r = 0.0;
        for (double v : x) r += v * v;
        r = std::sqrt(r);
        const double u = std::fabs(field.evaluate(x));
        const double bound = radial_weighted(h, n, r, 1.0 - n) / sphere_area(n - 1);
        rep.samples.emplace_back(u, bound);
        rep.max_ratio = std::max(rep.max_ratio, u / bound);
    }
    return rep;
}

} // namespace morreylab
