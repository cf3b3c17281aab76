#include "morreylab/quadrature.hpp"

#include "morreylab/errors.hpp"
#include "morreylab/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <queue>

namespace morreylab {

double Box::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
    return v;
}

void write_trace_csv(const std::vector<CellTrace>& trace, std::ostream& out) {
    if (trace.empty()) return;
    const std::size_t d = trace.front().lo.size();
    for (std::size_t i = 0; i < d; ++i) out << "lo_" << i << ',';
    for (std::size_t i = 0; i < d; ++i) out << "hi_" << i << ',';
    out << "value,error\n";
    out.precision(17);
    for (const CellTrace& c : trace) {
        for (double x : c.lo) out << x << ',';
        for (double x : c.hi) out << x << ',';
        out << c.value << ',' << c.error << '\n';
    }
}

namespace {

struct Cell {
    std::vector<double> lo, hi;
    double value = 0.0; // best estimate (children sum along split axis)
    double error = 0.0;
    int axis = 0;
    double child_value[2] = {0.0, 0.0};
    std::uint64_t id = 0;
    bool frozen = false;
};

class BoxIntegrator {
public:
    BoxIntegrator(const PointFn& f, const std::optional<SingularWeight>& w,
                  const QuadratureOptions& opt, int dim)
        : f_(f), w_(w), opt_(opt), dim_(dim), nodes_(gauss_legendre(opt.order)) {}

    // Tensor Gauss estimate on [lo,hi]; also tracks sup |f| (weight excluded).
    double tensor(const std::vector<double>& lo, const std::vector<double>& hi, double& sup,
                  std::int64_t& evals) const {
        const int q = int(nodes_.size());
        std::vector<int> idx(dim_, 0);
        std::vector<double> x(dim_), h(dim_), c(dim_);
        double jac = 1.0;
        for (int i = 0; i < dim_; ++i) {
            h[i] = 0.5 * (hi[i] - lo[i]);
            c[i] = 0.5 * (hi[i] + lo[i]);
            jac *= h[i];
        }
        KahanSum sum;
        while (true) {
            double wt = jac;
            for (int i = 0; i < dim_; ++i) {
                x[i] = c[i] + h[i] * nodes_[idx[i]].x;
                wt *= nodes_[idx[i]].w;
            }
            double v = f_(x);
            ++evals;
            if (!std::isfinite(v)) v = 0.0;
            sup = std::max(sup, std::fabs(v));
            if (w_) {
                double r2 = 0.0;
                for (int i = 0; i < dim_; ++i) {
                    const double t = x[i] - w_->center[i];
                    r2 += t * t;
                }
                v = r2 > 0.0 ? v * std::pow(r2, 0.5 * w_->exponent) : 0.0;
            }
            sum.add(wt * v);
            int i = 0;
            while (i < dim_ && ++idx[i] == q) idx[i++] = 0;
            if (i == dim_) break;
        }
        return sum.value();
    }

    static bool contains(const std::vector<double>& lo, const std::vector<double>& hi,
                         std::span<const double> p) {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }

    // Evaluate the 2d half-cells and derive the cell's estimate and error.
    void assess(Cell& cell, double own, std::int64_t& evals) const {
        double sup = 0.0;
        double best = -1.0;
        for (int a = 0; a < dim_; ++a) {
            const double mid = 0.5 * (cell.lo[a] + cell.hi[a]);
            std::vector<double> l1 = cell.lo, h1 = cell.hi, l2 = cell.lo, h2 = cell.hi;
            h1[a] = mid;
            l2[a] = mid;
            const double q1 = tensor(l1, h1, sup, evals);
            const double q2 = tensor(l2, h2, sup, evals);
            const double e = std::fabs(own - (q1 + q2));
            if (e > best) {
                best = e;
                cell.axis = a;
                cell.child_value[0] = q1;
                cell.child_value[1] = q2;
            }
        }
        cell.value = cell.child_value[0] + cell.child_value[1];
        cell.error = best;
        if (w_ && contains(cell.lo, cell.hi, w_->center)) {
            double D2 = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double t = std::max(std::fabs(cell.lo[i] - w_->center[i]),
                                          std::fabs(cell.hi[i] - w_->center[i]));
                D2 += t * t;
            }
            const double lam = w_->exponent + dim_;
            const double ball = sphere_area(dim_ - 1) * std::pow(D2, 0.5 * lam) / lam;
            cell.error = std::max(cell.error, 2.0 * sup * ball);
        }
        for (const PointHint& h : opt_.hints)
            if (contains(cell.lo, cell.hi, h.at))
                cell.error = std::max(cell.error, std::fabs(cell.value));
        double width = 0.0, scale = 0.0;
        for (int i = 0; i < dim_; ++i) {
            width = std::max(width, cell.hi[i] - cell.lo[i]);
            scale = std::max({scale, std::fabs(cell.lo[i]), std::fabs(cell.hi[i])});
        }
        cell.frozen = width <= 1e-14 * std::max(scale, 1e-300);
    }

private:
    const PointFn& f_;
    const std::optional<SingularWeight>& w_;
    const QuadratureOptions& opt_;
    int dim_;
    std::span<const Node> nodes_;
};

void run_cells(std::vector<Cell*>& todo, const std::vector<double>& own, const BoxIntegrator& I,
               std::vector<std::int64_t>& evals, ExecPolicy policy) {
    const long m = long(todo.size());
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < m; ++i) I.assess(*todo[i], own[i], evals[i]);
    } else {
        for (long i = 0; i < m; ++i) I.assess(*todo[i], own[i], evals[i]);
    }
}

} // namespace

QuadratureResult integrate_box(const PointFn& f, const Box& box,
                               const std::optional<SingularWeight>& weight,
                               const QuadratureOptions& opt) {
    const int d = box.dim();
    if (d < 1 || int(box.hi.size()) != d) throw DimensionError("malformed box");
    if (!(opt.rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
    if (weight) {
        if (int(weight->center.size()) != d) throw DimensionError("weight center dimension");
        if (!(weight->exponent > -d))
            throw NonIntegrableHint("weight exponent must exceed -dim");
    }
    for (const PointHint& h : opt.hints) {
        if (int(h.at.size()) != d) throw DimensionError("hint dimension");
        if (!(h.power > -d)) throw NonIntegrableHint("blow-up power must exceed -dim");
    }

    BoxIntegrator I(f, weight, opt, d);
    QuadratureResult res;
    std::vector<Cell> cells;
    cells.reserve(1024);

    if (opt.uniform_level) {
        const int per = 1 << *opt.uniform_level;
        std::vector<int> idx(d, 0);
        KahanSum sum;
        double sup = 0.0;
        while (true) {
            std::vector<double> lo(d), hi(d);
            for (int i = 0; i < d; ++i) {
                const double h = (box.hi[i] - box.lo[i]) / per;
                lo[i] = box.lo[i] + h * idx[i];
                hi[i] = idx[i] + 1 == per ? box.hi[i] : box.lo[i] + h * (idx[i] + 1);
            }
            const double v = I.tensor(lo, hi, sup, res.evaluations);
            sum.add(v);
            if (opt.trace) opt.trace->push_back({lo, hi, v, 0.0});
            int i = 0;
            while (i < d && ++idx[i] == per) idx[i++] = 0;
            if (i == d) break;
        }
        res.value = sum.value();
        return res;
    }

    std::int64_t evals = 0;
    double sup = 0.0;
    Cell root{box.lo, box.hi};
    const double own = I.tensor(root.lo, root.hi, sup, evals);
    I.assess(root, own, evals);
    cells.push_back(std::move(root));

    auto cmp = [&cells](std::size_t a, std::size_t b) {
        if (cells[a].error != cells[b].error) return cells[a].error < cells[b].error;
        return cells[a].id > cells[b].id;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
    heap.push(0);
    std::uint64_t next_id = 1;
    constexpr int batch = 16;

    auto totals = [&cells](double& v, double& e) {
        KahanSum sv, se;
        for (const Cell& c : cells) {
            if (c.lo.empty()) continue;
            sv.add(c.value);
            se.add(c.error);
        }
        v = sv.value();
        e = se.value();
    };

    double total = 0.0, err = 0.0;
    totals(total, err);
    int rounds = 0;
    while (!heap.empty()) {
        if (err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(total))) break;
        if (evals >= opt.budget) {
            res.budget_exceeded = true;
            break;
        }
        std::vector<std::size_t> parents;
        while (!heap.empty() && int(parents.size()) < batch) {
            const std::size_t i = heap.top();
            heap.pop();
            if (cells[i].frozen) continue;
            parents.push_back(i);
        }
        if (parents.empty()) break;
        std::vector<Cell> kids;
        std::vector<double> own_vals;
        for (std::size_t pi : parents) {
            const Cell& p = cells[pi];
            const double mid = 0.5 * (p.lo[p.axis] + p.hi[p.axis]);
            Cell a{p.lo, p.hi}, b{p.lo, p.hi};
            a.hi[p.axis] = mid;
            b.lo[p.axis] = mid;
            a.id = next_id++;
            b.id = next_id++;
            own_vals.push_back(p.child_value[0]);
            own_vals.push_back(p.child_value[1]);
            kids.push_back(std::move(a));
            kids.push_back(std::move(b));
        }
        std::vector<Cell*> todo;
        for (Cell& c : kids) todo.push_back(&c);
        std::vector<std::int64_t> kid_evals(kids.size(), 0);
        run_cells(todo, own_vals, I, kid_evals, opt.policy);
        for (std::int64_t e : kid_evals) evals += e;
        for (std::size_t pi : parents) {
            total -= cells[pi].value;
            err -= cells[pi].error;
            cells[pi].lo.clear();
            cells[pi].hi.clear();
            cells[pi].value = cells[pi].error = 0.0;
        }
        for (Cell& c : kids) {
            total += c.value;
            err += c.error;
            cells.push_back(std::move(c));
            heap.push(cells.size() - 1);
        }
        if (++rounds % 64 == 0) totals(total, err);
    }
    totals(total, err);

    // Final reduction in creation order.
    KahanSum sv, se;
    for (const Cell& c : cells) {
        if (c.lo.empty()) continue;
        sv.add(c.value);
        se.add(c.error);
        if (opt.trace) opt.trace->push_back({c.lo, c.hi, c.value, c.error});
    }
    res.value = sv.value();
    res.error_estimate = se.value();
    res.evaluations = evals;
    return res;
}

QuadratureResult integrate_ball(const PointFn& f, std::span<const double> center, double radius,
                                const std::optional<SingularWeight>& weight,
                                const QuadratureOptions& opt) {
    const int d = int(center.size());
    if (d < 1) throw DimensionError("ball needs dim >= 1");
    if (!(radius > 0.0)) throw DomainError("radius must be positive");
    std::vector<double> c(center.begin(), center.end());
    if (d == 1) {
        Box b{{c[0] - radius}, {c[0] + radius}};
        return integrate_box(f, b, weight, opt);
    }
    if (weight && !(weight->exponent > -d)) throw NonIntegrableHint("weight exponent must exceed -dim");

    // When the weight sits at the ball centre, rho = radius * s^(1/lam') with
    // lam' = exponent + d turns rho^(lam'-1) d rho into a constant times ds.
    bool centred = false;
    double lam = 0.0;
    if (weight) {
        centred = true;
        for (int i = 0; i < d; ++i) centred = centred && weight->center[i] == c[i];
        lam = weight->exponent + d;
    }

    // (rho, theta_1..theta_{d-2}, phi) -> x
    auto to_x = [c, d](double rho, std::span<const double> s, std::vector<double>& x,
                       double& ang) {
        double prod = rho;
        ang = 1.0;
        for (int i = 0; i < d - 2; ++i) {
            x[i] = c[i] + prod * std::cos(s[1 + i]);
            ang *= std::pow(std::sin(s[1 + i]), d - 2 - i);
            prod *= std::sin(s[1 + i]);
        }
        x[d - 2] = c[d - 2] + prod * std::cos(s[d - 1]);
        x[d - 1] = c[d - 1] + prod * std::sin(s[d - 1]);
    };

    PointFn g = [&](std::span<const double> s) {
        std::vector<double> x(d);
        double ang = 0.0;
        double rho, radial;
        if (centred) {
            rho = radius * std::pow(s[0], 1.0 / lam);
            radial = std::pow(radius, lam) / lam;
        } else {
            rho = s[0];
            radial = std::pow(rho, d - 1);
        }
        to_x(rho, s, x, ang);
        if (ang == 0.0 || radial == 0.0) return 0.0;
        double v = f(x);
        if (!std::isfinite(v)) return 0.0;
        if (weight && !centred) {
            double r2 = 0.0;
            for (int i = 0; i < d; ++i) {
                const double t = x[i] - weight->center[i];
                r2 += t * t;
            }
            if (r2 == 0.0) return 0.0;
            v *= std::pow(r2, 0.5 * weight->exponent);
        }
        return v * radial * ang;
    };

    Box b;
    b.lo.assign(d, 0.0);
    b.hi.assign(d, std::numbers::pi);
    b.hi[0] = centred ? 1.0 : radius;
    b.hi[d - 1] = 2.0 * std::numbers::pi;

    QuadratureOptions o = opt;
    o.hints.clear();
    // Map point singularities (weight center, integrand hints) into the parameter box.
    auto map_hint = [&](const std::vector<double>& p, double power) {
        std::vector<double> v(d);
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) {
            v[i] = p[i] - c[i];
            r2 += v[i] * v[i];
        }
        const double rho = std::sqrt(r2);
        if (rho == 0.0 || rho > radius) return;
        std::vector<double> s(d);
        s[0] = centred ? std::pow(rho / radius, lam) : rho;
        double rest = rho;
        for (int i = 0; i < d - 2; ++i) {
            s[1 + i] = std::acos(std::clamp(v[i] / rest, -1.0, 1.0));
            rest *= std::sin(s[1 + i]);
        }
        double phi = std::atan2(v[d - 1], v[d - 2]);
        if (phi < 0) phi += 2.0 * std::numbers::pi;
        s[d - 1] = phi;
        o.hints.push_back({s, std::max(power, -d + 1e-9)});
    };
    if (weight && !centred) map_hint(weight->center, weight->exponent);
    for (const PointHint& h : opt.hints) map_hint(h.at, h.power);
    return integrate_box(g, b, std::nullopt, o);
}

PointFn reduce_cylindrical(CylindricalProfile g, int n) {
    if (n < 2) throw DimensionError("cylindrical reduction needs n >= 2");
    const double sigma = sphere_area(n - 2);
    return [g = std::move(g), sigma, n](std::span<const double> s) {
        const double r = s[0];
        return sigma * std::pow(r, n - 2) * g(r, s.subspan(1));
    };
}

double transverse_factor_bound(std::span<const double> x_prime, std::span<const double> y_prime,
                               int n, int k, double lambda, double C) {
    if (k >= n) throw DimensionError("transverse factor needs k < n");
    if (x_prime.size() != y_prime.size()) throw DimensionError("x' and y' differ in dimension");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x_prime.size(); ++i) {
        const double t = x_prime[i] - y_prime[i];
        d2 += t * t;
    }
    const double delta = std::sqrt(d2);
    if (delta >= 2.0) return C;
    if (delta == 0.0) {
        if (lambda < k) return C * (1.0 + 1.0 / (k - lambda));
        return inf;
    }
    const double top = 2.0 / delta;
    if (lambda == k) return C * (1.0 + std::log(top));
    const double e = lambda - k;
    return C * (1.0 + (std::pow(top, e) - 1.0) / e);
}

namespace {
// sum_{l > L} l x^(l-1) = ((L+1) x^L (1-x) + x^(L+1)) / (1-x)^2
double weighted_geometric_tail(double x, int L) {
    return ((L + 1) * std::pow(x, L) * (1.0 - x) + std::pow(x, L + 1)) / ((1.0 - x) * (1.0 - x));
}
} // namespace

double TailEnvelope::at(int l) const {
    return l * (std::pow(rho, theta * (l - 1)) + std::pow(rho, l - 1));
}

double TailEnvelope::sum_after(int L) const {
    return weighted_geometric_tail(std::pow(rho, theta), L) + weighted_geometric_tail(rho, L);
}

void attach_tail(StratifiedResult& r, const TailEnvelope& env) {
    if (!(env.theta > 0.0))
        throw TailDivergence("tail envelope exponent must be positive");
    const int L = int(r.per_generation.size());
    double cmax = 0.0;
    for (int l = 1; l <= L; ++l)
        cmax = std::max(cmax, std::fabs(r.per_generation[l - 1]) / env.at(l));
    r.tail_constant = 2.0 * cmax;
    r.tail_bound = r.tail_constant * env.sum_after(L);
    r.tail_label = "calibrated";
    if (L < 2) {
        r.tail_estimate = L > 0 ? r.per_generation[0] / env.at(1) * env.sum_after(1) : 0.0;
        return;
    }
    // Fit s_l = (A + B l) x^l through the last two generations and sum the rest.
    const double x = std::pow(env.rho, env.theta);
    const double uL = r.per_generation[L - 1] / std::pow(x, L);
    const double uP = r.per_generation[L - 2] / std::pow(x, L - 1);
    const double B = std::max(0.0, uL - uP);
    const double xL = std::pow(x, L);
    r.tail_estimate = uL * xL * x / (1.0 - x) + B * xL * x / ((1.0 - x) * (1.0 - x));
}

StratifiedResult integrate_gap_stratified(const PointFn& f, int n, const CantorSet& cantor,
                                          const std::optional<SingularWeight>& weight,
                                          int max_generation, double envelope_theta,
                                          const QuadratureOptions& opt) {
    if (n < 2) throw DimensionError("stratified quadrature needs n >= 2");
    if (max_generation < 1) throw DomainError("max_generation must be at least 1");
    if (!(envelope_theta > 0.0))
        throw TailDivergence("tail envelope exponent must be positive");
    if (weight && int(weight->center.size()) != n) throw DimensionError("weight center dimension");

    StratifiedResult res;
    res.per_generation.assign(max_generation, 0.0);
    std::vector<GapInterval> gaps = enumerate_gaps(cantor, max_generation);

    PointFn reduced;
    std::optional<SingularWeight> w2;
    if (n == 2) {
        reduced = f;
        w2 = weight;
    } else {
        // f(x) with x = (r, 0, ..., 0, t); the weight must sit on the axis.
        if (weight) {
            for (int i = 0; i + 1 < n; ++i)
                if (weight->center[i] != 0.0)
                    throw DimensionError("cylindrical reduction needs an on-axis weight center");
            w2 = SingularWeight{{0.0, weight->center[n - 1]}, 0.0};
        }
        auto g = [f, n, weight](double r, std::span<const double> rest) {
            std::vector<double> x(n, 0.0);
            x[0] = r;
            x[n - 1] = rest[0];
            double v = f(x);
            if (weight) {
                const double dt = rest[0] - weight->center[n - 1];
                const double r2 = r * r + dt * dt;
                v = r2 > 0.0 ? v * std::pow(r2, 0.5 * weight->exponent) : 0.0;
            }
            return v;
        };
        reduced = reduce_cylindrical(g, n);
        w2.reset();
    }

    for (const GapInterval& g : gaps) {
        QuadratureOptions o = opt;
        Box b;
        if (n == 2) {
            b = Box{{-0.25, g.lo()}, {0.25, g.hi()}};
            o.hints.push_back({{0.0, g.lo()}, -1.0});
            o.hints.push_back({{0.0, g.hi()}, -1.0});
        } else {
            b = Box{{0.0, g.lo()}, {0.25, g.hi()}};
            o.hints.push_back({{0.0, g.lo()}, -1.0});
            o.hints.push_back({{0.0, g.hi()}, -1.0});
            if (weight) o.hints.push_back({{0.0, weight->center[n - 1]}, -1.0});
        }
        const QuadratureResult q = integrate_box(reduced, b, w2, o);
        res.per_generation[g.l - 1] += q.value;
        res.error_estimate += q.error_estimate;
        res.evaluations += q.evaluations;
        res.budget_exceeded = res.budget_exceeded || q.budget_exceeded;
    }
    KahanSum s;
    for (double v : res.per_generation) s.add(v);
    res.value = s.value();
    attach_tail(res, TailEnvelope{cantor.scale_ratio(), envelope_theta});
    return res;
}

} // namespace morreylab
