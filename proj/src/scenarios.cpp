#include "morreylab/scenarios.hpp"

#include "morreylab/cantor.hpp"
#include "morreylab/errors.hpp"
#include "morreylab/fields.hpp"
#include "morreylab/norms.hpp"
#include "morreylab/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace morreylab {

using json = nlohmann::ordered_json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::int64_t resolve_budget(const RunConfig& cfg) {
    if (cfg.budget) return *cfg.budget;
    if (const char* env = std::getenv("MORREYLAB_BUDGET")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end == env || *end != '\0' || v <= 0) throw ConfigError("MORREYLAB_BUDGET must be a positive integer");
        return v;
    }
    return default_budget;
}

double parse_exponent(const std::string& text, double p1, double p2) {
    std::string s;
    for (char c : text)
        if (c != ' ' && c != '*') s += c;
    if (s.empty()) throw ConfigError("empty exponent");
    double base = 1.0;
    std::string coef = s;
    if (s.size() >= 2 && (s.ends_with("p1") || s.ends_with("p2"))) {
        base = s.back() == '1' ? p1 : p2;
        coef = s.substr(0, s.size() - 2);
        if (coef.empty()) return base;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(coef, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse exponent '" + text + "'");
    }
    if (used != coef.size()) throw ConfigError("cannot parse exponent '" + text + "'");
    return v * base;
}

void Table::write_csv(std::ostream& out) const {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt(r[i]);
        out << "\n";
    }
}

json Table::to_json() const {
    json rs = json::array();
    for (const auto& r : rows) {
        json row = json::array();
        for (double v : r) row.push_back(num(v));
        rs.push_back(row);
    }
    return {{"columns", columns}, {"rows", rs}};
}

Table Table::from_json(const json& j) {
    Table t;
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
        std::vector<double> row;
        for (const auto& v : r) row.push_back(v.is_null() ? std::nan("") : v.get<double>());
        t.rows.push_back(std::move(row));
    }
    return t;
}

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

json Report::to_json() const {
    json j;
    j["scenario"] = scenario;
    j["passed"] = passed();
    j["environment"] = environment;
    json cs = json::array();
    for (const auto& c : checks)
        cs.push_back({{"name", c.name},
                      {"claim", c.claim},
                      {"source", c.source},
                      {"computed", c.computed},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
    j["checks"] = cs;
    json tr = json::object();
    for (const auto& [name, t] : traces) tr[name] = t.to_json();
    j["traces"] = tr;
    return j;
}

namespace {

struct Context {
    const RunConfig& cfg;
    std::int64_t budget;
    int generations;
    double rel_tol;
    Report report;

    SearchOptions search() const {
        SearchOptions o;
        o.generations = generations;
        o.budget = budget;
        o.rel_tol = rel_tol;
        o.seed = cfg.seed;
        return o;
    }
    void add(std::string name, std::string claim, std::string source, json computed, json tol, bool pass) {
        report.checks.push_back({std::move(name), std::move(claim), std::move(source), std::move(computed),
                                 std::move(tol), pass});
    }
    void trace(std::string name, Table t) { report.traces.emplace_back(std::move(name), std::move(t)); }
};

json params_json(const MorreyParams& P) {
    json j{{"n", P.n}, {"p", P.p}, {"lambda", P.lambda}, {"k", P.k}, {"p1", num(P.p1)}, {"p2", num(P.p2)}};
    j["q"] = P.q ? num(*P.q) : json(nullptr);
    j["alpha"] = P.alpha ? num(*P.alpha) : json(nullptr);
    return j;
}

Table profile(const NormEstimate& e) {
    Table t{{"t", "value"}, {}};
    for (const auto& c : e.candidates)
        if (!c.y.empty()) {
            bool axis = true;
            for (std::size_t i = 0; i + 1 < c.y.size(); ++i) axis = axis && c.y[i] == 0.0;
            if (axis) t.rows.push_back({c.y.back(), c.value});
        }
    std::sort(t.rows.begin(), t.rows.end());
    return t;
}

// ratio at generation l is contribution(l) / contribution(l - 1)
Table generations_table(const NormEstimate& e) {
    Table t{{"l", "contribution", "ratio"}, {}};
    for (std::size_t i = 0; i < e.trace.size(); ++i)
        t.rows.push_back({double(i + 1), e.trace[i], i >= 1 && i - 1 < e.ratios.size() ? e.ratios[i - 1] : std::nan("")});
    return t;
}

json last_ratios(const NormEstimate& e, int k) {
    json a = json::array();
    const std::size_t n = e.ratios.size();
    for (std::size_t i = n > std::size_t(k) ? n - k : 0; i < n; ++i) a.push_back(e.ratios[i]);
    return a;
}

json estimate_summary(const NormEstimate& e) {
    json j;
    j["value"] = e.diverged ? json("DIVERGED") : num(e.value);
    j["power_value"] = e.diverged ? json(nullptr) : num(e.power_value);
    j["error_estimate"] = num(e.error_estimate);
    j["witness"] = {{"y", e.witness_y}, {"r", e.witness_r ? num(*e.witness_r) : json(nullptr)}};
    if (!e.audit.empty()) j["audit_passed"] = e.audit_passed;
    j["evaluations"] = e.evaluations;
    return j;
}

void ordering_check(Context& ctx, const std::string& label, const NormEstimate& m, const NormEstimate& t) {
    const double tol = m.error_estimate + t.error_estimate;
    ctx.add("ordering_" + label, "Morrey norm of the gradient is at most its triple norm",
            "the Morrey norm is dominated by the weighted triple norm",
            {{"morrey_p", num(m.power_value)}, {"triple_p", num(t.power_value)}},
            {{"abs", num(tol)}}, m.power_value <= t.power_value + tol);
}

// ---- scenarios --------------------------------------------------------------

void cantor_geometry(Context& ctx) {
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> u(0.02, 0.98);

    std::vector<GapFraction> gs{GapFraction::from_gamma(1.0 / 3.0), GapFraction::from_gamma(0.5)};
    for (int i = 0; i < 20; ++i) gs.push_back(GapFraction::from_codimension(u(rng)));
    double worst = 0.0;
    for (const auto& g : gs)
        worst = std::max(worst, std::fabs(gap_measure_partial_sum(CantorSet(g), 40) - (1.0 - std::pow(g.complement, 40))));
    ctx.add("gap_measure", "gap lengths up to generation 40 sum to 1 - (1 - gamma)^40",
            "geometric series of removed gap lengths", {{"max_abs_error", worst}, {"sets", gs.size()}},
            {{"abs", 1e-12}}, worst < 1e-12);

    const CantorSet half(0.5);
    const int depth = 16;
    const double slack = 0.5 * std::pow(half.scale_ratio(), depth) + 1e-15;
    std::uniform_real_distribution<double> ut(-0.6, 0.6);
    std::vector<double> ts(10000);
    for (double& t : ts) t = ut(rng);
    const auto oracle = brute_force_distance_oracle(half, ts, depth);
    int bad = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const Enclosure e = distance_1d(half, ts[i]);
        if (oracle[i] < e.lower - slack || oracle[i] > e.upper + slack) ++bad;
    }
    ctx.add("distance_enclosure", "distance enclosures contain the explicit-removal oracle",
            "distance to the Cantor set via its self-similar maps", {{"points", 10000}, {"violations", bad}},
            {{"depth", depth}, {"abs", slack}}, bad == 0);

    std::uniform_int_distribution<int> uk(1, 3);
    double dworst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int k = uk(rng);
        const double lambda = k - u(rng);
        const auto g = GapFraction::from_codimension(k - lambda);
        dworst = std::max(dworst, std::fabs(hausdorff_dimension(g) - (k - lambda)));
    }
    ctx.add("hausdorff_round_trip", "dim C_gamma(k, lambda) = k - lambda",
            "Hausdorff dimension of self-similar sets", {{"max_abs_error", dworst}}, {{"abs", 1e-12}},
            dworst < 1e-12);

    double gamma = 0.5;
    if (ctx.cfg.lambda) {
        const double k = std::ceil(*ctx.cfg.lambda);
        gamma = GapFraction::from_codimension(k - *ctx.cfg.lambda).value;
    }
    const auto gaps = enumerate_gaps(CantorSet(gamma), 4);
    ctx.add("gap_count", "generations 1..4 contain 15 gaps", "binary structure of the construction",
            {{"gaps", gaps.size()}}, json(nullptr), gaps.size() == 15);
    Table t{{"generation", "m", "center", "lo", "hi"}, {}};
    for (const auto& g : gaps) t.rows.push_back({double(g.l), double(g.m), g.center, g.lo(), g.hi()});
    ctx.trace("gaps", t);
    ctx.report.environment["gamma"] = gamma;
}

MorreyParams optimality_params(const RunConfig& cfg) {
    const int n = cfg.n.value_or(2);
    const double p = cfg.p.value_or(1.2), lambda = cfg.lambda.value_or(1.5);
    const auto base = derive(n, p, lambda);
    const double q = cfg.q ? parse_exponent(*cfg.q, base.p1, base.p2) : 1.05 * base.p1;
    return derive(n, p, lambda, q, cfg.alpha.value_or(lambda / q));
}

void optimality(Context& ctx) {
    const MorreyParams P = optimality_params(ctx.cfg);
    ctx.report.environment["params"] = params_json(P);
    const double q = *P.q, alpha = *P.alpha;
    const auto field = counterexample_fractal(P);
    const auto opt = ctx.search();

    const auto lq = lq_partial_sums(field, q, opt);
    const double analytic = 2.0 * std::pow(P.gamma().complement / 2.0, P.n - alpha * q);
    ctx.add("lq_diverges", "the L^q integral of the counterexample diverges for q above p1",
            "growth of the Cantor-generation contributions",
            {{"status", lq.diverged ? "DIVERGED" : "finite"}, {"last_ratios", last_ratios(lq, ratio_window)},
             {"analytic_ratio", analytic}},
            {{"ratio_floor", 1.0 - ratio_epsilon}, {"window", ratio_window}}, lq.diverged && analytic >= 1.0 - 1e-12);
    ctx.trace("lq_generations", generations_table(lq));

    const auto tri = triple_norm(field, P, opt);
    const bool finite = std::isfinite(tri.power_value) && !tri.diverged;
    ctx.add("triple_finite", "the triple norm of the gradient stays finite",
            "generation-wise bound of the weighted gradient integral", estimate_summary(tri),
            {{"max_rel_error", 0.01}},
            finite && tri.error_estimate <= 0.01 * tri.power_value);
    ctx.add("audit", "no off-axis point beats the axis maximum",
            "reduction of the supremum to the symmetry axis", estimate_summary(tri),
            {{"abs", num(tri.error_estimate)}}, tri.audit_passed);
    ctx.trace("triple_profile", profile(tri));

    const auto mor = morrey_norm(field, P, opt);
    ordering_check(ctx, "fractal", mor, tri);
    ctx.trace("morrey_profile", profile(mor));
}

void radial(Context& ctx) {
    const int n = ctx.cfg.n.value_or(3);
    const double p = ctx.cfg.p.value_or(1.5), lambda = ctx.cfg.lambda.value_or(2.5);
    const auto base = derive(n, p, lambda);
    const double q = ctx.cfg.q ? parse_exponent(*ctx.cfg.q, base.p1, base.p2) : 0.99 * base.p2;
    const double top = (lambda - p) / p;
    const double alpha = ctx.cfg.alpha.value_or(0.5 * top);
    const MorreyParams Pt = derive(n, p, lambda, std::nullopt, alpha);
    json pj = params_json(base);
    pj["q"] = q;
    pj["alpha"] = alpha;
    ctx.report.environment["params"] = pj;
    const double sigma = sphere_area(n - 1);
    auto opt = ctx.search();

    const auto mce = radial_counterexample(base, RadialVariant::morrey);
    const auto mor = morrey_norm(mce, base, opt);
    const double mor_cf = sigma * std::pow(top, p) / (n - lambda);
    const double mor_rel = std::fabs(mor.power_value / mor_cf - 1.0);
    ctx.add("morrey_closed_form", "Morrey^p of the borderline radial field is sigma alpha^p / (n - lambda)",
            "radial Morrey counterexample", {{"computed", mor.power_value}, {"closed_form", mor_cf}, {"rel_error", mor_rel}},
            {{"rel", 1e-4}}, mor_rel < 1e-4);

    const auto tce = radial_counterexample(Pt, RadialVariant::triple);
    const std::vector<double> origin(n, 0.0);
    const double tri0 = triple_integrand(tce, Pt, origin, opt);
    const double tri_cf = sigma * std::pow(alpha, p) / (lambda - alpha * p - p);
    const double tri_rel = std::fabs(tri0 / tri_cf - 1.0);
    const auto tri = triple_norm(tce, Pt, opt);
    ctx.add("triple_closed_form", "triple integrand at y = 0 is sigma alpha^p / (lambda - alpha p - p)",
            "radial triple-norm counterexample",
            {{"computed", tri0}, {"closed_form", tri_cf}, {"rel_error", tri_rel}, {"sup", tri.power_value},
             {"argmax", tri.witness_y}},
            {{"rel", 1e-4}}, tri_rel < 1e-4 && tri.audit_passed);
    ctx.trace("triple_profile", profile(tri));

    const auto shells = lq_partial_sums(mce, base.p2, opt);
    ctx.add("p2_shells_flat", "dyadic shells of |u|^p2 approach a constant and the integral diverges",
            "logarithmic divergence at q = p2",
            {{"status", shells.diverged ? "DIVERGED" : "finite"}, {"last_ratios", last_ratios(shells, ratio_window)}},
            {{"ratio_floor", 1.0 - ratio_epsilon}}, shells.diverged);
    ctx.trace("p2_shells", generations_table(shells));

    const auto lq = lq_partial_sums(mce, q, opt);
    if (q < base.p2) {
        std::vector<double> ratios;
        Table fam{{"beta", "lq", "morrey", "ratio"}, {}};
        SearchOptions fo = opt;
        fo.audit_points = 0;
        for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double beta = f * top;
            const auto Pb = derive(n, p, lambda, std::nullopt, beta);
            const auto rep = check_radial_embedding(radial_counterexample(Pb, RadialVariant::triple), Pb, q, fo);
            const double r = rep.ratio.value_or(std::nan(""));
            ratios.push_back(r);
            fam.rows.push_back({beta, rep.lq.value, rep.morrey.value, r});
        }
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        const bool ok = std::all_of(ratios.begin(), ratios.end(), [](double r) { return std::isfinite(r); });
        ctx.add("embedding_ratio", "||u||_q / ||grad u||_M stays bounded across the power family below p2",
                "radial embedding into L^q for q < p2",
                {{"q", q}, {"min_ratio", num(*lo)}, {"max_ratio", num(*hi)}, {"morrey_ce_lq", estimate_summary(lq)}},
                {{"max_over_min", 20.0}}, ok && !lq.diverged && *hi / *lo < 20.0);
        ctx.trace("embedding_family", fam);
    } else {
        ctx.add("embedding_fails", "the borderline radial field has finite Morrey norm but infinite L^q norm",
                "failure of the radial embedding for q >= p2",
                {{"q", q}, {"lq", estimate_summary(lq)}, {"morrey", estimate_summary(mor)}},
                {{"ratio_floor", 1.0 - ratio_epsilon}}, lq.diverged && std::isfinite(mor.power_value));
    }
    ctx.trace("lq_shells", generations_table(lq));

    const auto chain = check_adams_chain(tce, 50, ctx.cfg.seed);
    ctx.add("adams_chain", "|u(x)| <= I_1|grad u|(x) / sigma_(n-1) at 50 random points",
            "pointwise control of u by the Riesz potential of its gradient",
            {{"max_ratio", chain.max_ratio}}, {{"max", 1.0}}, chain.max_ratio <= 1.0 + 1e-9);
}

void integer(Context& ctx) {
    const int n = ctx.cfg.n.value_or(3);
    const double p = ctx.cfg.p.value_or(1.5), lambda = ctx.cfg.lambda.value_or(2.0);
    const auto base = derive(n, p, lambda);
    const double q = ctx.cfg.q ? parse_exponent(*ctx.cfg.q, base.p1, base.p2) : 1.05 * base.p1;
    const MorreyParams P = derive(n, p, lambda, q, ctx.cfg.alpha.value_or(lambda / q));
    ctx.report.environment["params"] = params_json(P);
    const auto field = counterexample_integer(P);
    const auto opt = ctx.search();

    const auto lq = lq_partial_sums(field, q, opt);
    ctx.add("lq_diverges", "the L^q integral diverges for alpha q >= lambda",
            "divergence of the radial integral transverse to the singular axis",
            {{"status", lq.diverged ? "DIVERGED" : "finite"}, {"alpha_q", *P.alpha * q},
             {"last_ratios", last_ratios(lq, ratio_window)}},
            {{"ratio_floor", 1.0 - ratio_epsilon}}, lq.diverged == (*P.alpha * q >= lambda));
    ctx.trace("lq_shells", generations_table(lq));

    const auto tri = triple_norm(field, P, opt);
    ctx.add("triple_finite", "the triple norm of the gradient stays finite",
            "weighted gradient integral near a line singularity", estimate_summary(tri),
            json(nullptr), std::isfinite(tri.power_value) && tri.audit_passed);
    ctx.trace("triple_profile", profile(tri));
    const auto mor = morrey_norm(field, P, opt);
    ordering_check(ctx, "integer", mor, tri);
}

void monotonicity(Context& ctx) {
    const int n = ctx.cfg.n.value_or(3);
    const double p = ctx.cfg.p.value_or(1.5), lambda = ctx.cfg.lambda.value_or(2.5);
    const auto P = derive(n, p, lambda);
    const double alpha = ctx.cfg.alpha.value_or(0.5 * (lambda - p) / p);
    const double theta = n - lambda;
    ctx.report.environment["params"] = params_json(P);

    Table curve{{"config", "y1", "J", "error"}, {}};
    auto run = [&](int id, const std::string& name, const std::string& claim, const RadialIntegrand& h,
                   std::vector<double> path) {
        const auto s = monotonicity_scan(n, theta, h, path);
        bool ok = true;
        double worst = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            curve.rows.push_back({double(id), s[i].y1, s[i].value, s[i].error});
            if (i == 0) continue;
            const double rise = s[i].value - s[i - 1].value;
            worst = std::max(worst, rise);
            ok = ok && rise <= 2.0 * std::max(s[i].error, s[i - 1].error);
        }
        ctx.add(name, claim, "monotonicity of J in y1 away from the support",
                {{"points", s.size()}, {"max_increase", worst}}, {{"factor", 2.0}}, ok);
    };
    const RadialIntegrand one{[](double) { return 1.0; }, 0.0, 1.0};
    run(0, "unit_ball", "J is non-increasing on [0, 1] for h = 1 on B_1", one, {0.0, 0.25, 0.5, 0.75, 1.0});
    run(1, "beyond_support", "J keeps decreasing for y1 beyond the support", one, {1.0, 1.25, 1.5, 2.0, 3.0});
    const double e = -alpha * p - p;
    const RadialIntegrand h{[e](double r) { return std::pow(r, e); }, e, 1.0};
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> path{0.0};
    for (int i = 0; i < 10; ++i) path.push_back(u(rng));
    std::sort(path.begin(), path.end());
    path.erase(std::unique(path.begin(), path.end()), path.end());
    run(2, "singular_profile", "J(y1) <= J(0) for h = |z|^(-alpha p - p)", h, path);
    ctx.trace("j_curve", curve);
}

void rearrangement(Context& ctx) {
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    std::uniform_int_distribution<int> steps(1, 8);
    int total = 0, held = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<Step> s(steps(rng));
        double v = 4.0;
        for (auto& st : s) {
            v *= u(rng) / 2.0;
            st = {u(rng), v};
        }
        for (double q : {1.5, 2.0, 3.0}) {
            ++total;
            held += check_rearrangement_inequality(s, q).holds;
        }
    }
    ctx.add("random_steps", "int q t^(q-1) phi <= (int phi^(1/q))^q for non-increasing steps",
            "rearrangement inequality for non-increasing functions", {{"cases", total}, {"held", held}},
            {{"abs", 1e-12}}, held == total);
    const Step flat[] = {{1.0, 1.0}};
    const auto eq = check_rearrangement_inequality(flat, 2.0);
    ctx.add("equality_case", "constant phi gives equality", "rearrangement inequality for non-increasing functions",
            {{"lhs", eq.lhs}, {"rhs", eq.rhs}}, {{"abs", 1e-12}}, eq.holds && std::fabs(eq.lhs - eq.rhs) < 1e-12);
    const Step two[] = {{1.0, 2.0}, {1.0, 1.0}};
    const auto tw = check_rearrangement_inequality(two, 2.0);
    ctx.add("two_steps", "phi = 2, 1 with q = 2 gives 5 <= 3 + 2 sqrt 2",
            "rearrangement inequality for non-increasing functions", {{"lhs", tw.lhs}, {"rhs", tw.rhs}},
            {{"abs", 1e-12}},
            tw.holds && std::fabs(tw.lhs - 5.0) < 1e-12 && std::fabs(tw.rhs - (3.0 + 2.0 * std::sqrt(2.0))) < 1e-12);
}

GridFunction disc_grid(int n, double step) {
    const int m = int(std::lround(3.0 / step)) + 1;
    return GridFunction::sample(
        [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s <= 1.0 ? 1.0 : 0.0;
        },
        std::vector<double>(n, -1.5), step, std::vector<int>(n, m));
}

void adams(Context& ctx) {
    const int n = ctx.cfg.n.value_or(2);
    const auto P = derive(n, ctx.cfg.p.value_or(1.2), ctx.cfg.lambda.value_or(1.5));
    ctx.report.environment["params"] = params_json(P);
    const double step = n == 2 ? 1.0 / 32 : 1.0 / 12;
    const auto disc = disc_grid(n, step);
    const std::vector<double> origin(n, 0.0);
    const auto r1 = check_adams_splitting(disc, origin, P);
    ctx.add("indicator", "I_1 f(x) <= 2^n delta M_0 f(x) + C delta^(1 - lambda/p) M_(lambda/p) f(x)",
            "splitting of the Riesz potential at the optimal radius", r1.to_json(), {{"min_slack", 1.0}},
            r1.holds && r1.slack >= 1.0);
    const auto r10 = check_adams_splitting(disc.scaled(10.0), origin, P);
    const double hom = std::max(std::fabs(r10.riesz / (10.0 * r1.riesz) - 1.0), std::fabs(r10.slack / r1.slack - 1.0));
    ctx.add("homogeneity", "scaling f by 10 scales both sides and keeps the slack",
            "homogeneity of I_1 and M_beta", {{"max_rel_deviation", hom}}, {{"rel", 1e-10}}, hom <= 1e-10);

    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> uc(-0.8, 0.8), ur(0.2, 0.6), ua(0.5, 2.0), ux(-0.5, 0.5);
    std::uniform_int_distribution<int> ub(1, 4);
    Table t{{"case", "riesz", "near_bound", "far_bound", "slack"}, {}};
    int held = 0;
    double min_slack = inf;
    for (int i = 0; i < 20; ++i) {
        struct Bump {
            std::vector<double> c;
            double r, a;
        };
        std::vector<Bump> bumps(ub(rng));
        for (auto& b : bumps) {
            b.c.resize(n);
            for (double& v : b.c) v = uc(rng);
            b.r = ur(rng);
            b.a = ua(rng);
        }
        const auto f = GridFunction::sample(
            [&bumps](std::span<const double> x) {
                double s = 0.0;
                for (const auto& b : bumps) {
                    double d2 = 0.0;
                    for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - b.c[k]) * (x[k] - b.c[k]);
                    const double t2 = d2 / (b.r * b.r);
                    if (t2 < 1.0) s += b.a * (1.0 - t2) * (1.0 - t2);
                }
                return s;
            },
            std::vector<double>(n, -1.5), step, std::vector<int>(n, int(std::lround(3.0 / step)) + 1));
        std::vector<double> x(n);
        for (double& v : x) v = ux(rng);
        const auto r = check_adams_splitting(f, x, P);
        held += r.holds;
        min_slack = std::min(min_slack, r.slack);
        t.rows.push_back({double(i), r.riesz, r.near_bound, r.far_bound, r.slack});
    }
    ctx.add("random_bumps", "the splitting bound holds for 20 random bump sums",
            "splitting of the Riesz potential at the optimal radius", {{"held", held}, {"min_slack", min_slack}},
            json(nullptr), held == 20);
    ctx.trace("adams_bumps", t);
}

void ordering(Context& ctx) {
    auto opt = ctx.search();
    Table t{{"field", "morrey_p", "triple_p"}, {}};
    int idx = 0;
    auto one = [&](const std::string& id, const MorreyParams& P) {
        const auto f = make_field(id, P);
        const auto m = morrey_norm(f, P, opt);
        NormEstimate tri;
        bool integrable = true;
        try {
            tri = triple_norm(f, P, opt);
        } catch (const NonIntegrableHint&) {
            integrable = false;
        }
        if (integrable) {
            ordering_check(ctx, id, m, tri);
            if (id == "talenti")
                ctx.report.environment["talenti_triple_argmax"] = tri.witness_y;
        } else {
            ctx.add("ordering_" + id, "Morrey norm of the gradient is at most its triple norm",
                    "the Morrey norm is dominated by the weighted triple norm",
                    {{"morrey_p", num(m.power_value)}, {"triple_p", "non-integrable"}}, json(nullptr),
                    std::isfinite(m.power_value));
        }
        t.rows.push_back({double(idx++), m.power_value, integrable ? tri.power_value : inf});
    };
    const auto radial = derive(3, 1.5, 2.5, std::nullopt, 1.0 / 3.0);
    one("radial-triple-ce", radial);
    one("radial-morrey-ce", radial);
    one("talenti", radial);
    one("integer-ce", derive(3, 1.5, 2.0, std::nullopt, 1.0 / 6.0));
    one("fractal-ce", derive(2, 1.2, 1.5, std::nullopt, 1.5 / 6.3));
    ctx.trace("ordering", t);
    ctx.report.environment["fields"] = {"radial-triple-ce", "radial-morrey-ce", "talenti", "integer-ce", "fractal-ce"};
}

const std::map<std::string, std::function<void(Context&)>>& registry() {
    static const std::map<std::string, std::function<void(Context&)>> r{
        {"adams", adams},
        {"cantor-geometry", cantor_geometry},
        {"integer", integer},
        {"monotonicity", monotonicity},
        {"optimality", optimality},
        {"ordering", ordering},
        {"radial", radial},
        {"rearrangement", rearrangement},
    };
    return r;
}

} // namespace

std::vector<std::string> scenario_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
}

Report run_scenario(const std::string& name, const RunConfig& cfg) {
    const auto& r = registry();
    const auto it = r.find(name);
    if (it == r.end()) throw UnknownScenario("unknown scenario '" + name + "'");
    Context ctx{cfg, resolve_budget(cfg), cfg.generations.value_or(12), cfg.rel_tol.value_or(1e-6), {}};
    if (ctx.generations < 6 || ctx.generations > 30) throw ConfigError("generations must lie in [6, 30]");
    if (!(ctx.rel_tol > 0.0)) throw ConfigError("rel-tol must be positive");
    ctx.report.scenario = name;
    ctx.report.environment = {{"version", version},
                              {"seed", cfg.seed},
                              {"budget", ctx.budget},
                              {"rel_tol", ctx.rel_tol},
                              {"generations", ctx.generations}};
    it->second(ctx);
    return ctx.report;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "report.json") << report.to_json().dump(2) << "\n";
    for (const auto& [name, t] : report.traces) {
        std::ofstream out(dir / (name + ".csv"));
        t.write_csv(out);
    }
}

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& report_json,
                                                  const std::filesystem::path& dir) {
    std::ifstream in(report_json);
    if (!in) throw ConfigError("cannot read " + report_json.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out;
    if (!j.contains("traces")) return out;
    for (const auto& [name, tj] : j["traces"].items()) {
        const auto path = dir / (name + ".csv");
        std::ofstream f(path);
        Table::from_json(tj).write_csv(f);
        out.push_back(path);
    }
    return out;
}

SweepResult sweep(const SweepSpec& spec, std::int64_t budget) {
    SweepResult res;
    res.summary.columns = {"n", "lambda", "p", "q", "alpha", "valid", "k", "gamma", "p1", "p2",
                           "dimension", "final_ratio", "diverged"};
    res.ratios.columns = {"row", "generation", "ratio"};
    auto or_nan = [](const std::vector<double>& v) { return v.empty() ? std::vector<double>{std::nan("")} : v; };
    const auto qs = or_nan(spec.q), as = or_nan(spec.alpha);
    const std::int64_t points = std::int64_t(spec.lambda.size()) * std::int64_t(spec.p.size()) *
                                std::int64_t(qs.size()) * std::int64_t(as.size());
    // one fractal partial-sum run is charged 10^4 evaluations
    if (points * 10000 > budget) throw BudgetExceeded("sweep grid exceeds the evaluation budget");
    if (spec.lambda.empty() || spec.p.empty()) return res;
    SearchOptions opt;
    opt.generations = spec.generations;
    for (double lambda : spec.lambda)
        for (double p : spec.p)
            for (double q : qs)
                for (double a : as) {
                    std::vector<double> row{double(spec.n), lambda, p, q, a};
                    const double nan = std::nan("");
                    MorreyParams P;
                    try {
                        P = derive(spec.n, p, lambda);
                    } catch (const Error&) {
                        row.insert(row.end(), {0.0, nan, nan, nan, nan, nan, nan, nan});
                        res.summary.rows.push_back(row);
                        continue;
                    }
                    double gamma = nan, dim = nan;
                    if (!P.lambda_integer) {
                        gamma = P.gamma().value;
                        dim = hausdorff_dimension(P.gamma());
                    }
                    double final_ratio = nan, diverged = nan;
                    if (!P.lambda_integer && P.k == spec.n && std::isfinite(q) && std::isfinite(a) && a * q < spec.n) {
                        const auto Pa = derive(spec.n, p, lambda, std::nullopt, a);
                        const auto lq = lq_partial_sums(counterexample_fractal(Pa), q, opt);
                        final_ratio = lq.ratios.back();
                        diverged = lq.diverged;
                        for (std::size_t l = 0; l < lq.ratios.size(); ++l)
                            res.ratios.rows.push_back({double(res.summary.rows.size()), double(l + 2), lq.ratios[l]});
                    }
                    row.insert(row.end(), {1.0, double(P.k), gamma, P.p1, P.p2, dim, final_ratio, diverged});
                    res.summary.rows.push_back(row);
                }
    return res;
}

} // namespace morreylab
