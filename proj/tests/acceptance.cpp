// Acceptance suite: one PASS/FAIL line per criterion.
#include "morreylab/cantor.hpp"
#include "morreylab/fields.hpp"
#include "morreylab/norms.hpp"
#include "morreylab/params.hpp"
#include "morreylab/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace morreylab;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

double criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s <= limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %2d: %s  %s  [%s] %.1fs (limit %.0fs)%s\n", id, pass ? "PASS" : "FAIL", title,
                o.detail.c_str(), s, limit_s, in_time ? "" : " TIMEOUT");
    std::fflush(stdout);
    return s;
}

bool check_named(const Report& r, const std::string& name, std::ostringstream& d) {
    for (const auto& c : r.checks)
        if (c.name == name) {
            d << name << "=" << (c.pass ? "ok" : "fail") << " ";
            return c.pass;
        }
    d << name << "=missing ";
    return false;
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

} // namespace

int main() {
    const std::uint64_t seed = 0xC0FFEE;

    criterion(1, "Cantor gap measure and distance enclosures", 5, [&] {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.02, 0.98), ut(-0.6, 0.6);
        std::vector<GapFraction> gs{GapFraction::from_gamma(1.0 / 3.0), GapFraction::from_gamma(0.5)};
        std::uniform_int_distribution<int> uk(1, 3);
        for (int i = 0; i < 20; ++i) {
            const int k = uk(rng);
            const double lambda = k - u(rng);
            gs.push_back(GapFraction::from_codimension(k - lambda));
        }
        double worst = 0.0;
        for (const auto& g : gs)
            worst = std::max(worst, std::fabs(gap_measure_partial_sum(CantorSet(g), 40) - (1.0 - std::pow(g.complement, 40))));
        int bad = 0;
        for (double gamma : {1.0 / 3.0, 0.5}) {
            const CantorSet set(gamma);
            const double slack = 0.5 * std::pow(set.scale_ratio(), 16) + 1e-15;
            std::vector<double> ts(10000);
            for (double& t : ts) t = ut(rng);
            const auto oracle = brute_force_distance_oracle(set, ts, 16);
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const auto e = distance_1d(set, ts[i]);
                bad += oracle[i] < e.lower - slack || oracle[i] > e.upper + slack;
            }
        }
        return Outcome{worst <= 1e-12 && bad == 0,
                       fmt("max gap error %.2e, enclosure violations %.0f of 20000", worst, bad)};
    });

    criterion(2, "Hausdorff dimension round trip", 1, [&] {
        std::mt19937_64 rng(seed + 1);
        std::uniform_real_distribution<double> u(1e-3, 1.0 - 1e-3);
        std::uniform_int_distribution<int> uk(1, 3);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const int k = uk(rng);
            const double lambda = k - u(rng);
            worst = std::max(worst, std::fabs(hausdorff_dimension(GapFraction::from_codimension(k - lambda)) - (k - lambda)));
        }
        return Outcome{worst < 1e-12, fmt("max error %.2e over 100 lambda", worst)};
    });

    criterion(3, "Cantor-generation divergence ratio", 60, [&] {
        // q = 1 keeps the 4^alpha offset of the field small against the d^(-alpha) term
        const double q = 1.0;
        SearchOptions opt;
        opt.generations = 13;
        const auto P = derive(2, 1.2, 1.5, std::nullopt, 1.5 / q);
        const auto crit = lq_partial_sums(counterexample_fractal(P), q, opt);
        const double analytic = 2.0 * std::pow(P.gamma().complement / 2.0, 2 - 1.5);
        double lo = 1e300, hi = -1e300;
        for (int l = 6; l <= 12; ++l) {
            lo = std::min(lo, crit.ratios[l - 2]);
            hi = std::max(hi, crit.ratios[l - 2]);
        }
        const auto Ps = derive(2, 1.2, 1.5, std::nullopt, (1.5 + 0.2) / q);
        const auto super = lq_partial_sums(counterexample_fractal(Ps), q, opt);
        double slo = 1e300;
        for (int l = 6; l <= 12; ++l) slo = std::min(slo, super.ratios[l - 2]);
        std::ostringstream d;
        d << "alpha q = lambda: ratios l=6..12 in [" << lo << ", " << hi << "], analytic " << analytic
          << "; alpha q = lambda + 0.2: min ratio " << slo << (super.diverged ? " DIVERGED" : " finite");
        return Outcome{lo >= 0.98 && hi <= 1.02 && std::fabs(analytic - 1.0) < 1e-12 && slo > 1.05 && super.diverged,
                       d.str()};
    });

    criterion(4, "triple norm bounded, stable and axis-maximal", 120, [&] {
        const auto P = derive(2, 1.2, 1.5, 6.3, 1.5 / 6.3);
        const auto f = counterexample_fractal(P);
        SearchOptions a;
        a.generations = 10;
        const auto base = triple_norm(f, P, a);
        SearchOptions b = a;
        b.generations = 14;
        b.audit_points = 0;
        const auto deep = triple_norm(f, P, b);
        SearchOptions c = b;
        c.axis_points = 129;
        const auto fine = triple_norm(f, P, c);
        const double dl = std::fabs(deep.power_value / base.power_value - 1.0);
        const double dg = std::fabs(fine.power_value / deep.power_value - 1.0);
        std::ostringstream d;
        d << "value " << base.power_value << " (L=10), " << deep.power_value << " (L=14), " << fine.power_value
          << " (L=14, 129 pts); changes " << dl << ", " << dg << "; audit " << (base.audit_passed ? "ok" : "exceeded");
        return Outcome{std::isfinite(base.power_value) && dl < 0.01 && dg < 0.01 && base.audit_passed, d.str()};
    });

    criterion(5, "Morrey norm <= triple norm on every registry field", 120, [&] {
        const auto r = run_scenario("ordering", {});
        std::ostringstream d;
        bool ok = r.checks.size() == 5;
        for (const auto& c : r.checks) ok = check_named(r, c.name, d) && ok;
        return Outcome{ok, d.str()};
    });

    criterion(6, "radial closed forms and p2 shell flatness", 30, [&] {
        RunConfig cfg;
        cfg.q = "0.95p2";
        const auto r = run_scenario("radial", cfg);
        std::ostringstream d;
        bool ok = check_named(r, "morrey_closed_form", d);
        ok = check_named(r, "triple_closed_form", d) && ok;
        ok = check_named(r, "p2_shells_flat", d) && ok;
        return Outcome{ok, d.str()};
    });

    criterion(7, "radial dichotomy at q = p2", 60, [&] {
        RunConfig below, at;
        below.q = "0.95p2";
        at.q = "p2";
        std::ostringstream d;
        bool ok = check_named(run_scenario("radial", below), "embedding_ratio", d);
        ok = check_named(run_scenario("radial", at), "embedding_fails", d) && ok;
        return Outcome{ok, d.str()};
    });

    for (auto [id, name, title, limit] :
         {std::tuple{8, "monotonicity", "monotonicity scans non-increasing", 30.0},
          std::tuple{9, "rearrangement", "rearrangement inequality", 1.0},
          std::tuple{10, "adams", "Adams splitting and homogeneity", 30.0}}) {
        criterion(id, title, limit, [name = std::string(name)] {
            const auto r = run_scenario(name, {});
            std::ostringstream d;
            for (const auto& c : r.checks) check_named(r, c.name, d);
            return Outcome{r.passed() && !r.checks.empty(), d.str()};
        });
    }

    // limit: twice the criterion 4 bound
    criterion(11, "deterministic optimality report", 240, [&] {
        const auto a = run_scenario("optimality", {}).to_json().dump(2);
        const auto b = run_scenario("optimality", {}).to_json().dump(2);
        return Outcome{a == b, fmt("%.0f bytes, identical=%.0f", double(a.size()), double(a == b))};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
