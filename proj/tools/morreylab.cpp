#include "morreylab/cantor.hpp"
#include "morreylab/errors.hpp"
#include "morreylab/fields.hpp"
#include "morreylab/norms.hpp"
#include "morreylab/scenarios.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

using namespace morreylab;

namespace {

void add_params(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--n", cfg.n, "ambient dimension");
    cmd->add_option("--p", cfg.p, "integrability exponent");
    cmd->add_option("--lambda", cfg.lambda, "Morrey exponent");
    cmd->add_option("--q", cfg.q, "target exponent: number or multiple of p1/p2, e.g. 0.99p2");
    cmd->add_option("--alpha", cfg.alpha, "singularity exponent");
}

void add_numerics(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--generations", cfg.generations, "Cantor generations L")->check(CLI::Range(6, 30));
    cmd->add_option("--budget", cfg.budget, "evaluation budget per integral (env MORREYLAB_BUDGET)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--rel-tol", cfg.rel_tol, "relative tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.seed, "RNG seed");
}

int verify(const std::string& name, const RunConfig& cfg, const std::string& out, bool as_json) {
    const auto t0 = std::chrono::steady_clock::now();
    const Report r = run_scenario(name, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.empty()) {
        write_report(r, out);
        std::ofstream(std::filesystem::path(out) / "timing.json")
            << nlohmann::ordered_json{{"scenario", name}, {"seconds", secs}}.dump(2) << "\n";
    }
    if (as_json) {
        std::cout << r.to_json().dump(2) << "\n";
    } else {
        for (const auto& c : r.checks)
            std::cout << (c.pass ? "PASS " : "FAIL ") << name << "/" << c.name << "  " << c.computed.dump() << "\n";
        std::cout << (r.passed() ? "PASS " : "FAIL ") << name << "\n";
    }
    return r.passed() ? 0 : 1;
}

MorreyParams params_for(const RunConfig& cfg) {
    if (!cfg.n || !cfg.p || !cfg.lambda) throw ConfigError("--n, --p and --lambda are required");
    const auto base = derive(*cfg.n, *cfg.p, *cfg.lambda);
    std::optional<double> q;
    if (cfg.q) q = parse_exponent(*cfg.q, base.p1, base.p2);
    return derive(*cfg.n, *cfg.p, *cfg.lambda, q, cfg.alpha);
}

SearchOptions options_for(const RunConfig& cfg) {
    SearchOptions o;
    o.generations = cfg.generations.value_or(12);
    o.rel_tol = cfg.rel_tol.value_or(1e-6);
    o.budget = resolve_budget(cfg);
    o.seed = cfg.seed;
    return o;
}

void write_table(const Table& t, const std::filesystem::path& path) {
    std::ofstream f(path);
    t.write_csv(f);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Morrey-space counterexample verifier"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    RunConfig cfg;
    std::string out;
    bool as_json = false;

    auto* list = app.add_subcommand("list", "list scenarios");

    std::string scenario;
    auto* ver = app.add_subcommand("verify", "run a verification scenario");
    ver->add_option("scenario", scenario, "scenario name")->required();
    add_params(ver, cfg);
    add_numerics(ver, cfg);
    ver->add_option("--out", out, "directory for report.json and trace CSVs");
    ver->add_flag("--json", as_json, "print the full report as JSON");

    SweepSpec spec;
    auto* sw = app.add_subcommand("sweep", "parameter grid over lambda, p, q, alpha");
    sw->add_option("--n", spec.n, "ambient dimension");
    sw->add_option("--lambda", spec.lambda, "lambda values")->delimiter(',');
    sw->add_option("--p", spec.p, "p values")->delimiter(',');
    sw->add_option("--q", spec.q, "q values")->delimiter(',');
    sw->add_option("--alpha", spec.alpha, "alpha values")->delimiter(',');
    sw->add_option("--generations", spec.generations, "Cantor generations L")->check(CLI::Range(6, 30));
    sw->add_option("--budget", cfg.budget, "evaluation budget")->check(CLI::PositiveNumber);
    sw->add_option("--out", out, "directory for summary.csv and ratios.csv");

    std::string kind, field_id;
    auto* nm = app.add_subcommand("norm", "estimate one norm of a registry field");
    nm->add_option("kind", kind, "lebesgue, morrey or triple")
        ->required()
        ->check(CLI::IsMember({"lebesgue", "morrey", "triple"}));
    nm->add_option("--field", field_id, "integer-ce, fractal-ce, radial-morrey-ce, radial-triple-ce, talenti")
        ->required();
    add_params(nm, cfg);
    add_numerics(nm, cfg);

    std::string what;
    double gamma = 0.5, t = 0.0;
    int depth = 4;
    auto* ca = app.add_subcommand("cantor", "Cantor set gaps or distances");
    ca->add_option("what", what, "gaps or dist")->required()->check(CLI::IsMember({"gaps", "dist"}));
    ca->add_option("--gamma", gamma, "gap fraction")->check(CLI::Range(0.0, 1.0));
    ca->add_option("--lambda", cfg.lambda, "derive gamma from a non-integer lambda");
    ca->add_option("--generations", depth, "generations to enumerate")->check(CLI::Range(1, 22));
    ca->add_option("--t", t, "point for dist");

    std::string report_path;
    auto* pd = app.add_subcommand("plotdata", "write the trace CSVs stored in a report.json");
    pd->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
    pd->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& s : scenario_names()) std::cout << s << "\n";
            return 0;
        }
        if (ver->parsed()) return verify(scenario, cfg, out, as_json);
        if (sw->parsed()) {
            const auto res = sweep(spec, resolve_budget(cfg));
            if (out.empty()) {
                res.summary.write_csv(std::cout);
            } else {
                std::filesystem::create_directories(out);
                write_table(res.summary, std::filesystem::path(out) / "summary.csv");
                write_table(res.ratios, std::filesystem::path(out) / "ratios.csv");
            }
            return 0;
        }
        if (nm->parsed()) {
            const auto P = params_for(cfg);
            const auto f = make_field(field_id, P);
            const auto o = options_for(cfg);
            NormEstimate e;
            if (kind == "lebesgue") {
                if (!P.q) throw ConfigError("lebesgue needs --q");
                e = lq_partial_sums(f, *P.q, o);
            } else if (kind == "morrey") {
                e = morrey_norm(f, P, o);
            } else {
                e = triple_norm(f, P, o);
            }
            std::cout << e.to_json().dump(2) << "\n";
            return 0;
        }
        if (ca->parsed()) {
            GapFraction g = GapFraction::from_gamma(gamma);
            if (cfg.lambda) g = GapFraction::from_codimension(std::ceil(*cfg.lambda) - *cfg.lambda);
            const CantorSet set(g);
            if (what == "gaps") {
                Table tb{{"generation", "m", "center", "lo", "hi"}, {}};
                for (const auto& gi : enumerate_gaps(set, depth))
                    tb.rows.push_back({double(gi.l), double(gi.m), gi.center, gi.lo(), gi.hi()});
                tb.write_csv(std::cout);
            } else {
                const auto e = distance_1d(set, t);
                std::cout << nlohmann::ordered_json{{"t", t}, {"lower", e.lower}, {"upper", e.upper}}.dump(2) << "\n";
            }
            return 0;
        }
        if (pd->parsed()) {
            for (const auto& p : emit_plot_data(report_path, out)) std::cout << p.string() << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
