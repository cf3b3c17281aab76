#pragma once
#include "morreylab/params.hpp"
#include "morreylab/quadrature.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace morreylab {

inline constexpr const char* version = "0.1.0";

// Flag values; unset entries fall back to the scenario defaults.
struct RunConfig {
    std::optional<int> n;
    std::optional<double> p, lambda, alpha;
    std::optional<std::string> q; // number or multiple of p1/p2, e.g. "0.99p2"
    std::optional<int> generations;
    std::optional<std::int64_t> budget;
    std::optional<double> rel_tol;
    std::uint64_t seed = 0xC0FFEE;
};

// Budget from the flag, else MORREYLAB_BUDGET, else the default.
std::int64_t resolve_budget(const RunConfig& cfg);

// "2.5", "p2", "0.99p2", "1.05*p1".
double parse_exponent(const std::string& text, double p1, double p2);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    void write_csv(std::ostream& out) const;
    nlohmann::ordered_json to_json() const;
    static Table from_json(const nlohmann::ordered_json& j);
};

struct Check {
    std::string name;
    std::string claim;
    std::string source; // where the claim comes from, in words
    nlohmann::ordered_json computed;
    nlohmann::ordered_json tolerance;
    bool pass = false;
};

struct Report {
    std::string scenario;
    nlohmann::ordered_json environment;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, Table>> traces;

    bool passed() const;
    nlohmann::ordered_json to_json() const;
};

std::vector<std::string> scenario_names();
// Throws UnknownScenario.
Report run_scenario(const std::string& name, const RunConfig& cfg);

// Writes report.json and one CSV per trace into dir.
void write_report(const Report& report, const std::filesystem::path& dir);
// CSV files for every trace stored in a report.json; returns the written paths.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& report_json,
                                                  const std::filesystem::path& dir);

struct SweepSpec {
    int n = 2;
    std::vector<double> lambda, p, q, alpha;
    int generations = 12;
};
struct SweepResult {
    Table summary; // one row per grid point
    Table ratios;  // (row, generation, ratio)
};
// Parameter grid over (lambda, p, q, alpha); throws BudgetExceeded for oversized grids.
SweepResult sweep(const SweepSpec& spec, std::int64_t budget = default_budget);

} // namespace morreylab
