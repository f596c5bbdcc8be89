#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrlmp/dispatch.hpp"
#include "wrlmp/pricing.hpp"

namespace wrlmp {

struct ScenarioVariant {
    std::string label;
    std::optional<double> uniform_foc;           // fixes every at-risk line
    std::map<std::string, double> foc;           // per-line fixed FOC overrides
    std::map<std::string, double> limits;        // per-line limit overrides (MW)
    std::optional<std::string> outage;           // line id to remove
    std::map<std::string, double> load_delta;    // per-bus MW deltas
};

struct ScenarioSpec {
    std::string base_case;  // informational
    std::vector<ScenarioVariant> variants;
};

struct ScenarioRow {
    std::string label;
    LpStatus status = LpStatus::NumericalFailure;
    bool disconnected = false;
    std::string error;
    double objective = 0.0;
    Eigen::VectorXd generation;
    Eigen::VectorXd flows;  // zero column for an outaged line
    Eigen::VectorXd lmps;
    std::vector<std::string> binding_lines;
};

struct ScenarioReport {
    std::vector<std::string> gen_ids, line_ids, bus_ids;
    std::vector<ScenarioRow> rows;
};

ScenarioSpec load_scenario_spec(const std::string& text);
ScenarioSpec load_scenario_spec_file(const std::string& path);

ScenarioReport run_scenarios(const NetworkCase& c, const RiskProfile& risk,
                             const DispatchConfig& base_config, const ScenarioSpec& spec);

ScenarioReport run_foc_sweep(const NetworkCase& c, const RiskProfile& risk,
                             const DispatchConfig& base_config,
                             const std::vector<double>& foc_values);

ScenarioReport run_n_minus_1(const NetworkCase& c, const RiskProfile& risk,
                             const DispatchConfig& base_config, double foc);

struct PerturbationReport {
    ScenarioReport report;  // rows: base, perturbed
    double delta_objective = 0.0;
    double lmp_at_bus = 0.0;
    double gap = 0.0;  // |delta_objective/delta - lmp|, 0 when delta == 0
};

PerturbationReport run_load_perturbation(const NetworkCase& c, const RiskProfile& risk,
                                         const DispatchConfig& config, const std::string& bus,
                                         double delta_mw);

enum class ReportFormat { Text, Csv, Json };

std::optional<ReportFormat> parse_format(const std::string& token);

// Deterministic rendering; text uses 4 decimals, json full precision.
std::string emit_report(const ScenarioReport& report, ReportFormat format);

}  // namespace wrlmp
