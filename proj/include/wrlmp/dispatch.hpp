#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrlmp/lp.hpp"
#include "wrlmp/network.hpp"
#include "wrlmp/ptdf.hpp"
#include "wrlmp/risk.hpp"

namespace wrlmp {

enum class DispatchMode { Edc, WrbEdc };
enum class FocMode { Fixed, Optimized };

struct DispatchConfig {
    DispatchMode mode = DispatchMode::WrbEdc;
    FocMode foc_mode = FocMode::Fixed;
    double uniform_foc = 1.0;                  // fixed mode default for every at-risk line
    std::map<std::string, double> fixed_foc;   // per-line overrides, fixed mode
    bool allow_shedding = false;
    std::string slack;                         // empty: first bus in file order
    bool paper_literal_objective = false;

    double foc_for(const std::string& line_id) const;
};

// Primal dispatch plus the dual set needed for pricing. Vectors follow case
// order (buses, lines, generators as listed in the file).
struct DispatchSolution {
    LpStatus status = LpStatus::NumericalFailure;
    double objective = 0.0;

    std::vector<std::string> bus_ids, line_ids, gen_ids;
    Eigen::VectorXd generation;   // per generator
    Eigen::VectorXd injections;   // per bus
    Eigen::VectorXd flows;        // per line
    Eigen::VectorXd shed_ratio;   // per bus, 1 where no r variable exists
    Eigen::VectorXd foc;          // per line, 1 for lines not at risk

    double lambda = 0.0;          // balance dual
    Eigen::VectorXd mu_upper;     // per line, >= 0
    Eigen::VectorXd mu_lower;     // per line, >= 0
    Eigen::VectorXd cap_dual_a;   // per line: sum_j mu_cap_j * a_j (optimized mode)
    Eigen::VectorXd eff_upper;    // per line effective limit after FOC scaling
    Eigen::VectorXd eff_lower;

    std::vector<bool> line_at_risk;
    std::vector<bool> bus_has_r;
    Eigen::VectorXd voll;         // per bus ($/MWh), 0 where no r variable

    FocMode foc_mode = FocMode::Fixed;

    std::vector<std::string> binding_lines(double tol = 1e-6) const;
};

LpProblem build_edc(const NetworkCase& c);

LpProblem build_wrb_edc(const NetworkCase& c, const RiskProfile& risk,
                        const DispatchConfig& config, const PtdfMatrix& ptdf);

DispatchSolution solve_dispatch(const NetworkCase& c, const RiskProfile& risk,
                                const DispatchConfig& config);

// JSON rendering of a solution (full precision, deterministic key order).
// Pass per-bus prices to populate the lmps block.
std::string solution_to_json(const DispatchSolution& s, const Eigen::VectorXd* lmps = nullptr);

}  // namespace wrlmp
