#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace wrlmp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(LpStatus s);

// Linear program in the form
//   minimize c'x  s.t.  Aeq x = beq,  Aineq x <= bineq,  lo <= x <= hi.
// Coefficients are stored sparsely per row; bounds may be +-infinity.
class LpProblem {
public:
    struct Row {
        std::string name;
        std::vector<std::pair<int, double>> coeffs;
        double rhs = 0.0;
    };

    int add_variable(std::string name, double lower, double upper);
    void set_objective(int var, double coeff);
    int add_eq(std::string name, std::vector<std::pair<int, double>> coeffs, double rhs);
    int add_ineq(std::string name, std::vector<std::pair<int, double>> coeffs, double rhs);

    int num_variables() const { return static_cast<int>(names_.size()); }
    int num_eq() const { return static_cast<int>(eq_.size()); }
    int num_ineq() const { return static_cast<int>(ineq_.size()); }
    const std::string& variable_name(int v) const { return names_[v]; }
    double lower(int v) const { return lo_[v]; }
    double upper(int v) const { return hi_[v]; }
    double objective(int v) const { return obj_[v]; }
    const Row& eq(int i) const { return eq_[i]; }
    const Row& ineq(int i) const { return ineq_[i]; }

    // Fixed-width listing of variables, bounds and rows, for debugging.
    std::string dump() const;

private:
    std::vector<std::string> names_;
    std::vector<double> lo_, hi_, obj_;
    std::vector<Row> eq_, ineq_;
};

// Solution with the full dual set. Sign conventions:
//   duals_eq[i]    = d(objective)/d(rhs of equality i)
//   duals_ineq[k] >= 0, with d(objective)/d(rhs of inequality k) = -duals_ineq[k]
struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    Eigen::VectorXd primal;
    Eigen::VectorXd duals_eq;
    Eigen::VectorXd duals_ineq;
    Eigen::VectorXd reduced_costs;
    double objective_value = 0.0;
};

// Bounded-variable two-phase primal simplex, Bland's rule throughout.
// Deterministic: a fixed problem always produces the identical solution.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace wrlmp
