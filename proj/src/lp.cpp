#include "wrlmp/lp.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace wrlmp {

namespace {
constexpr double kFeasTol = 1e-7;
constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-10;
}  // namespace

std::string to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "Optimal";
        case LpStatus::Infeasible: return "Infeasible";
        case LpStatus::Unbounded: return "Unbounded";
        case LpStatus::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

int LpProblem::add_variable(std::string name, double lower, double upper) {
    if (!(lower <= upper))
        throw std::invalid_argument("variable " + name + ": lower bound exceeds upper bound");
    names_.push_back(std::move(name));
    lo_.push_back(lower);
    hi_.push_back(upper);
    obj_.push_back(0.0);
    return static_cast<int>(names_.size()) - 1;
}

void LpProblem::set_objective(int var, double coeff) { obj_.at(var) = coeff; }

int LpProblem::add_eq(std::string name, std::vector<std::pair<int, double>> coeffs, double rhs) {
    for (const auto& [v, _] : coeffs)
        if (v < 0 || v >= num_variables())
            throw std::invalid_argument("constraint " + name + ": undeclared variable index");
    eq_.push_back({std::move(name), std::move(coeffs), rhs});
    return static_cast<int>(eq_.size()) - 1;
}

int LpProblem::add_ineq(std::string name, std::vector<std::pair<int, double>> coeffs, double rhs) {
    for (const auto& [v, _] : coeffs)
        if (v < 0 || v >= num_variables())
            throw std::invalid_argument("constraint " + name + ": undeclared variable index");
    ineq_.push_back({std::move(name), std::move(coeffs), rhs});
    return static_cast<int>(ineq_.size()) - 1;
}

std::string LpProblem::dump() const {
    std::ostringstream os;
    os << std::setprecision(9);
    os << "minimize\n";
    for (int v = 0; v < num_variables(); ++v)
        if (obj_[v] != 0.0)
            os << "  " << std::setw(14) << obj_[v] << " * " << names_[v] << "\n";
    os << "variables\n";
    for (int v = 0; v < num_variables(); ++v)
        os << "  " << std::setw(24) << std::left << names_[v] << std::right << " in ["
           << lo_[v] << ", " << hi_[v] << "]\n";
    auto rows = [&](const std::vector<Row>& rs, const char* rel) {
        for (const auto& r : rs) {
            os << "  " << std::setw(24) << std::left << r.name << std::right << " :";
            for (const auto& [v, c] : r.coeffs) os << " " << c << "*" << names_[v];
            os << " " << rel << " " << r.rhs << "\n";
        }
    };
    os << "subject to (=)\n";
    rows(eq_, "=");
    os << "subject to (<=)\n";
    rows(ineq_, "<=");
    return os.str();
}

namespace {

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

// Internal tableau over structural + slack (+ artificial) columns.
struct Tableau {
    Eigen::MatrixXd a;  // m x nt
    Eigen::VectorXd b;  // m
    Eigen::VectorXd lo, hi, cost, x;
    std::vector<VarState> state;
    std::vector<int> basis;  // size m
    int m = 0;
    int nt = 0;

    Eigen::MatrixXd basis_matrix() const {
        Eigen::MatrixXd bm(m, m);
        for (int i = 0; i < m; ++i) bm.col(i) = a.col(basis[i]);
        return bm;
    }
};

// One simplex phase over the given entering candidates. Returns Optimal when no
// eligible entering column remains, Unbounded on an unblocked ray.
LpStatus run_simplex(Tableau& t, int entering_limit) {
    const int max_iter = 20000 + 200 * (t.m + t.nt);
    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::MatrixXd bm = t.basis_matrix();
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(bm);
        if (t.m > 0) {
            const Eigen::MatrixXd& u = lu.matrixLU();
            for (int i = 0; i < t.m; ++i)
                if (std::abs(u(i, i)) < kPivotTol) return LpStatus::NumericalFailure;
        }
        Eigen::VectorXd cb(t.m);
        for (int i = 0; i < t.m; ++i) cb(i) = t.cost(t.basis[i]);
        Eigen::VectorXd y = t.m > 0 ? Eigen::VectorXd(lu.transpose().solve(cb))
                                    : Eigen::VectorXd(0);

        // Bland: entering = lowest-index eligible column.
        int q = -1;
        double dir = 0.0;
        for (int j = 0; j < entering_limit; ++j) {
            if (t.state[j] == VarState::Basic) continue;
            if (t.lo(j) == t.hi(j)) continue;  // fixed variable never enters
            double d = t.cost(j) - (t.m > 0 ? y.dot(t.a.col(j)) : 0.0);
            if (t.state[j] == VarState::AtLower && d < -kOptTol) { q = j; dir = 1.0; break; }
            if (t.state[j] == VarState::AtUpper && d > kOptTol) { q = j; dir = -1.0; break; }
            if (t.state[j] == VarState::FreeZero && std::abs(d) > kOptTol) {
                q = j;
                dir = d > 0 ? -1.0 : 1.0;
                break;
            }
        }
        if (q < 0) return LpStatus::Optimal;

        Eigen::VectorXd w = t.m > 0 ? Eigen::VectorXd(lu.solve(t.a.col(q)))
                                    : Eigen::VectorXd(0);

        // Ratio test; x_B moves by -dir*step*w, x_q by dir*step.
        double step = kInf;
        int leave = -1;       // index into basis
        double leave_to = 0;  // bound the leaving variable lands on
        for (int i = 0; i < t.m; ++i) {
            const int bj = t.basis[i];
            const double delta = dir * w(i);
            if (delta > kPivotTol) {
                if (t.lo(bj) == -kInf) continue;
                double r = (t.x(bj) - t.lo(bj)) / delta;
                if (r < step - kOptTol || (r < step + kOptTol && (leave < 0 || bj < t.basis[leave]))) {
                    step = std::max(r, 0.0);
                    leave = i;
                    leave_to = t.lo(bj);
                }
            } else if (delta < -kPivotTol) {
                if (t.hi(bj) == kInf) continue;
                double r = (t.hi(bj) - t.x(bj)) / (-delta);
                if (r < step - kOptTol || (r < step + kOptTol && (leave < 0 || bj < t.basis[leave]))) {
                    step = std::max(r, 0.0);
                    leave = i;
                    leave_to = t.hi(bj);
                }
            }
        }
        // The entering variable's opposite bound may block first (bound flip).
        double span = t.hi(q) - t.lo(q);
        bool flip = false;
        if (span < step - kOptTol) {
            step = span;
            flip = true;
        }
        if (step == kInf) return LpStatus::Unbounded;

        for (int i = 0; i < t.m; ++i) t.x(t.basis[i]) -= dir * step * w(i);
        t.x(q) += dir * step;
        if (flip) {
            t.state[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
            continue;
        }
        const int out = t.basis[leave];
        t.x(out) = leave_to;
        t.state[out] = (leave_to == t.lo(out)) ? VarState::AtLower : VarState::AtUpper;
        t.basis[leave] = q;
        t.state[q] = VarState::Basic;
    }
    return LpStatus::NumericalFailure;  // iteration limit; should not happen with Bland
}

}  // namespace

LpSolution solve_lp(const LpProblem& p) {
    const int n = p.num_variables();
    const int me = p.num_eq();
    const int mi = p.num_ineq();
    const int m = me + mi;
    const int nt = n + mi;  // structural + slack

    Tableau t;
    t.m = m;
    t.nt = nt + m;  // + artificials
    t.a = Eigen::MatrixXd::Zero(m, t.nt);
    t.b = Eigen::VectorXd::Zero(m);
    t.lo = Eigen::VectorXd::Zero(t.nt);
    t.hi = Eigen::VectorXd::Zero(t.nt);
    t.cost = Eigen::VectorXd::Zero(t.nt);
    t.x = Eigen::VectorXd::Zero(t.nt);
    t.state.assign(t.nt, VarState::AtLower);

    for (int v = 0; v < n; ++v) {
        t.lo(v) = p.lower(v);
        t.hi(v) = p.upper(v);
    }
    for (int k = 0; k < mi; ++k) {
        t.lo(n + k) = 0.0;
        t.hi(n + k) = kInf;
    }
    for (int i = 0; i < me; ++i) {
        for (const auto& [v, c] : p.eq(i).coeffs) t.a(i, v) += c;
        t.b(i) = p.eq(i).rhs;
    }
    for (int k = 0; k < mi; ++k) {
        const int row = me + k;
        for (const auto& [v, c] : p.ineq(k).coeffs) t.a(row, v) += c;
        t.a(row, n + k) = 1.0;
        t.b(row) = p.ineq(k).rhs;
    }

    // Start nonbasic variables at their nearest finite bound (free ones at 0).
    for (int j = 0; j < nt; ++j) {
        if (t.lo(j) != -kInf) {
            t.x(j) = t.lo(j);
            t.state[j] = VarState::AtLower;
        } else if (t.hi(j) != kInf) {
            t.x(j) = t.hi(j);
            t.state[j] = VarState::AtUpper;
        } else {
            t.x(j) = 0.0;
            t.state[j] = VarState::FreeZero;
        }
    }

    // Phase 1: artificial basis absorbing the residual of each row.
    Eigen::VectorXd residual = t.b;
    for (int j = 0; j < nt; ++j)
        if (t.x(j) != 0.0) residual -= t.a.col(j) * t.x(j);
    t.basis.resize(m);
    for (int i = 0; i < m; ++i) {
        const int aj = nt + i;
        t.a(i, aj) = residual(i) >= 0 ? 1.0 : -1.0;
        t.lo(aj) = 0.0;
        t.hi(aj) = kInf;
        t.cost(aj) = 1.0;
        t.x(aj) = std::abs(residual(i));
        t.state[aj] = VarState::Basic;
        t.basis[i] = aj;
    }

    LpSolution sol;
    if (m > 0) {
        LpStatus ph1 = run_simplex(t, t.nt);
        if (ph1 != LpStatus::Optimal) {
            sol.status = ph1 == LpStatus::Unbounded ? LpStatus::NumericalFailure : ph1;
            return sol;
        }
        double art_sum = 0.0;
        for (int i = 0; i < m; ++i) art_sum += t.x(nt + i) * 1.0;
        if (art_sum > kFeasTol) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Pivot residual artificials out where possible; redundant rows keep a
        // zero-fixed artificial in the basis.
        Eigen::MatrixXd bm = t.basis_matrix();
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(bm);
        for (int i = 0; i < m; ++i) {
            if (t.basis[i] < nt) continue;
            Eigen::VectorXd row = Eigen::VectorXd::Unit(m, i);
            Eigen::VectorXd brow = lu.transpose().solve(row);
            int repl = -1;
            for (int j = 0; j < nt && repl < 0; ++j) {
                if (t.state[j] == VarState::Basic) continue;
                if (std::abs(brow.dot(t.a.col(j))) > 1e-8) repl = j;
            }
            if (repl >= 0) {
                const int art = t.basis[i];
                t.basis[i] = repl;
                t.state[repl] = VarState::Basic;
                t.state[art] = VarState::AtLower;
                t.x(art) = 0.0;
                bm = t.basis_matrix();
                lu.compute(bm);
            }
        }
    }
    for (int i = 0; i < m; ++i) {
        const int aj = nt + i;
        t.cost(aj) = 0.0;
        if (t.state[aj] != VarState::Basic) t.hi(aj) = 0.0;  // never re-enters
        else { t.lo(aj) = 0.0; t.hi(aj) = 0.0; }
    }

    // Phase 2 with the true objective; artificials excluded from entering.
    for (int v = 0; v < n; ++v) t.cost(v) = p.objective(v);
    LpStatus ph2 = run_simplex(t, nt);
    if (ph2 != LpStatus::Optimal) {
        sol.status = ph2;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.primal = t.x.head(n);
    sol.objective_value = 0.0;
    for (int v = 0; v < n; ++v) sol.objective_value += p.objective(v) * t.x(v);

    Eigen::VectorXd y(m);
    if (m > 0) {
        Eigen::MatrixXd bm = t.basis_matrix();
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(bm);
        Eigen::VectorXd cb(m);
        for (int i = 0; i < m; ++i) cb(i) = t.cost(t.basis[i]);
        y = lu.transpose().solve(cb);
    }
    sol.duals_eq = y.head(me);
    sol.duals_ineq = Eigen::VectorXd(mi);
    for (int k = 0; k < mi; ++k) sol.duals_ineq(k) = -y(me + k);
    sol.reduced_costs = Eigen::VectorXd(n);
    for (int v = 0; v < n; ++v)
        sol.reduced_costs(v) = p.objective(v) - (m > 0 ? y.dot(t.a.col(v).head(m)) : 0.0);
    return sol;
}

}  // namespace wrlmp
