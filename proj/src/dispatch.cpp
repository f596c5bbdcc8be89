#include "wrlmp/dispatch.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wrlmp {

using json = nlohmann::ordered_json;

double DispatchConfig::foc_for(const std::string& line_id) const {
    auto it = fixed_foc.find(line_id);
    double v = it != fixed_foc.end() ? it->second : uniform_foc;
    if (!(v > 0.0 && v <= 1.0))
        throw ValidationError("fixed FOC for line \"" + line_id + "\" must lie in (0, 1]");
    return v;
}

std::vector<std::string> DispatchSolution::binding_lines(double tol) const {
    std::vector<std::string> out;
    for (Eigen::Index l = 0; l < flows.size(); ++l)
        if (flows(l) >= eff_upper(l) - tol || flows(l) <= eff_lower(l) + tol)
            out.push_back(line_ids[l]);
    return out;
}

LpProblem build_edc(const NetworkCase& c) {
    LpProblem lp;
    std::vector<std::pair<int, double>> balance;
    for (const auto& g : c.generators) {
        int v = lp.add_variable("X:" + g.id, g.p_min_mw, g.p_max_mw);
        lp.set_objective(v, g.cost_per_mwh);
        balance.emplace_back(v, 1.0);
    }
    lp.add_eq("balance", std::move(balance), c.total_demand());
    return lp;
}

namespace {

struct WrbLayout {
    std::vector<int> x_var;             // per generator
    std::vector<int> r_var;             // per bus, -1 when fully served
    std::vector<int> foc_var;           // per line, -1 when fixed / not at risk
    std::vector<int> row_u, row_l;      // flow row indices per line
    std::vector<std::vector<int>> cap_rows;  // per line
    double objective_constant = 0.0;
};

bool bus_adjacent_to_risk(const NetworkCase& c, const std::string& bus_id) {
    for (const auto& l : c.lines)
        if (l.at_risk && (l.from_bus == bus_id || l.to_bus == bus_id)) return true;
    return false;
}

LpProblem build_wrb_impl(const NetworkCase& c, const RiskProfile& risk,
                         const DispatchConfig& cfg, const PtdfMatrix& ptdf, WrbLayout& lay) {
    check_profile_covers(risk, c);
    const int nb = static_cast<int>(c.buses.size());
    const int nl = static_cast<int>(c.lines.size());
    const int ng = static_cast<int>(c.generators.size());
    if (static_cast<int>(ptdf.values.rows()) != nl ||
        static_cast<int>(ptdf.values.cols()) != nb)
        throw ValidationError("PTDF dimensions do not match case");

    LpProblem lp;
    lay.x_var.assign(ng, -1);
    lay.r_var.assign(nb, -1);
    lay.foc_var.assign(nl, -1);
    lay.row_u.assign(nl, -1);
    lay.row_l.assign(nl, -1);
    lay.cap_rows.assign(nl, {});

    for (int g = 0; g < ng; ++g) {
        const auto& gen = c.generators[g];
        lay.x_var[g] = lp.add_variable("X:" + gen.id, gen.p_min_mw, gen.p_max_mw);
        lp.set_objective(lay.x_var[g], gen.cost_per_mwh);
    }
    for (int i = 0; i < nb; ++i) {
        const auto& bus = c.buses[i];
        if (!cfg.allow_shedding || bus.demand_mw <= 0.0) continue;
        if (!bus_adjacent_to_risk(c, bus.id)) continue;
        auto it = risk.buses.find(bus.id);
        if (it == risk.buses.end()) continue;  // bus not declared sheddable
        const BusRisk& br = it->second;
        lay.r_var[i] = lp.add_variable("r:" + bus.id, br.r_min, br.r_max);
        if (cfg.paper_literal_objective) {
            lp.set_objective(lay.r_var[i], br.voll);
        } else {
            // VOLL * D * (1 - r): constant VOLL*D, coefficient -VOLL*D on r.
            lp.set_objective(lay.r_var[i], -br.voll * bus.demand_mw);
            lay.objective_constant += br.voll * bus.demand_mw;
        }
    }
    if (cfg.foc_mode == FocMode::Optimized) {
        for (int l = 0; l < nl; ++l) {
            if (!c.lines[l].at_risk) continue;
            const LineRisk& lr = risk.lines.at(c.lines[l].id);
            lay.foc_var[l] = lp.add_variable("FOC:" + c.lines[l].id, lr.foc_min, lr.foc_max);
        }
    }

    // Balance over substituted injections Y_i = sum_g X_g - r_i * D_i.
    std::vector<std::pair<int, double>> balance;
    double balance_rhs = 0.0;
    for (int g = 0; g < ng; ++g) balance.emplace_back(lay.x_var[g], 1.0);
    for (int i = 0; i < nb; ++i) {
        if (lay.r_var[i] >= 0)
            balance.emplace_back(lay.r_var[i], -c.buses[i].demand_mw);
        else
            balance_rhs += c.buses[i].demand_mw;
    }
    lp.add_eq("balance", std::move(balance), balance_rhs);

    for (int l = 0; l < nl; ++l) {
        const Line& ln = c.lines[l];
        std::vector<std::pair<int, double>> flow;
        double rhs_shift = 0.0;  // PTDF-weighted demand of fully served buses
        for (int g = 0; g < ng; ++g) {
            double k = ptdf.values(l, c.bus_index(c.generators[g].bus));
            if (k != 0.0) flow.emplace_back(lay.x_var[g], k);
        }
        for (int i = 0; i < nb; ++i) {
            double k = ptdf.values(l, i) * c.buses[i].demand_mw;
            if (k == 0.0) continue;
            if (lay.r_var[i] >= 0)
                flow.emplace_back(lay.r_var[i], -k);
            else
                rhs_shift += k;
        }

        if (ln.at_risk && cfg.foc_mode == FocMode::Optimized) {
            auto up = flow;
            up.emplace_back(lay.foc_var[l], -ln.limit_mw);
            lay.row_u[l] = lp.add_ineq("flow_u:" + ln.id, std::move(up), rhs_shift);
            auto down = flow;
            for (auto& [v, k] : down) k = -k;
            down.emplace_back(lay.foc_var[l], -ln.limit_mw);
            lay.row_l[l] = lp.add_ineq("flow_l:" + ln.id, std::move(down), -rhs_shift);
            const LineRisk& lr = risk.lines.at(ln.id);
            if (lr.segments.cap < RiskSegments::kInfRisk * 0.1) {
                int j = 0;
                for (const auto& [a, b] : lr.segments.pieces) {
                    lay.cap_rows[l].push_back(lp.add_ineq(
                        "cap:" + ln.id + ":" + std::to_string(j++),
                        {{lay.foc_var[l], a}}, lr.segments.cap - b));
                }
            }
        } else {
            const double scale = ln.at_risk ? cfg.foc_for(ln.id) : 1.0;
            const double limit = ln.limit_mw * scale;
            auto up = flow;
            lay.row_u[l] = lp.add_ineq("flow_u:" + ln.id, std::move(up), limit + rhs_shift);
            auto down = flow;
            for (auto& [v, k] : down) k = -k;
            lay.row_l[l] = lp.add_ineq("flow_l:" + ln.id, std::move(down), limit - rhs_shift);
        }
    }
    return lp;
}

}  // namespace

LpProblem build_wrb_edc(const NetworkCase& c, const RiskProfile& risk,
                        const DispatchConfig& config, const PtdfMatrix& ptdf) {
    WrbLayout lay;
    return build_wrb_impl(c, risk, config, ptdf, lay);
}

DispatchSolution solve_dispatch(const NetworkCase& c, const RiskProfile& risk,
                                const DispatchConfig& config) {
    const int nb = static_cast<int>(c.buses.size());
    const int nl = static_cast<int>(c.lines.size());
    const int ng = static_cast<int>(c.generators.size());

    DispatchSolution s;
    for (const auto& b : c.buses) s.bus_ids.push_back(b.id);
    for (const auto& l : c.lines) s.line_ids.push_back(l.id);
    for (const auto& g : c.generators) s.gen_ids.push_back(g.id);
    s.line_at_risk.assign(nl, false);
    for (int l = 0; l < nl; ++l) s.line_at_risk[l] = c.lines[l].at_risk;
    s.bus_has_r.assign(nb, false);
    s.voll = Eigen::VectorXd::Zero(nb);
    s.shed_ratio = Eigen::VectorXd::Ones(nb);
    s.foc = Eigen::VectorXd::Ones(nl);
    s.mu_upper = Eigen::VectorXd::Zero(nl);
    s.mu_lower = Eigen::VectorXd::Zero(nl);
    s.cap_dual_a = Eigen::VectorXd::Zero(nl);
    s.eff_upper = Eigen::VectorXd::Zero(nl);
    s.eff_lower = Eigen::VectorXd::Zero(nl);
    s.foc_mode = config.foc_mode;

    const std::string slack = config.slack.empty() ? c.buses.front().id : config.slack;

    if (config.mode == DispatchMode::Edc) {
        LpProblem lp = build_edc(c);
        LpSolution ls = solve_lp(lp);
        s.status = ls.status;
        if (ls.status != LpStatus::Optimal) return s;
        s.generation = ls.primal;
        s.objective = ls.objective_value;
        s.lambda = ls.duals_eq(0);
        s.injections = Eigen::VectorXd::Zero(nb);
        for (int g = 0; g < ng; ++g)
            s.injections(c.bus_index(c.generators[g].bus)) += s.generation(g);
        for (int i = 0; i < nb; ++i) s.injections(i) -= c.buses[i].demand_mw;
        if (nl > 0) {
            PtdfMatrix ptdf = compute_ptdf(c, slack);
            s.flows = ptdf.values * s.injections;
            for (int l = 0; l < nl; ++l) {
                s.eff_upper(l) = kInf;
                s.eff_lower(l) = -kInf;
            }
        } else {
            s.flows = Eigen::VectorXd::Zero(0);
        }
        return s;
    }

    PtdfMatrix ptdf = compute_ptdf(c, slack);
    WrbLayout lay;
    LpProblem lp = build_wrb_impl(c, risk, config, ptdf, lay);
    LpSolution ls = solve_lp(lp);
    s.status = ls.status;
    if (ls.status != LpStatus::Optimal) return s;

    s.generation = Eigen::VectorXd::Zero(ng);
    for (int g = 0; g < ng; ++g) s.generation(g) = ls.primal(lay.x_var[g]);
    for (int i = 0; i < nb; ++i) {
        if (lay.r_var[i] >= 0) {
            s.shed_ratio(i) = ls.primal(lay.r_var[i]);
            s.bus_has_r[i] = true;
            s.voll(i) = risk.buses.at(c.buses[i].id).voll;
        }
    }
    for (int l = 0; l < nl; ++l) {
        if (!c.lines[l].at_risk) continue;
        s.foc(l) = config.foc_mode == FocMode::Optimized ? ls.primal(lay.foc_var[l])
                                                         : config.foc_for(c.lines[l].id);
    }
    s.injections = Eigen::VectorXd::Zero(nb);
    for (int g = 0; g < ng; ++g)
        s.injections(c.bus_index(c.generators[g].bus)) += s.generation(g);
    for (int i = 0; i < nb; ++i)
        s.injections(i) -= c.buses[i].demand_mw * s.shed_ratio(i);
    s.flows = nl > 0 ? Eigen::VectorXd(ptdf.values * s.injections) : Eigen::VectorXd::Zero(0);

    s.objective = ls.objective_value + lay.objective_constant;
    s.lambda = ls.duals_eq(0);
    for (int l = 0; l < nl; ++l) {
        s.mu_upper(l) = ls.duals_ineq(lay.row_u[l]);
        s.mu_lower(l) = ls.duals_ineq(lay.row_l[l]);
        for (size_t j = 0; j < lay.cap_rows[l].size(); ++j) {
            const auto& piece = risk.lines.at(c.lines[l].id).segments.pieces[j];
            s.cap_dual_a(l) += ls.duals_ineq(lay.cap_rows[l][j]) * piece.first;
        }
        s.eff_upper(l) = c.lines[l].limit_mw * s.foc(l);
        s.eff_lower(l) = -s.eff_upper(l);
    }
    return s;
}

std::string solution_to_json(const DispatchSolution& s, const Eigen::VectorXd* lmps) {
    json doc;
    doc["status"] = to_string(s.status);
    if (s.status != LpStatus::Optimal) return doc.dump(2);
    doc["objective"] = s.objective;
    doc["generation"] = json::object();
    for (size_t g = 0; g < s.gen_ids.size(); ++g) doc["generation"][s.gen_ids[g]] = s.generation(g);
    doc["flows"] = json::object();
    for (size_t l = 0; l < s.line_ids.size(); ++l) doc["flows"][s.line_ids[l]] = s.flows(l);
    if (lmps) {
        doc["lmps"] = json::object();
        for (size_t i = 0; i < s.bus_ids.size(); ++i) doc["lmps"][s.bus_ids[i]] = (*lmps)(i);
    }
    doc["duals"] = json::object();
    doc["duals"]["balance"] = s.lambda;
    doc["duals"]["flow_upper"] = json::object();
    doc["duals"]["flow_lower"] = json::object();
    for (size_t l = 0; l < s.line_ids.size(); ++l) {
        doc["duals"]["flow_upper"][s.line_ids[l]] = s.mu_upper(l);
        doc["duals"]["flow_lower"][s.line_ids[l]] = s.mu_lower(l);
    }
    doc["foc"] = json::object();
    for (size_t l = 0; l < s.line_ids.size(); ++l)
        if (s.line_at_risk[l]) doc["foc"][s.line_ids[l]] = s.foc(l);
    doc["shed"] = json::object();
    for (size_t i = 0; i < s.bus_ids.size(); ++i)
        if (s.bus_has_r[i]) doc["shed"][s.bus_ids[i]] = s.shed_ratio(i);
    return doc.dump(2);
}

}  // namespace wrlmp
