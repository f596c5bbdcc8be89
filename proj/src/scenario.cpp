#include "wrlmp/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wrlmp {

using json = nlohmann::ordered_json;

ScenarioSpec load_scenario_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario spec: ") + e.what());
    }
    ScenarioSpec spec;
    if (doc.contains("base_case")) spec.base_case = doc["base_case"].get<std::string>();
    if (!doc.contains("variants") || !doc["variants"].is_array())
        throw ParseError("scenario spec: \"variants\" array required");
    std::set<std::string> labels;
    for (const auto& jv : doc["variants"]) {
        ScenarioVariant v;
        if (!jv.contains("label")) throw ParseError("scenario variant: \"label\" required");
        v.label = jv["label"].get<std::string>();
        if (!labels.insert(v.label).second)
            throw ParseError("scenario spec: duplicate label \"" + v.label + "\"");
        if (jv.contains("uniform_foc")) v.uniform_foc = jv["uniform_foc"].get<double>();
        if (jv.contains("foc"))
            for (auto it = jv["foc"].begin(); it != jv["foc"].end(); ++it)
                v.foc[it.key()] = it.value().get<double>();
        if (jv.contains("limits"))
            for (auto it = jv["limits"].begin(); it != jv["limits"].end(); ++it)
                v.limits[it.key()] = it.value().get<double>();
        if (jv.contains("outage")) v.outage = jv["outage"].get<std::string>();
        if (jv.contains("load_delta"))
            for (auto it = jv["load_delta"].begin(); it != jv["load_delta"].end(); ++it)
                v.load_delta[it.key()] = it.value().get<double>();
        spec.variants.push_back(std::move(v));
    }
    return spec;
}

ScenarioSpec load_scenario_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("scenario spec not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_scenario_spec(ss.str());
}

namespace {

ScenarioRow run_variant(const NetworkCase& base, const RiskProfile& risk,
                        const DispatchConfig& base_config, const ScenarioVariant& v,
                        const ScenarioReport& header) {
    ScenarioRow row;
    row.label = v.label;
    try {
        NetworkCase c = base;
        for (const auto& [line, limit] : v.limits) {
            int l = c.line_index(line);
            if (l < 0) throw ValidationError("limit override: unknown line \"" + line + "\"");
            c.lines[l].limit_mw = limit;
        }
        for (const auto& [bus, delta] : v.load_delta) {
            int i = c.bus_index(bus);
            if (i < 0) throw ValidationError("load delta: unknown bus \"" + bus + "\"");
            c.buses[i].demand_mw += delta;
        }
        if (v.outage) {
            OutageResult o = apply_outage(c, *v.outage);
            if (!o.connected) {
                row.disconnected = true;
                row.status = LpStatus::Infeasible;
                return row;
            }
            c = std::move(o.reduced);
        }
        DispatchConfig cfg = base_config;
        if (v.uniform_foc) cfg.uniform_foc = *v.uniform_foc;
        for (const auto& [line, foc] : v.foc) cfg.fixed_foc[line] = foc;
        if (v.outage && !cfg.slack.empty() && c.bus_index(cfg.slack) < 0) cfg.slack.clear();

        DispatchSolution s = solve_dispatch(c, risk, cfg);
        row.status = s.status;
        if (s.status != LpStatus::Optimal) return row;
        row.objective = s.objective;
        row.generation = s.generation;
        row.binding_lines = s.binding_lines();

        // Report flows/lmps in the base case's line order; an outaged line
        // keeps a zero column and never appears in the binding set.
        row.flows = Eigen::VectorXd::Zero(header.line_ids.size());
        for (size_t l = 0; l < header.line_ids.size(); ++l) {
            int idx = c.line_index(header.line_ids[l]);
            if (idx >= 0) row.flows(l) = s.flows(idx);
        }
        const std::string slack = cfg.slack.empty() ? c.buses.front().id : cfg.slack;
        PtdfMatrix ptdf = compute_ptdf(c, slack);
        row.lmps = decompose_lmp(s, ptdf).lmps();
    } catch (const std::exception& e) {
        row.error = e.what();
        row.status = LpStatus::NumericalFailure;
    }
    return row;
}

}  // namespace

ScenarioReport run_scenarios(const NetworkCase& c, const RiskProfile& risk,
                             const DispatchConfig& base_config, const ScenarioSpec& spec) {
    ScenarioReport report;
    for (const auto& g : c.generators) report.gen_ids.push_back(g.id);
    for (const auto& l : c.lines) report.line_ids.push_back(l.id);
    for (const auto& b : c.buses) report.bus_ids.push_back(b.id);
    for (const auto& v : spec.variants)
        report.rows.push_back(run_variant(c, risk, base_config, v, report));
    return report;
}

ScenarioReport run_foc_sweep(const NetworkCase& c, const RiskProfile& risk,
                             const DispatchConfig& base_config,
                             const std::vector<double>& foc_values) {
    ScenarioSpec spec;
    for (double f : foc_values) {
        if (!(f > 0.0 && f <= 1.0))
            throw ValidationError("sweep FOC values must lie in (0, 1]");
        ScenarioVariant v;
        std::ostringstream label;
        label << "foc=" << f;
        v.label = label.str();
        v.uniform_foc = f;
        spec.variants.push_back(std::move(v));
    }
    DispatchConfig cfg = base_config;
    cfg.mode = DispatchMode::WrbEdc;
    cfg.foc_mode = FocMode::Fixed;
    return run_scenarios(c, risk, cfg, spec);
}

ScenarioReport run_n_minus_1(const NetworkCase& c, const RiskProfile& risk,
                             const DispatchConfig& base_config, double foc) {
    if (!(foc > 0.0 && foc <= 1.0))
        throw ValidationError("n-1 FOC value must lie in (0, 1]");
    ScenarioSpec spec;
    for (const auto& l : c.lines) {
        ScenarioVariant v;
        v.label = "outage=" + l.id;
        v.uniform_foc = foc;
        v.outage = l.id;
        spec.variants.push_back(std::move(v));
    }
    DispatchConfig cfg = base_config;
    cfg.mode = DispatchMode::WrbEdc;
    cfg.foc_mode = FocMode::Fixed;
    return run_scenarios(c, risk, cfg, spec);
}

PerturbationReport run_load_perturbation(const NetworkCase& c, const RiskProfile& risk,
                                         const DispatchConfig& config, const std::string& bus,
                                         double delta_mw) {
    if (!std::isfinite(delta_mw)) throw ValidationError("load delta must be finite");
    if (c.bus_index(bus) < 0) throw ValidationError("unknown bus \"" + bus + "\"");
    ScenarioSpec spec;
    ScenarioVariant base;
    base.label = "base";
    spec.variants.push_back(base);
    ScenarioVariant pert;
    pert.label = "perturbed";
    pert.load_delta[bus] = delta_mw;
    spec.variants.push_back(pert);

    PerturbationReport out;
    out.report = run_scenarios(c, risk, config, spec);
    const ScenarioRow& b = out.report.rows[0];
    const ScenarioRow& p = out.report.rows[1];
    if (b.status == LpStatus::Optimal) {
        out.lmp_at_bus = b.lmps(c.bus_index(bus));
        if (p.status == LpStatus::Optimal) {
            out.delta_objective = p.objective - b.objective;
            if (delta_mw != 0.0)
                out.gap = std::abs(out.delta_objective / delta_mw - out.lmp_at_bus);
        }
    }
    return out;
}

std::optional<ReportFormat> parse_format(const std::string& token) {
    if (token == "text") return ReportFormat::Text;
    if (token == "csv") return ReportFormat::Csv;
    if (token == "json") return ReportFormat::Json;
    return std::nullopt;
}

std::string emit_report(const ScenarioReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json doc = json::array();
        for (const auto& row : report.rows) {
            json jr;
            jr["label"] = row.label;
            jr["status"] = to_string(row.status);
            jr["disconnected"] = row.disconnected;
            if (!row.error.empty()) jr["error"] = row.error;
            if (row.status == LpStatus::Optimal) {
                jr["objective"] = row.objective;
                jr["generation"] = json::object();
                for (size_t g = 0; g < report.gen_ids.size(); ++g)
                    jr["generation"][report.gen_ids[g]] = row.generation(g);
                jr["flows"] = json::object();
                for (size_t l = 0; l < report.line_ids.size(); ++l)
                    jr["flows"][report.line_ids[l]] = row.flows(l);
                jr["lmps"] = json::object();
                for (size_t i = 0; i < report.bus_ids.size(); ++i)
                    jr["lmps"][report.bus_ids[i]] = row.lmps(i);
                jr["binding_lines"] = row.binding_lines;
            }
            doc.push_back(jr);
        }
        return doc.dump(2);
    }

    if (format == ReportFormat::Csv) {
        std::ostringstream os;
        os.precision(17);
        os << "label,status";
        for (const auto& g : report.gen_ids) os << ",gen:" << g;
        for (const auto& l : report.line_ids) os << ",flow:" << l;
        for (const auto& b : report.bus_ids) os << ",lmp:" << b;
        os << ",objective,binding\n";
        for (const auto& row : report.rows) {
            os << row.label << "," << to_string(row.status);
            if (row.status == LpStatus::Optimal) {
                for (Eigen::Index g = 0; g < row.generation.size(); ++g)
                    os << "," << row.generation(g);
                for (Eigen::Index l = 0; l < row.flows.size(); ++l) os << "," << row.flows(l);
                for (Eigen::Index i = 0; i < row.lmps.size(); ++i) os << "," << row.lmps(i);
                os << "," << row.objective << ",";
                for (size_t i = 0; i < row.binding_lines.size(); ++i)
                    os << (i ? ";" : "") << row.binding_lines[i];
            } else {
                for (size_t i = 0;
                     i < report.gen_ids.size() + report.line_ids.size() + report.bus_ids.size() + 1;
                     ++i)
                    os << ",";
                os << ",";
            }
            os << "\n";
        }
        return os.str();
    }

    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    auto cell = [&os](const std::string& s) { os << std::setw(14) << s; };
    os << std::setw(20) << std::left << "variant" << std::right;
    cell("status");
    cell("objective");
    for (const auto& g : report.gen_ids) cell("gen:" + g);
    for (const auto& l : report.line_ids) cell("flow:" + l);
    for (const auto& b : report.bus_ids) cell("lmp:" + b);
    os << "\n";
    for (const auto& row : report.rows) {
        os << std::setw(20) << std::left << row.label << std::right;
        cell(row.disconnected ? "Disconnected" : to_string(row.status));
        if (row.status == LpStatus::Optimal) {
            os << std::setw(14) << row.objective;
            for (Eigen::Index g = 0; g < row.generation.size(); ++g)
                os << std::setw(14) << row.generation(g);
            for (Eigen::Index l = 0; l < row.flows.size(); ++l) os << std::setw(14) << row.flows(l);
            for (Eigen::Index i = 0; i < row.lmps.size(); ++i) os << std::setw(14) << row.lmps(i);
        } else {
            const size_t cols =
                1 + report.gen_ids.size() + report.line_ids.size() + report.bus_ids.size();
            for (size_t i = 0; i < cols; ++i) cell("-");
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace wrlmp
