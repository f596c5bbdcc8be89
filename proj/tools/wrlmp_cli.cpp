// Command-line front end: case loading, risk profiles, dispatch solves,
// price decomposition and scenario suites.
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wrlmp/dispatch.hpp"
#include "wrlmp/network.hpp"
#include "wrlmp/pricing.hpp"
#include "wrlmp/ptdf.hpp"
#include "wrlmp/risk.hpp"
#include "wrlmp/scenario.hpp"

namespace {

using namespace wrlmp;

std::string resolve_path(const std::string& path) {
    if (std::ifstream(path).good()) return path;
    if (const char* env = std::getenv("WD_FIXTURES")) {
        std::string alt = std::string(env) + "/" + path;
        if (std::ifstream(alt).good()) return alt;
    }
    return path;  // let the loader report the error
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + out_path);
    out << text;
}

struct CommonOpts {
    std::string case_path;
    std::string risk_path;
    std::string slack;
    std::string out_path;
    std::string format = "text";
    double foc = 1.0;
    double voll = 10000.0;
    bool shedding = false;
    bool optimize_foc = false;
    bool paper_literal = false;
    bool dump_ptdf = false;
    bool dump_lp = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_foc = true) {
    cmd->add_option("--case", o.case_path, "case file (JSON)")->required();
    cmd->add_option("--risk", o.risk_path, "risk profile file (JSON)");
    cmd->add_option("--slack", o.slack, "slack bus id (default: first bus)");
    cmd->add_option("--out", o.out_path, "write results to file instead of stdout");
    cmd->add_option("--format", o.format, "output format: text|csv|json");
    if (with_foc) cmd->add_option("--foc", o.foc, "fixed FOC for every at-risk line");
    cmd->add_option("--voll", o.voll, "VOLL ($/MWh) when no risk profile is given");
    cmd->add_flag("--shedding", o.shedding, "allow load shedding");
    cmd->add_flag("--optimize-foc", o.optimize_foc, "treat FOC as a decision variable");
    cmd->add_flag("--paper-literal-objective", o.paper_literal,
                  "use the literal + sum(r*VOLL) objective form");
    cmd->add_flag("--dump-ptdf", o.dump_ptdf, "print the PTDF matrix as CSV to stderr");
    cmd->add_flag("--dump-lp", o.dump_lp, "print the LP listing to stderr");
}

NetworkCase load(const CommonOpts& o) { return load_case_file(resolve_path(o.case_path)); }

RiskProfile load_risk(const CommonOpts& o, const NetworkCase& c) {
    if (o.risk_path.empty()) return default_risk_profile(c, o.voll);
    return load_risk_profile_file(resolve_path(o.risk_path));
}

DispatchConfig make_config(const CommonOpts& o) {
    DispatchConfig cfg;
    cfg.mode = DispatchMode::WrbEdc;
    cfg.foc_mode = o.optimize_foc ? FocMode::Optimized : FocMode::Fixed;
    cfg.uniform_foc = o.foc;
    cfg.allow_shedding = o.shedding;
    cfg.slack = o.slack;
    cfg.paper_literal_objective = o.paper_literal;
    return cfg;
}

void maybe_dump(const CommonOpts& o, const NetworkCase& c, const RiskProfile& risk,
                const DispatchConfig& cfg) {
    const std::string slack = cfg.slack.empty() ? c.buses.front().id : cfg.slack;
    if (o.dump_ptdf) std::cerr << ptdf_to_csv(compute_ptdf(c, slack));
    if (o.dump_lp) {
        PtdfMatrix ptdf = compute_ptdf(c, slack);
        std::cerr << build_wrb_edc(c, risk, cfg, ptdf).dump();
    }
}

std::string solve_text(const DispatchSolution& s, const LmpBreakdown* bd) {
    std::ostringstream os;
    os << "status: " << to_string(s.status) << "\n";
    if (s.status != LpStatus::Optimal) return os.str();
    os << std::fixed << std::setprecision(4);
    os << "objective: " << s.objective << " $/h\n\n";
    os << std::setw(12) << std::left << "generator" << std::right << std::setw(12) << "MW\n";
    for (size_t g = 0; g < s.gen_ids.size(); ++g)
        os << std::setw(12) << std::left << s.gen_ids[g] << std::right << std::setw(10)
           << s.generation(g) << "\n";
    os << "\n"
       << std::setw(8) << std::left << "line" << std::right << std::setw(12) << "flow MW"
       << std::setw(10) << "foc" << std::setw(12) << "mu_up" << std::setw(12) << "mu_lo\n";
    for (size_t l = 0; l < s.line_ids.size(); ++l)
        os << std::setw(8) << std::left << s.line_ids[l] << std::right << std::setw(12)
           << s.flows(l) << std::setw(10) << s.foc(l) << std::setw(12) << s.mu_upper(l)
           << std::setw(12) << s.mu_lower(l) << "\n";
    if (bd) os << "\n" << bd->to_text();
    bool any_shed = false;
    for (size_t i = 0; i < s.bus_ids.size(); ++i)
        if (s.bus_has_r[i] && s.shed_ratio(i) < 1.0 - 1e-9) any_shed = true;
    if (any_shed) {
        os << "\n" << std::setw(8) << std::left << "bus" << std::right << std::setw(12)
           << "served\n";
        for (size_t i = 0; i < s.bus_ids.size(); ++i)
            if (s.bus_has_r[i])
                os << std::setw(8) << std::left << s.bus_ids[i] << std::right << std::setw(10)
                   << s.shed_ratio(i) << "\n";
    }
    return os.str();
}

int run_solve(const CommonOpts& o, bool lmp_only) {
    NetworkCase c = load(o);
    RiskProfile risk = load_risk(o, c);
    DispatchConfig cfg = make_config(o);
    maybe_dump(o, c, risk, cfg);
    DispatchSolution s = solve_dispatch(c, risk, cfg);
    if (s.status != LpStatus::Optimal) {
        write_output(lmp_only || o.format == "text"
                         ? "status: " + to_string(s.status) + "\n"
                         : solution_to_json(s) + "\n",
                     o.out_path);
        return 0;
    }
    const std::string slack = cfg.slack.empty() ? c.buses.front().id : cfg.slack;
    LmpBreakdown bd = decompose_lmp(s, compute_ptdf(c, slack));
    std::string text;
    if (lmp_only) {
        text = o.format == "csv" ? bd.to_csv() : bd.to_text();
    } else if (o.format == "json") {
        Eigen::VectorXd lmps = bd.lmps();
        text = solution_to_json(s, &lmps) + "\n";
    } else {
        text = solve_text(s, &bd);
    }
    write_output(text, o.out_path);
    return 0;
}

int emit(const CommonOpts& o, const ScenarioReport& report) {
    auto fmt = parse_format(o.format);
    if (!fmt) throw ParseError("unknown format \"" + o.format + "\" (use text|csv|json)");
    write_output(emit_report(report, *fmt), o.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wildfire-risk-based DC dispatch and locational pricing"};
    app.require_subcommand(1);

    CommonOpts solve_o, lmp_o, sweep_o, n1_o, perturb_o, run_o, dump_o;
    std::string sweep_list, perturb_bus, spec_path, dump_what = "ptdf";
    double perturb_delta = 1.0;

    auto* solve_cmd = app.add_subcommand("solve", "solve one dispatch problem");
    add_common(solve_cmd, solve_o);
    auto* lmp_cmd = app.add_subcommand("lmp", "per-bus price decomposition");
    add_common(lmp_cmd, lmp_o);
    auto* sweep_cmd = app.add_subcommand("sweep", "FOC sweep");
    add_common(sweep_cmd, sweep_o, false);
    sweep_cmd->add_option("--foc", sweep_list, "comma-separated FOC values")->required();
    auto* n1_cmd = app.add_subcommand("n1", "single-line outage suite");
    add_common(n1_cmd, n1_o);
    auto* perturb_cmd = app.add_subcommand("perturb", "load perturbation probe");
    add_common(perturb_cmd, perturb_o);
    perturb_cmd->add_option("--bus", perturb_bus, "bus to perturb")->required();
    perturb_cmd->add_option("--delta", perturb_delta, "MW delta (default 1)");
    auto* run_cmd = app.add_subcommand("run", "run a scenario spec file");
    add_common(run_cmd, run_o);
    run_cmd->add_option("spec", spec_path, "scenario spec (JSON)")->required();
    auto* dump_cmd = app.add_subcommand("dump", "dump the PTDF matrix or LP listing");
    add_common(dump_cmd, dump_o);
    dump_cmd->add_option("--what", dump_what, "ptdf|lp");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (solve_cmd->parsed()) return run_solve(solve_o, false);
        if (lmp_cmd->parsed()) return run_solve(lmp_o, true);
        if (sweep_cmd->parsed()) {
            NetworkCase c = load(sweep_o);
            RiskProfile risk = load_risk(sweep_o, c);
            std::vector<double> values;
            std::stringstream ss(sweep_list);
            std::string tok;
            while (std::getline(ss, tok, ',')) values.push_back(std::stod(tok));
            return emit(sweep_o, run_foc_sweep(c, risk, make_config(sweep_o), values));
        }
        if (n1_cmd->parsed()) {
            NetworkCase c = load(n1_o);
            RiskProfile risk = load_risk(n1_o, c);
            return emit(n1_o, run_n_minus_1(c, risk, make_config(n1_o), n1_o.foc));
        }
        if (perturb_cmd->parsed()) {
            NetworkCase c = load(perturb_o);
            RiskProfile risk = load_risk(perturb_o, c);
            PerturbationReport pr = run_load_perturbation(c, risk, make_config(perturb_o),
                                                          perturb_bus, perturb_delta);
            std::ostringstream extra;
            extra << std::fixed << std::setprecision(4) << "delta_objective: "
                  << pr.delta_objective << "\nlmp_at_bus: " << pr.lmp_at_bus
                  << "\ngap: " << pr.gap << "\n";
            auto fmt = parse_format(perturb_o.format);
            if (!fmt) throw ParseError("unknown format \"" + perturb_o.format + "\"");
            std::string text = emit_report(pr.report, *fmt);
            if (*fmt == ReportFormat::Text) text += extra.str();
            write_output(text, perturb_o.out_path);
            return 0;
        }
        if (run_cmd->parsed()) {
            NetworkCase c = load(run_o);
            RiskProfile risk = load_risk(run_o, c);
            ScenarioSpec spec = load_scenario_spec_file(resolve_path(spec_path));
            return emit(run_o, run_scenarios(c, risk, make_config(run_o), spec));
        }
        if (dump_cmd->parsed()) {
            NetworkCase c = load(dump_o);
            const std::string slack = dump_o.slack.empty() ? c.buses.front().id : dump_o.slack;
            if (dump_what == "ptdf") {
                write_output(ptdf_to_csv(compute_ptdf(c, slack)), dump_o.out_path);
            } else if (dump_what == "lp") {
                RiskProfile risk = load_risk(dump_o, c);
                DispatchConfig cfg = make_config(dump_o);
                write_output(build_wrb_edc(c, risk, cfg, compute_ptdf(c, slack)).dump(),
                             dump_o.out_path);
            } else {
                throw ParseError("unknown dump target \"" + dump_what + "\" (use ptdf|lp)");
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
