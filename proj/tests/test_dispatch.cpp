#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wrlmp/dispatch.hpp"
#include "test_util.hpp"

using namespace wrlmp;

namespace {

DispatchConfig fixed_cfg(double foc, bool shed = false) {
    DispatchConfig cfg;
    cfg.mode = DispatchMode::WrbEdc;
    cfg.foc_mode = FocMode::Fixed;
    cfg.uniform_foc = foc;
    cfg.allow_shedding = shed;
    return cfg;
}

double served_demand(const NetworkCase& c, const DispatchSolution& s) {
    double d = 0;
    for (size_t i = 0; i < c.buses.size(); ++i) d += c.buses[i].demand_mw * s.shed_ratio(i);
    return d;
}

}  // namespace

TEST_CASE("plain economic dispatch follows merit order") {
    NetworkCase c = test::pjm5();
    LpProblem lp = build_edc(c);
    CHECK(lp.num_variables() == 5);
    CHECK(lp.num_eq() == 1);

    DispatchConfig cfg;
    cfg.mode = DispatchMode::Edc;
    DispatchSolution s = solve_dispatch(c, RiskProfile{}, cfg);
    REQUIRE(s.status == LpStatus::Optimal);
    // alta 14 and park_city 15 at cap, brighton 20 at cap, solitude 30 marginal.
    CHECK(s.generation(0) == doctest::Approx(40));
    CHECK(s.generation(1) == doctest::Approx(170));
    CHECK(s.generation(4) == doctest::Approx(600));
    CHECK(s.generation(2) == doctest::Approx(190));
    CHECK(s.generation(3) == doctest::Approx(0));
    CHECK(s.objective == doctest::Approx(40 * 14 + 170 * 15 + 190 * 30 + 600 * 20));
    CHECK(s.lambda == doctest::Approx(30));
    CHECK(s.generation.sum() == doctest::Approx(c.total_demand()));
}

TEST_CASE("network-constrained base case at full capacity") {
    NetworkCase c = test::pjm5();
    DispatchSolution s = solve_dispatch(c, test::pjm5_risk(), fixed_cfg(1.0));
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(std::abs(s.generation.sum() - 1000.0) <= 1e-4);
    const int de = c.line_index("de");
    CHECK(std::abs(s.flows(de) - (-240.0)) <= 1e-4);
    auto binding = s.binding_lines();
    CHECK(std::find(binding.begin(), binding.end(), "de") != binding.end());
    CHECK(s.mu_lower(de) > 0);
}

TEST_CASE("derated flows track the capacity factor") {
    NetworkCase c = test::pjm5();
    const int de = c.line_index("de");

    DispatchSolution s75 = solve_dispatch(c, test::pjm5_risk(), fixed_cfg(0.75));
    REQUIRE(s75.status == LpStatus::Optimal);
    CHECK(std::abs(s75.flows(de) - (-180.0)) <= 1e-4);
    CHECK(s75.mu_lower(de) > 0);

    DispatchSolution s50 = solve_dispatch(c, test::pjm5_risk(), fixed_cfg(0.5));
    REQUIRE(s50.status == LpStatus::Optimal);
    CHECK(std::abs(s50.flows(de) - (-120.0)) <= 1e-4);
    CHECK(s50.objective == doctest::Approx(26480.2189).epsilon(1e-6));
    CHECK(s50.generation(3) == doctest::Approx(118.5109).epsilon(1e-4));
    CHECK(s50.generation(4) == doctest::Approx(151.4891).epsilon(1e-4));
    CHECK(s50.eff_upper(de) == doctest::Approx(120.0));
    CHECK(s50.eff_lower(de) == doctest::Approx(-120.0));
}

TEST_CASE("deep derate is infeasible without shedding, recovers with it") {
    NetworkCase c = test::pjm5();
    RiskProfile risk = test::pjm5_risk();

    DispatchSolution hard = solve_dispatch(c, risk, fixed_cfg(0.25));
    CHECK(hard.status == LpStatus::Infeasible);

    DispatchSolution soft = solve_dispatch(c, risk, fixed_cfg(0.25, true));
    REQUIRE(soft.status == LpStatus::Optimal);
    const double served = served_demand(c, soft);
    CHECK(served < 1000.0 - 1e-6);
    CHECK(served == doctest::Approx(987.53).epsilon(1e-3));
    CHECK(soft.generation.sum() == doctest::Approx(served).epsilon(1e-9));
    // Unserved energy is priced, so the objective includes a VOLL block.
    double shed_cost = 0;
    for (size_t i = 0; i < c.buses.size(); ++i)
        shed_cost += soft.voll(i) * c.buses[i].demand_mw * (1 - soft.shed_ratio(i));
    CHECK(shed_cost > 0);
}

TEST_CASE("objective is non-increasing in the capacity factor") {
    NetworkCase c = test::pjm5();
    RiskProfile risk = test::pjm5_risk();
    double prev = std::numeric_limits<double>::infinity();
    for (double foc : {0.4, 0.6, 0.8, 1.0}) {
        DispatchSolution s = solve_dispatch(c, risk, fixed_cfg(foc, true));
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.objective <= prev + 1e-6);
        prev = s.objective;
    }
}

TEST_CASE("flows equal PTDF times injections and balance holds") {
    NetworkCase c = test::pjm5();
    DispatchSolution s = solve_dispatch(c, test::pjm5_risk(), fixed_cfg(0.5));
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(std::abs(s.injections.sum()) <= 1e-6);
    PtdfMatrix p = compute_ptdf(c, c.buses.front().id);
    CHECK((s.flows - p.values * s.injections).cwiseAbs().maxCoeff() <= 1e-8);
    for (size_t l = 0; l < c.lines.size(); ++l) {
        CHECK(s.flows(l) <= s.eff_upper(l) + 1e-6);
        CHECK(s.flows(l) >= s.eff_lower(l) - 1e-6);
    }
}

TEST_CASE("per-line fixed overrides beat the uniform value") {
    NetworkCase c = test::pjm5();
    DispatchConfig cfg = fixed_cfg(1.0);
    cfg.fixed_foc["de"] = 0.5;
    DispatchSolution s = solve_dispatch(c, test::pjm5_risk(), cfg);
    REQUIRE(s.status == LpStatus::Optimal);
    const int de = c.line_index("de");
    CHECK(s.eff_upper(de) == doctest::Approx(120.0));
    CHECK(std::abs(s.flows(de) - (-120.0)) <= 1e-4);
    // Other at-risk lines stay at full capacity.
    CHECK(s.eff_upper(c.line_index("ab")) == doctest::Approx(400.0));
}

TEST_CASE("capacity factor outside (0, 1] is rejected") {
    DispatchConfig cfg = fixed_cfg(0.0);
    CHECK_THROWS_AS(cfg.foc_for("de"), ValidationError);
    cfg.uniform_foc = 1.5;
    CHECK_THROWS_AS(cfg.foc_for("de"), ValidationError);
    cfg.uniform_foc = 1.0;
    cfg.fixed_foc["de"] = -0.2;
    CHECK_THROWS_AS(cfg.foc_for("de"), ValidationError);
    CHECK(cfg.foc_for("ab") == 1.0);
}

TEST_CASE("optimized capacity factors respect the risk cap") {
    NetworkCase c = test::pjm5();
    RiskProfile risk = test::pjm5_risk();
    DispatchConfig cfg;
    cfg.foc_mode = FocMode::Optimized;
    DispatchSolution s = solve_dispatch(c, risk, cfg);
    REQUIRE(s.status == LpStatus::Optimal);
    for (size_t l = 0; l < c.lines.size(); ++l) {
        if (!s.line_at_risk[l]) continue;
        const LineRisk& lr = risk.lines.at(c.lines[l].id);
        CHECK(eval_risk(lr.segments, s.foc(l)) <= lr.segments.cap + 1e-7);
        CHECK(s.foc(l) >= lr.foc_min - 1e-9);
        CHECK(s.foc(l) <= lr.foc_max + 1e-9);
    }
    // The cap (risk <= 1 with pieces f and 3f-1) tops out at f = 2/3; the
    // binding corridor sits there and matches the equivalent fixed derate.
    const int de = c.line_index("de");
    CHECK(s.foc(de) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(std::abs(s.flows(de) - (-160.0)) <= 1e-4);

    DispatchSolution fixed23 = solve_dispatch(c, risk, fixed_cfg(2.0 / 3.0));
    REQUIRE(fixed23.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(fixed23.objective).epsilon(1e-9));
}

TEST_CASE("literal shed-penalty objective gives the same dispatch") {
    NetworkCase c = test::pjm5();
    RiskProfile risk = test::pjm5_risk();
    DispatchConfig coherent = fixed_cfg(0.25, true);
    DispatchConfig literal = fixed_cfg(0.25, true);
    literal.paper_literal_objective = true;
    DispatchSolution a = solve_dispatch(c, risk, coherent);
    DispatchSolution b = solve_dispatch(c, risk, literal);
    REQUIRE(a.status == LpStatus::Optimal);
    REQUIRE(b.status == LpStatus::Optimal);
    // The literal form rewards shedding, so it sheds everything sheddable;
    // the default form keeps the lights on wherever capacity allows.
    CHECK(served_demand(c, a) > served_demand(c, b));
}

TEST_CASE("shedding needs a declared bus entry") {
    NetworkCase c = test::pjm5();
    RiskProfile risk = test::pjm5_risk();
    risk.buses.clear();  // nothing sheddable
    DispatchSolution s = solve_dispatch(c, risk, fixed_cfg(0.25, true));
    CHECK(s.status == LpStatus::Infeasible);
}

TEST_CASE("solution renders to JSON with deterministic keys") {
    NetworkCase c = test::pjm5();
    DispatchSolution s = solve_dispatch(c, test::pjm5_risk(), fixed_cfg(0.5));
    REQUIRE(s.status == LpStatus::Optimal);
    std::string j1 = solution_to_json(s);
    std::string j2 = solution_to_json(s);
    CHECK(j1 == j2);
    CHECK(j1.find("\"status\": \"Optimal\"") != std::string::npos);
    CHECK(j1.find("\"de\"") != std::string::npos);

    DispatchSolution bad = solve_dispatch(c, test::pjm5_risk(), fixed_cfg(0.25));
    CHECK(solution_to_json(bad).find("Infeasible") != std::string::npos);
}

TEST_CASE("slack choice does not change the dispatch") {
    NetworkCase c = test::pjm5();
    DispatchConfig ca = fixed_cfg(0.5);
    ca.slack = "a";
    DispatchConfig ce = fixed_cfg(0.5);
    ce.slack = "e";
    DispatchSolution sa = solve_dispatch(c, test::pjm5_risk(), ca);
    DispatchSolution se = solve_dispatch(c, test::pjm5_risk(), ce);
    REQUIRE(sa.status == LpStatus::Optimal);
    REQUIRE(se.status == LpStatus::Optimal);
    CHECK(sa.objective == doctest::Approx(se.objective).epsilon(1e-9));
    CHECK((sa.flows - se.flows).cwiseAbs().maxCoeff() <= 1e-6);
}
