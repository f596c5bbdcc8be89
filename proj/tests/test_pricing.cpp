#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wrlmp/pricing.hpp"
#include "test_util.hpp"

using namespace wrlmp;

namespace {

DispatchConfig fixed_cfg(double foc, bool shed = false) {
    DispatchConfig cfg;
    cfg.foc_mode = FocMode::Fixed;
    cfg.uniform_foc = foc;
    cfg.allow_shedding = shed;
    return cfg;
}

LmpBreakdown price(const NetworkCase& c, const RiskProfile& r, const DispatchConfig& cfg) {
    DispatchSolution s = solve_dispatch(c, r, cfg);
    REQUIRE(s.status == LpStatus::Optimal);
    return decompose_lmp(s, compute_ptdf(c, cfg.slack.empty() ? c.buses.front().id : cfg.slack));
}

}  // namespace

TEST_CASE("uncongested network prices uniformly at the marginal cost") {
    const char* text = R"({
        "name": "wide",
        "buses": [{"id": "a"}, {"id": "b", "demand_mw": 100}],
        "lines": [{"id": "ab", "from": "a", "to": "b", "reactance_pu": 0.1, "limit_mw": 5000}],
        "generators": [
            {"id": "g1", "bus": "a", "cost_per_mwh": 12, "p_min_mw": 0, "p_max_mw": 80},
            {"id": "g2", "bus": "b", "cost_per_mwh": 25, "p_min_mw": 0, "p_max_mw": 200}
        ]
    })";
    NetworkCase c = load_case(text);
    LmpBreakdown b = price(c, default_risk_profile(c), fixed_cfg(1.0));
    for (const auto& rec : b.records) {
        CHECK(rec.lmp == doctest::Approx(25.0));
        CHECK(rec.energy == doctest::Approx(25.0));
        CHECK(rec.congestion_normal == doctest::Approx(0.0));
        CHECK(rec.congestion_risk == doctest::Approx(0.0));
        CHECK(rec.wildfire == doctest::Approx(0.0));
        CHECK(rec.voll == doctest::Approx(0.0));
    }
}

TEST_CASE("five-bus prices at half capacity") {
    NetworkCase c = test::pjm5();
    LmpBreakdown b = price(c, test::pjm5_risk(), fixed_cfg(0.5));
    Eigen::VectorXd lmps = b.lmps();
    CHECK(lmps(0) == doctest::Approx(24.6605).epsilon(1e-4));
    CHECK(lmps(1) == doctest::Approx(30.9439).epsilon(1e-4));
    CHECK(lmps(2) == doctest::Approx(33.3588).epsilon(1e-4));
    CHECK(std::abs(lmps(3) - 40.0) <= 1e-6);  // marginal generator at bus d
    CHECK(lmps(4) == doctest::Approx(20.0).epsilon(1e-6));
    for (const auto& rec : b.records) {
        CHECK(rec.energy == doctest::Approx(lmps(0)));  // slack bus a carries no line term
        double sum = rec.energy + rec.congestion_normal + rec.congestion_risk + rec.wildfire +
                     rec.voll;
        CHECK(std::abs(sum - rec.lmp) <= 1e-6);
        // All congestion here comes from the at-risk corridor.
        CHECK(rec.congestion_normal == doctest::Approx(0.0));
        CHECK(rec.wildfire == doctest::Approx(0.0));  // fixed mode has no cap dual
    }
}

TEST_CASE("five-bus prices at full capacity") {
    NetworkCase c = test::pjm5();
    LmpBreakdown b = price(c, test::pjm5_risk(), fixed_cfg(1.0));
    Eigen::VectorXd lmps = b.lmps();
    CHECK(lmps(0) == doctest::Approx(23.4887).epsilon(1e-4));
    CHECK(lmps(1) == doctest::Approx(28.1922).epsilon(1e-4));
    CHECK(lmps(2) == doctest::Approx(30.0).epsilon(1e-4));
    CHECK(lmps(3) == doctest::Approx(34.9714).epsilon(1e-4));
    CHECK(lmps(4) == doctest::Approx(20.0).epsilon(1e-4));
}

TEST_CASE("optimized mode moves corridor congestion into the wildfire term") {
    NetworkCase c = test::pjm5();
    DispatchConfig cfg;
    cfg.foc_mode = FocMode::Optimized;
    LmpBreakdown b = price(c, test::pjm5_risk(), cfg);
    bool any_wildfire = false;
    for (const auto& rec : b.records) {
        double sum = rec.energy + rec.congestion_normal + rec.congestion_risk + rec.wildfire +
                     rec.voll;
        CHECK(std::abs(sum - rec.lmp) <= 1e-6);
        if (std::abs(rec.wildfire) > 1e-9) any_wildfire = true;
    }
    CHECK(any_wildfire);
}

TEST_CASE("shed buses price toward the lost-load value") {
    NetworkCase c = test::pjm5();
    DispatchSolution s = solve_dispatch(c, test::pjm5_risk(), fixed_cfg(0.25, true));
    REQUIRE(s.status == LpStatus::Optimal);
    LmpBreakdown b = decompose_lmp(s, compute_ptdf(c, "a"));
    for (size_t i = 0; i < b.records.size(); ++i) {
        const auto& rec = b.records[i];
        double sum = rec.energy + rec.congestion_normal + rec.congestion_risk + rec.wildfire +
                     rec.voll;
        CHECK(std::abs(sum - rec.lmp) <= 1e-6);
        if (s.bus_has_r[i] && s.shed_ratio(i) < 1.0 - 1e-9) {
            // A marginal shed bus prices at the lost-load value: serving one
            // more MW there just avoids one MW of shedding.
            CHECK(rec.lmp == doctest::Approx(s.voll(i)).epsilon(1e-6));
        }
    }
}

TEST_CASE("prices agree with finite-difference marginal cost") {
    NetworkCase c = test::pjm5();
    RiskProfile risk = test::pjm5_risk();
    for (double foc : {1.0, 0.75, 0.5}) {
        CAPTURE(foc);
        for (const auto& bus : c.buses) {
            CAPTURE(bus.id);
            FdCheck fd = verify_lmp_fd(c, risk, fixed_cfg(foc), bus.id, 1e-3);
            if (!fd.perturbed_feasible) continue;
            CHECK(fd.gap <= 1e-3 * (1 + std::abs(fd.lmp)));
        }
    }
}

TEST_CASE("finite-difference check flags an infeasible perturbation") {
    // One generator exactly covering demand: any extra MW is unservable.
    const char* text = R"({
        "name": "tight",
        "buses": [{"id": "a"}, {"id": "b", "demand_mw": 50}],
        "lines": [{"id": "ab", "from": "a", "to": "b", "reactance_pu": 0.1, "limit_mw": 100}],
        "generators": [{"id": "g", "bus": "a", "cost_per_mwh": 10, "p_min_mw": 0, "p_max_mw": 50}]
    })";
    NetworkCase c = load_case(text);
    FdCheck fd = verify_lmp_fd(c, default_risk_profile(c), fixed_cfg(1.0), "b", 1e-3);
    CHECK_FALSE(fd.perturbed_feasible);
}

TEST_CASE("text and csv renderings") {
    NetworkCase c = test::pjm5();
    LmpBreakdown b = price(c, test::pjm5_risk(), fixed_cfg(0.5));
    std::string text = b.to_text();
    CHECK(text.find("40.0000") != std::string::npos);  // bus d, 4 decimals
    CHECK(text.find("energy") != std::string::npos);
    std::string csv = b.to_csv();
    CHECK(csv.find("bus,lmp,energy,congestion_normal,congestion_risk,wildfire,voll") == 0);
    CHECK(csv.find("\nd,") != std::string::npos);
    // Round-trip precision: parsing the csv back reproduces the double exactly.
    size_t pos = csv.find("\nd,") + 3;
    CHECK(std::stod(csv.substr(pos)) == b.lmps()(3));
}
