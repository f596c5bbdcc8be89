#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrlmp/dispatch.hpp"
#include "wrlmp/ptdf.hpp"

namespace wrlmp {

struct LmpRecord {
    std::string bus;
    double lmp = 0.0;
    double energy = 0.0;
    double congestion_normal = 0.0;
    double congestion_risk = 0.0;
    double wildfire = 0.0;
    double voll = 0.0;
};

struct LmpBreakdown {
    std::vector<LmpRecord> records;

    Eigen::VectorXd lmps() const;
    std::string to_text() const;
    std::string to_csv() const;
};

// Splits each bus price into energy (balance dual), congestion over normal and
// at-risk lines, a wildfire term (risk-cap dual share, optimized-FOC mode) and
// a VOLL term at shed buses. Components sum to the lmp by construction.
LmpBreakdown decompose_lmp(const DispatchSolution& solution, const PtdfMatrix& ptdf);

struct FdCheck {
    double lmp = 0.0;
    double fd = 0.0;
    double gap = 0.0;
    bool perturbed_feasible = true;
};

// Compares the dual-based price at one bus with the finite-difference marginal
// cost of serving eps more MW there.
FdCheck verify_lmp_fd(const NetworkCase& c, const RiskProfile& risk,
                      const DispatchConfig& config, const std::string& bus, double eps);

}  // namespace wrlmp
