#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrlmp/network.hpp"

namespace wrlmp {

// Injection-to-flow sensitivities for the in-service lines of a case.
// Row l, column i: MW on line l (from->to positive) per MW injected at bus i
// and withdrawn at the slack. The slack column is identically zero.
struct PtdfMatrix {
    Eigen::MatrixXd values;  // L x N
    std::string slack_bus;
    std::vector<std::string> line_order;
    std::vector<std::string> bus_order;
};

struct SusceptanceMatrices {
    Eigen::MatrixXd nodal;   // N x N, row sums zero
    Eigen::MatrixXd branch;  // L x N
};

SusceptanceMatrices build_susceptance(const NetworkCase& c);

PtdfMatrix compute_ptdf(const NetworkCase& c, const std::string& slack);

// flows = PTDF * injections. Injections must balance to zero within 1e-6 MW.
Eigen::VectorXd line_flows(const PtdfMatrix& ptdf, const Eigen::VectorXd& injections);

// CSV rendering: line ids as row labels, bus ids as column headers, 9 sig digits.
std::string ptdf_to_csv(const PtdfMatrix& ptdf);

}  // namespace wrlmp
