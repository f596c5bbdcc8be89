#include "wrlmp/ptdf.hpp"

#include <cmath>
#include <sstream>

namespace wrlmp {

SusceptanceMatrices build_susceptance(const NetworkCase& c) {
    const int n = static_cast<int>(c.buses.size());
    const int m = static_cast<int>(c.lines.size());
    SusceptanceMatrices s;
    s.nodal = Eigen::MatrixXd::Zero(n, n);
    s.branch = Eigen::MatrixXd::Zero(m, n);
    for (int l = 0; l < m; ++l) {
        const Line& ln = c.lines[l];
        if (!(ln.reactance_pu > 0.0))
            throw ValidationError("line " + ln.id + ": reactance must be > 0");
        const int i = c.bus_index(ln.from_bus);
        const int j = c.bus_index(ln.to_bus);
        const double y = 1.0 / ln.reactance_pu;
        s.nodal(i, i) += y;
        s.nodal(j, j) += y;
        s.nodal(i, j) -= y;
        s.nodal(j, i) -= y;
        s.branch(l, i) = y;
        s.branch(l, j) = -y;
    }
    return s;
}

PtdfMatrix compute_ptdf(const NetworkCase& c, const std::string& slack) {
    const int n = static_cast<int>(c.buses.size());
    const int m = static_cast<int>(c.lines.size());
    const int s = c.bus_index(slack);
    if (s < 0) throw ValidationError("slack bus \"" + slack + "\" not in case");
    if (!c.connected()) throw ValidationError("cannot build PTDF: case is disconnected");

    SusceptanceMatrices mats = build_susceptance(c);

    // Reduced nodal matrix: slack row/column deleted.
    Eigen::MatrixXd bred(n - 1, n - 1);
    std::vector<int> keep;
    keep.reserve(n - 1);
    for (int i = 0; i < n; ++i)
        if (i != s) keep.push_back(i);
    for (int r = 0; r < n - 1; ++r)
        for (int col = 0; col < n - 1; ++col) bred(r, col) = mats.nodal(keep[r], keep[col]);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bred);
    // Partial pivoting leaves a near-zero pivot only for a singular system.
    const Eigen::MatrixXd& u = lu.matrixLU();
    for (int i = 0; i < n - 1; ++i)
        if (std::abs(u(i, i)) < 1e-10)
            throw ValidationError("singular reduced susceptance matrix (disconnected case?)");

    PtdfMatrix p;
    p.values = Eigen::MatrixXd::Zero(m, n);
    p.slack_bus = slack;
    for (const auto& b : c.buses) p.bus_order.push_back(b.id);
    for (const auto& l : c.lines) p.line_order.push_back(l.id);
    if (n == 1 || m == 0) return p;

    // theta = Bred^{-1} e_i per non-slack bus; flows = branch * theta.
    Eigen::MatrixXd theta_red = lu.solve(Eigen::MatrixXd::Identity(n - 1, n - 1));
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n - 1);
    for (int r = 0; r < n - 1; ++r) theta.row(keep[r]) = theta_red.row(r);
    Eigen::MatrixXd cols = mats.branch * theta;  // m x (n-1)
    for (int col = 0; col < n - 1; ++col) p.values.col(keep[col]) = cols.col(col);
    return p;
}

Eigen::VectorXd line_flows(const PtdfMatrix& ptdf, const Eigen::VectorXd& injections) {
    if (injections.size() != ptdf.values.cols())
        throw ValidationError("injection vector length does not match PTDF column count");
    if (std::abs(injections.sum()) > 1e-6)
        throw ValidationError("injections do not balance to zero");
    return ptdf.values * injections;
}

std::string ptdf_to_csv(const PtdfMatrix& ptdf) {
    std::ostringstream os;
    os.precision(9);
    os << "line";
    for (const auto& b : ptdf.bus_order) os << "," << b;
    os << "\n";
    for (Eigen::Index l = 0; l < ptdf.values.rows(); ++l) {
        os << ptdf.line_order[l];
        for (Eigen::Index i = 0; i < ptdf.values.cols(); ++i) os << "," << ptdf.values(l, i);
        os << "\n";
    }
    return os.str();
}

}  // namespace wrlmp
