#include "wrlmp/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace wrlmp {

Eigen::VectorXd LmpBreakdown::lmps() const {
    Eigen::VectorXd v(records.size());
    for (size_t i = 0; i < records.size(); ++i) v(i) = records[i].lmp;
    return v;
}

std::string LmpBreakdown::to_text() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << std::setw(8) << std::left << "bus" << std::right << std::setw(12) << "lmp"
       << std::setw(12) << "energy" << std::setw(12) << "cong_norm" << std::setw(12)
       << "cong_risk" << std::setw(12) << "wildfire" << std::setw(12) << "voll" << "\n";
    for (const auto& r : records)
        os << std::setw(8) << std::left << r.bus << std::right << std::setw(12) << r.lmp
           << std::setw(12) << r.energy << std::setw(12) << r.congestion_normal << std::setw(12)
           << r.congestion_risk << std::setw(12) << r.wildfire << std::setw(12) << r.voll << "\n";
    return os.str();
}

std::string LmpBreakdown::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "bus,lmp,energy,congestion_normal,congestion_risk,wildfire,voll\n";
    for (const auto& r : records)
        os << r.bus << "," << r.lmp << "," << r.energy << "," << r.congestion_normal << ","
           << r.congestion_risk << "," << r.wildfire << "," << r.voll << "\n";
    return os.str();
}

LmpBreakdown decompose_lmp(const DispatchSolution& s, const PtdfMatrix& ptdf) {
    if (s.status != LpStatus::Optimal)
        throw ValidationError("cannot price a non-optimal dispatch solution");
    const int nb = static_cast<int>(s.bus_ids.size());
    const int nl = static_cast<int>(s.line_ids.size());

    // Share of each risk line's derating pressure explained by its risk cap.
    Eigen::VectorXd cap_share = Eigen::VectorXd::Zero(nl);
    if (s.foc_mode == FocMode::Optimized) {
        for (int l = 0; l < nl; ++l) {
            if (!s.line_at_risk[l]) continue;
            const double limit = s.foc(l) > 0 ? s.eff_upper(l) / s.foc(l) : 0.0;
            const double pressure = (s.mu_upper(l) + s.mu_lower(l)) * limit;
            if (pressure > 1e-9)
                cap_share(l) = std::clamp(s.cap_dual_a(l) / pressure, 0.0, 1.0);
        }
    }

    LmpBreakdown out;
    for (int i = 0; i < nb; ++i) {
        LmpRecord rec;
        rec.bus = s.bus_ids[i];
        rec.energy = s.lambda;
        for (int l = 0; l < nl; ++l) {
            const double term = -ptdf.values(l, i) * (s.mu_upper(l) - s.mu_lower(l));
            if (!s.line_at_risk[l]) {
                rec.congestion_normal += term;
            } else {
                rec.wildfire += cap_share(l) * term;
                rec.congestion_risk += (1.0 - cap_share(l)) * term;
            }
        }
        const double base =
            rec.energy + rec.congestion_normal + rec.congestion_risk + rec.wildfire;
        if (s.bus_has_r[i]) {
            // One extra MW at a shed bus is served at the network margin with
            // probability r and valued at VOLL for the unserved remainder.
            rec.voll = (1.0 - s.shed_ratio(i)) * (s.voll(i) - base);
        }
        rec.lmp = base + rec.voll;
        out.records.push_back(rec);
    }
    return out;
}

FdCheck verify_lmp_fd(const NetworkCase& c, const RiskProfile& risk,
                      const DispatchConfig& config, const std::string& bus, double eps) {
    if (!(eps > 0.0)) throw ValidationError("fd step must be positive");
    const int bi = c.bus_index(bus);
    if (bi < 0) throw ValidationError("unknown bus \"" + bus + "\"");

    DispatchSolution base = solve_dispatch(c, risk, config);
    if (base.status != LpStatus::Optimal)
        throw ValidationError("base problem is not optimal");
    const std::string slack = config.slack.empty() ? c.buses.front().id : config.slack;
    PtdfMatrix ptdf = compute_ptdf(c, slack);
    LmpBreakdown bd = decompose_lmp(base, ptdf);

    FdCheck out;
    out.lmp = bd.records[bi].lmp;

    NetworkCase perturbed = c;
    perturbed.buses[bi].demand_mw += eps;
    DispatchSolution p = solve_dispatch(perturbed, risk, config);
    if (p.status != LpStatus::Optimal) {
        out.perturbed_feasible = false;
        return out;
    }
    out.fd = (p.objective - base.objective) / eps;
    out.gap = std::abs(out.lmp - out.fd);
    return out;
}

}  // namespace wrlmp
