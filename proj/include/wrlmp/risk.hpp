#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wrlmp/network.hpp"

namespace wrlmp {

// Vegetation risk categories, ordered from least to most severe.
enum class RiskCategory { VLWR, LWR, MWR, HWR, VHWR, DWR };

std::string category_name(RiskCategory c);
std::string category_color(RiskCategory c);
std::optional<RiskCategory> parse_category(const std::string& name);

// risk(foc) = max_j (a_j * foc + b_j): convex piecewise-linear on [0, 1].
struct RiskSegments {
    std::vector<std::pair<double, double>> pieces;  // (a_j, b_j)
    double cap = kInfRisk;

    static constexpr double kInfRisk = 1e30;
};

struct LineRisk {
    RiskSegments segments;
    double foc_min = 0.0;
    double foc_max = 1.0;
    std::optional<RiskCategory> category;
};

struct BusRisk {
    double voll = 0.0;  // $/MWh for unserved energy
    double r_min = 0.0;
    double r_max = 1.0;
};

struct RiskProfile {
    std::map<std::string, LineRisk> lines;   // keyed by line id; must cover at-risk lines
    std::map<std::string, BusRisk> buses;    // keyed by bus id
    std::map<std::string, double> wr;        // per-location wildfire risk in [0, 1]
};

// The identity calibration; the single override point for alternatives.
double wr_to_foc(double wr);

using FocBounds = std::pair<double, double>;

// Default presets; an override map replaces individual entries.
FocBounds category_to_foc_bounds(RiskCategory c,
                                 const std::map<RiskCategory, FocBounds>* overrides = nullptr);

double eval_risk(const RiskSegments& segments, double foc);

// Largest foc in [0,1] with eval_risk <= cap, or nullopt when none exists.
std::optional<double> max_foc_under_cap(const RiskSegments& segments, double cap);

RiskProfile load_risk_profile(const std::string& text);
RiskProfile load_risk_profile_file(const std::string& path);

// A permissive profile (identity segments, unit bounds) for the given case.
RiskProfile default_risk_profile(const NetworkCase& c, double voll = 10000.0);

// Throws ValidationError unless the profile covers every at-risk line of the case.
void check_profile_covers(const RiskProfile& profile, const NetworkCase& c);

}  // namespace wrlmp
