#include "wrlmp/risk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wrlmp {

using json = nlohmann::ordered_json;

std::string category_name(RiskCategory c) {
    switch (c) {
        case RiskCategory::VLWR: return "VLWR";
        case RiskCategory::LWR: return "LWR";
        case RiskCategory::MWR: return "MWR";
        case RiskCategory::HWR: return "HWR";
        case RiskCategory::VHWR: return "VHWR";
        case RiskCategory::DWR: return "DWR";
    }
    return "?";
}

std::string category_color(RiskCategory c) {
    switch (c) {
        case RiskCategory::VLWR: return "Dark Green";
        case RiskCategory::LWR: return "Light Green";
        case RiskCategory::MWR: return "Faded Green";
        case RiskCategory::HWR: return "Yellow";
        case RiskCategory::VHWR: return "Orange";
        case RiskCategory::DWR: return "Red";
    }
    return "?";
}

std::optional<RiskCategory> parse_category(const std::string& name) {
    for (RiskCategory c : {RiskCategory::VLWR, RiskCategory::LWR, RiskCategory::MWR,
                           RiskCategory::HWR, RiskCategory::VHWR, RiskCategory::DWR})
        if (category_name(c) == name) return c;
    return std::nullopt;
}

double wr_to_foc(double wr) {
    if (!(wr >= 0.0 && wr <= 1.0))
        throw ValidationError("wildfire risk value must lie in [0, 1]");
    return wr;
}

FocBounds category_to_foc_bounds(RiskCategory c,
                                 const std::map<RiskCategory, FocBounds>* overrides) {
    if (overrides) {
        auto it = overrides->find(c);
        if (it != overrides->end()) return it->second;
    }
    switch (c) {
        case RiskCategory::VLWR: return {0.9, 1.0};
        case RiskCategory::LWR: return {0.75, 1.0};
        case RiskCategory::MWR: return {0.5, 0.9};
        case RiskCategory::HWR: return {0.4, 0.75};
        case RiskCategory::VHWR: return {0.25, 0.5};
        case RiskCategory::DWR: return {0.0, 0.25};
    }
    return {0.0, 1.0};
}

double eval_risk(const RiskSegments& segments, double foc) {
    if (segments.pieces.empty())
        throw ValidationError("risk function has no segments");
    double r = -RiskSegments::kInfRisk;
    for (const auto& [a, b] : segments.pieces) r = std::max(r, a * foc + b);
    return r;
}

std::optional<double> max_foc_under_cap(const RiskSegments& segments, double cap) {
    if (eval_risk(segments, 0.0) > cap) return std::nullopt;
    // Each segment a*f + b <= cap restricts f; intersect over segments with a > 0.
    double best = 1.0;
    for (const auto& [a, b] : segments.pieces) {
        if (a > 0.0)
            best = std::min(best, (cap - b) / a);
        else if (a < 0.0)
            continue;  // decreasing segment never binds the upper end once f=0 passes
        else if (b > cap)
            return std::nullopt;
    }
    // Decreasing segments can violate the cap at low foc but we only report the
    // maximum; verify it.
    if (eval_risk(segments, best) > cap + 1e-12) {
        // Binary search down the violated region (convexity gives one crossing).
        double lo = 0.0, hi = best;
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo + hi);
            (eval_risk(segments, mid) <= cap ? lo : hi) = mid;
        }
        best = lo;
    }
    return std::clamp(best, 0.0, 1.0);
}

namespace {

RiskSegments parse_segments(const json& j, const std::string& ctx) {
    RiskSegments s;
    if (j.contains("segments")) {
        for (const auto& seg : j["segments"]) {
            if (!seg.is_array() || seg.size() != 2)
                throw ParseError(ctx + ": each segment must be [a, b]");
            s.pieces.emplace_back(seg[0].get<double>(), seg[1].get<double>());
        }
    }
    if (s.pieces.empty()) s.pieces.emplace_back(1.0, 0.0);
    if (j.contains("cap")) s.cap = j["cap"].get<double>();
    return s;
}

}  // namespace

RiskProfile load_risk_profile(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("risk profile: ") + e.what());
    }
    RiskProfile p;
    if (doc.contains("lines")) {
        for (auto it = doc["lines"].begin(); it != doc["lines"].end(); ++it) {
            const std::string ctx = "risk line " + it.key();
            LineRisk lr;
            lr.segments = parse_segments(it.value(), ctx);
            if (it.value().contains("foc_min")) lr.foc_min = it.value()["foc_min"].get<double>();
            if (it.value().contains("foc_max")) lr.foc_max = it.value()["foc_max"].get<double>();
            if (it.value().contains("category")) {
                auto c = parse_category(it.value()["category"].get<std::string>());
                if (!c) throw ParseError(ctx + ": unknown category");
                lr.category = c;
            }
            if (!(0.0 <= lr.foc_min && lr.foc_min <= lr.foc_max && lr.foc_max <= 1.0))
                throw ValidationError(ctx + ": requires 0 <= foc_min <= foc_max <= 1");
            p.lines[it.key()] = lr;
        }
    }
    if (doc.contains("buses")) {
        for (auto it = doc["buses"].begin(); it != doc["buses"].end(); ++it) {
            BusRisk br;
            if (it.value().contains("voll")) br.voll = it.value()["voll"].get<double>();
            if (it.value().contains("r_min")) br.r_min = it.value()["r_min"].get<double>();
            if (it.value().contains("r_max")) br.r_max = it.value()["r_max"].get<double>();
            if (br.voll < 0.0)
                throw ValidationError("risk bus " + it.key() + ": voll must be >= 0");
            if (!(0.0 <= br.r_min && br.r_min <= br.r_max && br.r_max <= 1.0))
                throw ValidationError("risk bus " + it.key() +
                                      ": requires 0 <= r_min <= r_max <= 1");
            p.buses[it.key()] = br;
        }
    }
    if (doc.contains("wr")) {
        for (auto it = doc["wr"].begin(); it != doc["wr"].end(); ++it) {
            double v = it.value().get<double>();
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("wr " + it.key() + ": value must lie in [0, 1]");
            p.wr[it.key()] = v;
        }
    }
    return p;
}

RiskProfile load_risk_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("risk profile not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_risk_profile(ss.str());
}

RiskProfile default_risk_profile(const NetworkCase& c, double voll) {
    RiskProfile p;
    for (const auto& l : c.lines)
        if (l.at_risk) p.lines[l.id] = LineRisk{};
    for (const auto& b : c.buses) p.buses[b.id] = BusRisk{voll, 0.0, 1.0};
    return p;
}

void check_profile_covers(const RiskProfile& profile, const NetworkCase& c) {
    for (const auto& l : c.lines)
        if (l.at_risk && !profile.lines.count(l.id))
            throw ValidationError("risk profile missing at-risk line \"" + l.id + "\"");
}

}  // namespace wrlmp
