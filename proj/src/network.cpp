#include "wrlmp/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wrlmp {

using json = nlohmann::ordered_json;

int NetworkCase::bus_index(const std::string& id) const {
    for (size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return static_cast<int>(i);
    return -1;
}

int NetworkCase::line_index(const std::string& id) const {
    for (size_t i = 0; i < lines.size(); ++i)
        if (lines[i].id == id) return static_cast<int>(i);
    return -1;
}

double NetworkCase::total_demand() const {
    double d = 0.0;
    for (const auto& b : buses) d += b.demand_mw;
    return d;
}

bool NetworkCase::connected() const {
    if (buses.empty()) return false;
    if (buses.size() == 1) return true;
    std::vector<std::vector<int>> adj(buses.size());
    for (const auto& l : lines) {
        int i = bus_index(l.from_bus), j = bus_index(l.to_bus);
        if (i < 0 || j < 0) continue;
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<bool> seen(buses.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    size_t count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                stack.push_back(v);
            }
    }
    return count == buses.size();
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& context) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ParseError(context + ": unknown key \"" + it.key() + "\"");
}

double require_number(const json& obj, const std::string& key, const std::string& context) {
    if (!obj.contains(key)) throw ParseError(context + ": missing key \"" + key + "\"");
    if (!obj[key].is_number()) throw ParseError(context + ": \"" + key + "\" must be a number");
    return obj[key].get<double>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& context) {
    if (!obj.contains(key)) throw ParseError(context + ": missing key \"" + key + "\"");
    if (!obj[key].is_string()) throw ParseError(context + ": \"" + key + "\" must be a string");
    return obj[key].get<std::string>();
}

}  // namespace

NetworkCase load_case(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("case file: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("case file: top level must be an object");
    reject_unknown_keys(doc, {"name", "buses", "lines", "generators"}, "case file");

    NetworkCase c;
    c.name = doc.contains("name") ? require_string(doc, "name", "case file") : "";

    if (!doc.contains("buses") || !doc["buses"].is_array())
        throw ParseError("case file: \"buses\" array required");
    for (const auto& jb : doc["buses"]) {
        reject_unknown_keys(jb, {"id", "demand_mw"}, "bus");
        Bus b;
        b.id = require_string(jb, "id", "bus");
        b.demand_mw = jb.contains("demand_mw") ? require_number(jb, "demand_mw", "bus " + b.id) : 0.0;
        c.buses.push_back(b);
    }

    if (doc.contains("lines")) {
        if (!doc["lines"].is_array()) throw ParseError("case file: \"lines\" must be an array");
        for (const auto& jl : doc["lines"]) {
            reject_unknown_keys(jl, {"id", "from", "to", "reactance_pu", "limit_mw", "at_risk"},
                                "line");
            Line l;
            l.id = require_string(jl, "id", "line");
            l.from_bus = require_string(jl, "from", "line " + l.id);
            l.to_bus = require_string(jl, "to", "line " + l.id);
            l.reactance_pu = require_number(jl, "reactance_pu", "line " + l.id);
            l.limit_mw = require_number(jl, "limit_mw", "line " + l.id);
            if (jl.contains("at_risk")) {
                if (!jl["at_risk"].is_boolean())
                    throw ParseError("line " + l.id + ": \"at_risk\" must be a boolean");
                l.at_risk = jl["at_risk"].get<bool>();
            }
            c.lines.push_back(l);
        }
    }

    if (!doc.contains("generators") || !doc["generators"].is_array())
        throw ParseError("case file: \"generators\" array required");
    for (const auto& jg : doc["generators"]) {
        reject_unknown_keys(jg, {"id", "bus", "cost_per_mwh", "p_min_mw", "p_max_mw"}, "generator");
        Generator g;
        g.id = require_string(jg, "id", "generator");
        g.bus = require_string(jg, "bus", "generator " + g.id);
        g.cost_per_mwh = require_number(jg, "cost_per_mwh", "generator " + g.id);
        g.p_min_mw = require_number(jg, "p_min_mw", "generator " + g.id);
        g.p_max_mw = require_number(jg, "p_max_mw", "generator " + g.id);
        c.generators.push_back(g);
    }

    auto violations = validate_case(c);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "case \"" << c.name << "\" invalid:";
        for (const auto& v : violations) os << " [" << v.entity << ": " << v.rule << "]";
        throw ValidationError(os.str());
    }
    if (!c.connected())
        throw ValidationError("case \"" + c.name + "\": bus graph is disconnected");
    return c;
}

NetworkCase load_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("case file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_case(ss.str());
}

std::string serialize_case(const NetworkCase& c) {
    json doc;
    doc["name"] = c.name;
    doc["buses"] = json::array();
    for (const auto& b : c.buses) doc["buses"].push_back({{"id", b.id}, {"demand_mw", b.demand_mw}});
    doc["lines"] = json::array();
    for (const auto& l : c.lines)
        doc["lines"].push_back({{"id", l.id},
                                {"from", l.from_bus},
                                {"to", l.to_bus},
                                {"reactance_pu", l.reactance_pu},
                                {"limit_mw", l.limit_mw},
                                {"at_risk", l.at_risk}});
    doc["generators"] = json::array();
    for (const auto& g : c.generators)
        doc["generators"].push_back({{"id", g.id},
                                     {"bus", g.bus},
                                     {"cost_per_mwh", g.cost_per_mwh},
                                     {"p_min_mw", g.p_min_mw},
                                     {"p_max_mw", g.p_max_mw}});
    return doc.dump(2);
}

std::vector<Violation> validate_case(const NetworkCase& c) {
    std::vector<Violation> out;
    std::set<std::string> bus_ids;
    for (const auto& b : c.buses) {
        if (!bus_ids.insert(b.id).second) out.push_back({"bus " + b.id, "duplicate bus id"});
        if (!std::isfinite(b.demand_mw) || b.demand_mw < 0.0)
            out.push_back({"bus " + b.id, "demand must be finite and >= 0"});
    }
    std::set<std::string> line_ids;
    for (const auto& l : c.lines) {
        if (!line_ids.insert(l.id).second) out.push_back({"line " + l.id, "duplicate line id"});
        if (!bus_ids.count(l.from_bus))
            out.push_back({"line " + l.id, "from bus \"" + l.from_bus + "\" does not exist"});
        if (!bus_ids.count(l.to_bus))
            out.push_back({"line " + l.id, "to bus \"" + l.to_bus + "\" does not exist"});
        if (l.from_bus == l.to_bus)
            out.push_back({"line " + l.id, "from and to bus must differ"});
        if (!(l.reactance_pu > 0.0) || !std::isfinite(l.reactance_pu))
            out.push_back({"line " + l.id, "reactance must be > 0"});
        if (!(l.limit_mw >= 0.0) || !std::isfinite(l.limit_mw))
            out.push_back({"line " + l.id, "limit must be finite and >= 0"});
    }
    std::set<std::string> gen_ids;
    for (const auto& g : c.generators) {
        if (!gen_ids.insert(g.id).second)
            out.push_back({"generator " + g.id, "duplicate generator id"});
        if (!bus_ids.count(g.bus))
            out.push_back({"generator " + g.id, "bus \"" + g.bus + "\" does not exist"});
        if (!std::isfinite(g.cost_per_mwh) || g.cost_per_mwh < 0.0)
            out.push_back({"generator " + g.id, "cost must be finite and >= 0"});
        if (!(0.0 <= g.p_min_mw) || !(g.p_min_mw <= g.p_max_mw))
            out.push_back({"generator " + g.id, "requires 0 <= p_min <= p_max"});
    }
    if (c.generators.empty()) out.push_back({"case " + c.name, "at least one generator required"});
    return out;
}

OutageResult apply_outage(const NetworkCase& c, const std::string& line_id) {
    if (c.line_index(line_id) < 0)
        throw ValidationError("unknown line id \"" + line_id + "\"");
    OutageResult r;
    r.reduced = c;
    r.reduced.lines.erase(
        std::remove_if(r.reduced.lines.begin(), r.reduced.lines.end(),
                       [&](const Line& l) { return l.id == line_id; }),
        r.reduced.lines.end());
    r.connected = r.reduced.connected();
    return r;
}

}  // namespace wrlmp
