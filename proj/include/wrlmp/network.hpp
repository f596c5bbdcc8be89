#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wrlmp {

// Thrown on malformed case/profile files (bad JSON, unknown keys, wrong types).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a file parses but the data breaks a model invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Bus {
    std::string id;
    double demand_mw = 0.0;
};

struct Generator {
    std::string id;
    std::string bus;
    double cost_per_mwh = 0.0;
    double p_min_mw = 0.0;
    double p_max_mw = 0.0;
};

struct Line {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    double reactance_pu = 0.0;
    double limit_mw = 0.0;  // t_max; t_min = -t_max
    bool at_risk = false;
};

// Immutable after construction; bus order fixes matrix column order downstream.
struct NetworkCase {
    std::string name;
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;

    int bus_index(const std::string& id) const;
    int line_index(const std::string& id) const;
    double total_demand() const;
    bool connected() const;
};

struct Violation {
    std::string entity;
    std::string rule;
};

// Parses a UTF-8 JSON case file. Unknown keys are rejected. Throws ParseError
// on malformed input and ValidationError when invariants fail.
NetworkCase load_case(const std::string& text);

NetworkCase load_case_file(const std::string& path);

std::string serialize_case(const NetworkCase& c);

std::vector<Violation> validate_case(const NetworkCase& c);

struct OutageResult {
    NetworkCase reduced;
    bool connected = false;
};

// Removes one line; the source case is untouched.
OutageResult apply_outage(const NetworkCase& c, const std::string& line_id);

}  // namespace wrlmp
