#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nemlat/io.hpp"

namespace nemlat {

enum class ParamKind { Number, Integer, NumberList, IntegerList, PointList, String };

struct ParamSpec {
    std::string name;
    ParamKind kind;
    Json default_value;
    std::string help;
};

struct ExperimentInfo {
    std::string name;
    std::string summary;
    bool stochastic;  // a seed must be supplied
    std::vector<ParamSpec> params;
    // defaults plus, for stochastic experiments, seed 1
    Json default_config() const;
};

struct ExperimentConfig {
    std::string experiment;
    Json parameters = Json::object();
    std::string output;  // empty: nothing written
    std::optional<std::uint64_t> seed;  // overrides parameters.seed
};

// cells are numbers, integers or strings; op names the producing library call
struct ResultTable {
    std::string name;
    std::string op;
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
};

struct ToleranceCheck {
    std::string name;
    std::string op;
    double value;
    std::string relation;  // "<=" or ">="
    double bound;
    bool pass;
};

struct RunReport {
    std::string experiment;
    Json parameters;
    std::vector<ResultTable> tables;
    std::vector<ToleranceCheck> checks;
    bool pass = true;
    double wall_seconds = 0.0;
    std::vector<std::string> artifacts;
    // extra artifacts: file name relative to the output directory, contents
    std::vector<std::pair<std::string, std::string>> files;

    Json summary() const;  // carries "schema": 1
};

// stable order
const std::vector<ExperimentInfo>& list_experiments();
const ExperimentInfo& find_experiment(const std::string& name);

// document form: {"experiment": ..., "parameters": {...}, "output": ...}
ExperimentConfig parse_config(const Json& doc);
// defaults merged in; throws ConfigError on unknown names, wrong types or a missing seed
Json resolve_parameters(const ExperimentConfig& c);

RunReport run(const ExperimentConfig& c);
void write_report(RunReport& r, const std::string& dir);

Json list_json();

}  // namespace nemlat
