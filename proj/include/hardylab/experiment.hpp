#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "hardylab/report.hpp"

namespace hardylab {

// Invalid builder names, unknown keys or malformed values in a config.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string command;     // dim | aikawa | frostman | hardy | scan | example
    std::string builder;     // fixture name; example name for "example"
    nlohmann::json params;   // resolved fixture parameters
    nlohmann::json options;  // command options with defaults filled in
    int threads = 1;
    nlohmann::json raw;      // the document as given
};

// Validates names and keys. Fixture parameters may sit under "params" or at
// top level; "β" is accepted as a spelling of "beta".
ExperimentConfig parse_config(const nlohmann::json& doc);

ReportBundle run(const ExperimentConfig& config);

const char* version();

}  // namespace hardylab
