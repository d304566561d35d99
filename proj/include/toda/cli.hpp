#pragma once

#include <string>

#include <json.hpp>

namespace toda::cli {

using Json = nlohmann::ordered_json;

enum ExitCode { Ok = 0, Validation = 2, NonConvergence = 3, Consistency = 4 };

struct RunResult {
    int exit_code = Ok;
    Json document;
    std::string csv;  // lambda,ln_y rows for nlie-type modes; empty otherwise
};

const char* version();

// Runs one mode on a parsed configuration. Never throws; failures land in exit_code
// and document["error"].
RunResult run(const std::string& mode, const Json& config, bool verbose = false);

std::string to_csv(const std::vector<double>& lambda, const std::vector<double>& ln_y);

}  // namespace toda::cli
