#pragma once

#include "kickrot/common.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kr::cli {

inline constexpr const char* tool_version = "1.0.0";

enum ExitCode : int { ok = 0, config_error = 2, numerical_error = 3 };

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field, const std::string& what);
    std::string field;
};

struct ScenarioConfig {
    std::string command;
    std::optional<double> P;
    std::optional<double> tau;
    std::optional<double> s;
    std::string coupling = "dipole";
    std::vector<std::string> methods;
    std::optional<std::string> geometry;
    int grid_points = 400;
    std::optional<double> theta_min;
    std::optional<double> theta_max;
    std::size_t particles = 100000;
    std::uint64_t seed = 1;
    int kicks = 1;
    std::optional<double> P_prime;  // +inf selects the zero-temperature ensemble
    int bins = 360;
    double gap_min = 0.0;
    double gap_max = 0.3;
    std::string output_path;
};

struct ResultEnvelope {
    ScenarioConfig config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // one vector per column
    std::vector<std::string> text_column;   // optional trailing non-numeric column
    std::string text_column_name;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    double runtime_ms = 0.0;
};

nlohmann::ordered_json config_to_json(const ScenarioConfig& c);
// Accepts either a bare config object or a sidecar holding one under "config".
ScenarioConfig config_from_json(const nlohmann::json& j);

// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& c);

// Output path after applying KICKROT_OUTPUT_DIR to relative paths and defaults.
std::string resolve_output_path(const ScenarioConfig& c);
std::string sidecar_path(const std::string& csv_path);

ResultEnvelope run(const ScenarioConfig& c);
std::string format_csv(const ResultEnvelope& r);
nlohmann::ordered_json sidecar_json(const ResultEnvelope& r);

// Runs, writes CSV and sidecar atomically, maps errors to exit codes.
int run_and_write(const ScenarioConfig& c, std::ostream& out, std::ostream& err);

int run_batch(const std::string& file, const std::string& index_path, std::ostream& out, std::ostream& err);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kr::cli
