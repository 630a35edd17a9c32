#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diraclap/config.hpp"
#include "diraclap/grid.hpp"

namespace diraclap {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitStatus { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

struct RunReport {
  int exit_status = kExitOk;
  nlohmann::json config_echo;
  std::string tool_version = kToolVersion;
  std::vector<std::pair<std::string, double>> wall_times;  // stage name, seconds
  std::vector<std::string> warnings;
  std::vector<std::string> tables;  // file names relative to the output directory
  nlohmann::json results;           // scalar results per subcommand
  std::string error;
};

/// Runs the configured subcommand and writes its tables plus summary.json into out_dir.
/// Never throws for validation or numerical failures; they set exit_status (2 or 3).
RunReport run(const RunConfig& config, const std::string& out_dir, std::ostream& log);

/// Parses the config file and runs it; parse failures are reported as exit status 2.
RunReport run_file(const std::string& config_path, const std::string& subcommand, const std::string& out_dir,
                   std::ostream& log);

/// Normalized Gaussian wave packet described by InitialData (mean removed on request).
SpinorField initial_field(const InitialData& init, const Grid& grid, int spinor_dim);

/// "%.17g" formatting used by every table.
std::string format_double(double x);

}  // namespace diraclap
