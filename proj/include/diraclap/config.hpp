#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diraclap/potential.hpp"
#include "diraclap/propagator.hpp"
#include "diraclap/types.hpp"

namespace diraclap {

/// Every violation found while validating a configuration.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct GridConfig {
  double L = 8.0;
  int points = 32;
  bool periodic = false;
  bool operator==(const GridConfig&) const = default;
};

struct InitialData {
  std::vector<double> center;  // defaults to the origin
  double width = 1.0;
  std::vector<double> spinor;  // real spinor amplitudes, defaults to e_0
  bool subtract_mean = true;   // remove the zero mode (needed by massless multipliers)
  bool operator==(const InitialData&) const = default;
};

struct RunConfig {
  std::string subcommand;
  int n = 2;
  double m = 0.0;
  PotentialSpec V;
  GridConfig grid;
  double sigma = 0.6;
  Branch branch = Branch::Outgoing;
  std::vector<double> lambda_grid;
  std::vector<double> gamma_grid;
  double lambda = 1.0;
  bool b_bstar = false;
  std::vector<double> lambda_offsets;
  std::vector<double> s_grid;
  std::vector<StrichartzQuery> strichartz;
  std::vector<double> kato_T;
  std::vector<std::vector<int>> products;  // -1 encodes the short-range index "d"
  double delta = 0.25;
  double d = 1.0;
  std::vector<int> M_list;
  std::vector<double> z_list;
  std::vector<double> times;
  InitialData initial;
  double z = 1.0;                 // kernel-dump momentum
  std::vector<double> radii;      // kernel-dump radii
  bool dump_operator = false;     // kernel-dump: also write the assembled resolvent (DLAP binary)
  std::uint64_t seed = 0;
  std::string output_dir;

  bool operator==(const RunConfig& o) const;
};

extern const std::vector<std::string> kSubcommands;

/// Parses and validates; throws ConfigError listing every violation.
RunConfig parse_config(const nlohmann::json& j, const std::string& subcommand_override = "");
RunConfig parse_config_file(const std::string& path, const std::string& subcommand_override = "");

/// Canonical JSON form of a configuration (re-parses to an equal RunConfig).
nlohmann::json to_json(const RunConfig& c);

/// FNV-1a 64-bit hash of the canonical JSON text.
std::string config_hash(const RunConfig& c);

}  // namespace diraclap
