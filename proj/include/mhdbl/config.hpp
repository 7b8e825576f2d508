#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mhdbl/forcing.hpp"

namespace mhdbl {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// One experiment description; JSON on disk, defaults documented by
/// --print-defaults.
struct RunConfig {
  int schema_version = 1;
  std::vector<double> eps_list{1e-3};
  double mu = 1.0, kappa = 1.0, rho = 1.0;

  std::string profile_family = "exp-approach";
  std::vector<double> profile_params;  // empty = family defaults
  std::string profile_table;           // user-tabulated input

  double y_max = 12.0;
  int n_nodes = 513;
  double layer_fraction = 0.5;

  int n_modes = 4;
  double eta = 1.0;
  double residual_tol = 1e-6;
  double fp_tol = 1e-10;
  int max_iter = 50;
  double delta2 = 0.1;
  double forcing_scale = -1.0;  // >0: rescale to this fraction of the smallness bound

  ForcingSpec forcing;
  std::vector<std::string> sweep_families;  // empty: just cfg.forcing

  std::string out_dir = "out";
  std::uint64_t seed = 12345;
  int threads = 1;
};

RunConfig default_config();
RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);
void validate_config(const RunConfig& cfg);  // throws ConfigError

}  // namespace mhdbl
