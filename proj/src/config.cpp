#include "mhdbl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mhdbl {

using nlohmann::json;

RunConfig default_config() { return RunConfig{}; }

namespace {

template <class T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  try {
    get_if(j, "schema_version", c.schema_version);
    get_if(j, "eps_list", c.eps_list);
    get_if(j, "mu", c.mu);
    get_if(j, "kappa", c.kappa);
    get_if(j, "rho", c.rho);
    get_if(j, "profile_family", c.profile_family);
    get_if(j, "profile_params", c.profile_params);
    get_if(j, "profile_table", c.profile_table);
    get_if(j, "y_max", c.y_max);
    get_if(j, "n_nodes", c.n_nodes);
    get_if(j, "layer_fraction", c.layer_fraction);
    get_if(j, "n_modes", c.n_modes);
    get_if(j, "eta", c.eta);
    get_if(j, "residual_tol", c.residual_tol);
    get_if(j, "fp_tol", c.fp_tol);
    get_if(j, "max_iter", c.max_iter);
    get_if(j, "delta2", c.delta2);
    get_if(j, "forcing_scale", c.forcing_scale);
    get_if(j, "sweep_families", c.sweep_families);
    get_if(j, "out_dir", c.out_dir);
    get_if(j, "seed", c.seed);
    get_if(j, "threads", c.threads);
    if (j.contains("forcing")) {
      const auto& f = j.at("forcing");
      get_if(f, "family", c.forcing.family);
      get_if(f, "amplitude", c.forcing.amplitude);
      get_if(f, "modes", c.forcing.modes);
      get_if(f, "center", c.forcing.center);
      get_if(f, "width", c.forcing.width);
      get_if(f, "path", c.forcing.path);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["eps_list"] = c.eps_list;
  j["mu"] = c.mu;
  j["kappa"] = c.kappa;
  j["rho"] = c.rho;
  j["profile_family"] = c.profile_family;
  j["profile_params"] = c.profile_params;
  j["profile_table"] = c.profile_table;
  j["y_max"] = c.y_max;
  j["n_nodes"] = c.n_nodes;
  j["layer_fraction"] = c.layer_fraction;
  j["n_modes"] = c.n_modes;
  j["eta"] = c.eta;
  j["residual_tol"] = c.residual_tol;
  j["fp_tol"] = c.fp_tol;
  j["max_iter"] = c.max_iter;
  j["delta2"] = c.delta2;
  j["forcing_scale"] = c.forcing_scale;
  j["forcing"] = {{"family", c.forcing.family}, {"amplitude", c.forcing.amplitude},
                  {"modes", c.forcing.modes},   {"center", c.forcing.center},
                  {"width", c.forcing.width},   {"path", c.forcing.path}};
  j["sweep_families"] = c.sweep_families;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j.dump(2);
}

void validate_config(const RunConfig& c) {
  if (c.eps_list.empty()) throw ConfigError("eps_list must not be empty");
  std::set<double> uniq(c.eps_list.begin(), c.eps_list.end());
  if (uniq.size() != c.eps_list.size()) throw ConfigError("eps values must be distinct");
  for (double e : c.eps_list)
    if (!(e > 0.0)) throw ConfigError("eps values must be positive");
  if (!(c.mu > 0.0) || !(c.kappa > 0.0) || !(c.rho > 0.0))
    throw ConfigError("mu, kappa, rho must be positive");
  if (!(c.y_max > 0.0)) throw ConfigError("y_max must be positive");
  if (c.n_nodes < 64) throw ConfigError("n_nodes must be >= 64");
  if (!(c.layer_fraction >= 0.0 && c.layer_fraction <= 1.0))
    throw ConfigError("layer_fraction must lie in [0,1]");
  if (c.n_modes < 1) throw ConfigError("n_modes must be >= 1");
  if (!(c.eta > 0.0)) throw ConfigError("eta must be positive");
  if (c.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
}

}  // namespace mhdbl
