#pragma once

// Scenario configuration: one JSON document describing the region, wind,
// sensing, spread, belief, policies and experiment settings.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wildsim/belief.hpp"
#include "wildsim/fire_env.hpp"
#include "wildsim/policy_drone.hpp"
#include "wildsim/policy_heli.hpp"
#include "wildsim/region.hpp"
#include "wildsim/sampler.hpp"

namespace wildsim {

// Invalid or inconsistent configuration input; the CLI maps this to exit
// code 1 (runtime failures keep exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FireInitParams {
  int min_zones = 3;
  int max_zones = 6;
  double scatter_sigma_m = 60.0;   // spatial spread of the initial cluster
  double avoid_home_m = 240.0;     // keep the centroid at least this far out
};

struct BeliefInitParams {
  double amplitude = 0.9;  // prior ignition probability at the centroid
  double sigma_m = 90.0;   // radial decay scale of the prior
};

struct PolicySelection {
  std::string heli = "cfa-dla";   // null | dla1 | cfa-dla
  std::string drone = "ie-dla";   // null | pfa-cfa | ts-dla | ie-dla
};

struct ScenarioConfig {
  std::string region_file;
  int home_zone = 0;
  std::string wind_file;          // empty: sample from wind_model
  WindModelParams wind_model{};
  int horizon_steps = 12;         // episode length T
  double rho_obs_m = 180.0;
  double rho_heli_m = 120.0;
  double d_max_m = 360.0;
  double battery_step_min = 10.0; // battery starts at horizon_steps * this
  double sigma_obs = 2.0;
  double c_fail = 1e4;
  double class_c_area_m2 = 40468.564224;  // burned-area threshold for reporting
  SpreadParams spread{};
  SpreadKernelParams kernel{};
  ClassifierParams classifier{};
  GpcParams gpc{};
  SamplerParams sampler{};
  FuelBeliefParams fuel_belief{};
  FireInitParams fire_init{};
  BeliefInitParams belief_init{};
  PolicySelection policy{};
  HeliPolicyParams heli_params{};
  DronePolicyParams drone_params{};
  std::uint64_t base_seed = 1;
  int episodes = 100;
};

// Parses and validates; unknown keys and out-of-range values raise
// ConfigError with the offending key in the message. Relative file paths are
// resolved against the config file's directory.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig config_from_json_text(const std::string& text, const std::string& base_dir);
std::string config_to_json_text(const ScenarioConfig& c);

// Tuning grid: the cartesian product of per-parameter value lists. Names
// address numeric config fields ("kernel.theta0", "heli.theta",
// "drone.theta_ie", "classifier.threshold_l", ...).
struct TuneSpec {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
};

// Applies one assignment; throws ConfigError for unknown names.
void set_tunable(ScenarioConfig& c, const std::string& name, double value);

}  // namespace wildsim
