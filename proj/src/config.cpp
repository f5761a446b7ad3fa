#include "wildsim/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wildsim {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

// Pulls a value of the requested type, rejecting silent coercions.
template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(key, e.what());
  }
}

// Visits every known key of an object; unknown keys are an error so typos
// in option names surface immediately instead of reverting to defaults.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string prefix) : obj_(j), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) fail(prefix_.empty() ? "<root>" : prefix_, "expected a JSON object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) fail(path(it.key()), "unknown key");
  }

  template <typename T>
  void field(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    out = get_as<T>(*it, path(key));
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& sub(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string path(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void read_wind_model(const json& j, const std::string& prefix, WindModelParams& p) {
  ObjectReader r(j, prefix);
  r.field("mu_u", p.mu_u);
  r.field("sigma_u", p.sigma_u);
  r.field("sigma_phi", p.sigma_phi);
  r.field("initial_phi", p.initial_phi);
  if (p.sigma_u < 0.0) fail(prefix + ".sigma_u", "must be >= 0");
  if (p.sigma_phi < 0.0) fail(prefix + ".sigma_phi", "must be >= 0");
}

void read_spread(const json& j, SpreadParams& p) {
  ObjectReader r(j, "spread");
  r.field("ros_scale", p.ros_scale);
  r.field("wind_coeff", p.wind_coeff);
  r.field("wind_exp", p.wind_exp);
  r.field("slope_coeff", p.slope_coeff);
  r.field("lb_coeff", p.lb_coeff);
  r.field("lb_max", p.lb_max);
  r.field("edge_noise_sigma", p.edge_noise_sigma);
  r.field("step_minutes", p.step_minutes);
  r.field("cutoff_zones", p.cutoff_zones);
  r.field("p_spot", p.p_spot);
  r.field("lambda_spot", p.lambda_spot);
  if (p.ros_scale <= 0.0) fail("spread.ros_scale", "must be > 0");
  if (p.step_minutes <= 0.0) fail("spread.step_minutes", "must be > 0");
  if (p.cutoff_zones <= 0.0) fail("spread.cutoff_zones", "must be > 0");
  if (p.p_spot < 0.0 || p.p_spot > 1.0) fail("spread.p_spot", "must lie in [0,1]");
  if (p.lambda_spot <= 0.0) fail("spread.lambda_spot", "must be > 0");
  if (p.edge_noise_sigma < 0.0) fail("spread.edge_noise_sigma", "must be >= 0");
  if (p.lb_max < 1.0) fail("spread.lb_max", "must be >= 1");
}

void read_kernel(const json& j, SpreadKernelParams& p) {
  ObjectReader r(j, "kernel");
  r.field("theta0", p.theta0);
  r.field("theta1", p.theta1);
  r.field("cutoff_zones", p.cutoff_zones);
  if (p.theta1 < 0.0) fail("kernel.theta1", "must be >= 0");
  if (p.theta1 < std::abs(p.theta0))
    fail("kernel.theta0", "|theta0| must not exceed theta1 (decay rate must stay >= 0)");
  if (p.cutoff_zones <= 0.0) fail("kernel.cutoff_zones", "must be > 0");
}

void read_classifier(const json& j, ClassifierParams& p) {
  ObjectReader r(j, "classifier");
  r.field("sigma_obs", p.sigma_obs);
  r.field("threshold_l", p.threshold_l);
  if (p.sigma_obs <= 0.0) fail("classifier.sigma_obs", "must be > 0");
  if (p.threshold_l <= 0.0) fail("classifier.threshold_l", "must be > 0");
}

void read_gpc(const json& j, const std::string& prefix, GpcParams& p) {
  ObjectReader r(j, prefix);
  r.field("theta0_cov", p.theta0_cov);
  r.field("theta1_cov", p.theta1_cov);
  r.field("theta2_cov", p.theta2_cov);
  r.field("active_radius_m", p.active_radius_m);
  r.field("clamp_eps", p.clamp_eps);
  r.field("max_newton", p.max_newton);
  r.field("newton_tol", p.newton_tol);
  if (p.theta0_cov < 0.0) fail(prefix + ".theta0_cov", "must be >= 0");
  if (p.theta1_cov < 0.0) fail(prefix + ".theta1_cov", "must be >= 0");
  if (p.theta2_cov <= 0.0) fail(prefix + ".theta2_cov", "must be > 0");
  if (p.active_radius_m <= 0.0) fail(prefix + ".active_radius_m", "must be > 0");
  if (p.clamp_eps <= 0.0 || p.clamp_eps >= 0.5) fail(prefix + ".clamp_eps", "must lie in (0,0.5)");
  if (p.max_newton < 1) fail(prefix + ".max_newton", "must be >= 1");
  if (p.newton_tol <= 0.0) fail(prefix + ".newton_tol", "must be > 0");
}

void read_sampler(const json& j, SamplerParams& p) {
  ObjectReader r(j, "sampler");
  if (r.has("gpc")) read_gpc(r.sub("gpc"), "sampler.gpc", p.gpc);
  r.field("active_lo", p.active_lo);
  r.field("active_hi", p.active_hi);
  if (!(p.active_lo > 0.0 && p.active_lo < p.active_hi && p.active_hi < 1.0))
    fail("sampler.active_lo", "need 0 < active_lo < active_hi < 1");
}

void read_fire_init(const json& j, FireInitParams& p) {
  ObjectReader r(j, "fire_init");
  r.field("min_zones", p.min_zones);
  r.field("max_zones", p.max_zones);
  r.field("scatter_sigma_m", p.scatter_sigma_m);
  r.field("avoid_home_m", p.avoid_home_m);
  if (p.min_zones < 1) fail("fire_init.min_zones", "must be >= 1");
  if (p.max_zones < p.min_zones) fail("fire_init.max_zones", "must be >= min_zones");
  if (p.scatter_sigma_m < 0.0) fail("fire_init.scatter_sigma_m", "must be >= 0");
  if (p.avoid_home_m < 0.0) fail("fire_init.avoid_home_m", "must be >= 0");
}

void read_belief_init(const json& j, BeliefInitParams& p) {
  ObjectReader r(j, "belief_init");
  r.field("amplitude", p.amplitude);
  r.field("sigma_m", p.sigma_m);
  if (p.amplitude <= 0.0 || p.amplitude >= 1.0) fail("belief_init.amplitude", "must lie in (0,1)");
  if (p.sigma_m <= 0.0) fail("belief_init.sigma_m", "must be > 0");
}

void read_policy(const json& j, PolicySelection& p) {
  ObjectReader r(j, "policy");
  r.field("heli", p.heli);
  r.field("drone", p.drone);
  if (p.heli != "null" && p.heli != "dla1" && p.heli != "cfa-dla")
    fail("policy.heli", "expected one of null | dla1 | cfa-dla, got '" + p.heli + "'");
  if (p.drone != "null" && p.drone != "pfa-cfa" && p.drone != "ts-dla" && p.drone != "ie-dla")
    fail("policy.drone",
         "expected one of null | pfa-cfa | ts-dla | ie-dla, got '" + p.drone + "'");
}

void read_heli_params(const json& j, HeliPolicyParams& p) {
  ObjectReader r(j, "heli_params");
  r.field("radius_m", p.radius_m);
  r.field("theta", p.theta);
  if (p.radius_m < 0.0) fail("heli_params.radius_m", "must be >= 0");
}

void read_drone_params(const json& j, DronePolicyParams& p) {
  ObjectReader r(j, "drone_params");
  r.field("theta_ie", p.theta_ie);
  r.field("theta_ie_stage", p.theta_ie_stage);
  r.field("horizon", p.horizon);
  r.field("num_scenarios", p.num_scenarios);
  if (r.has("wind_model")) read_wind_model(r.sub("wind_model"), "drone_params.wind_model", p.wind_model);
  if (p.horizon < 1) fail("drone_params.horizon", "must be >= 1");
  if (p.num_scenarios < 1) fail("drone_params.num_scenarios", "must be >= 1");
}

std::string resolve_path(const std::string& file, const std::string& base_dir) {
  if (file.empty()) return file;
  const std::filesystem::path p(file);
  if (p.is_absolute() || base_dir.empty()) return file;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

ScenarioConfig config_from_json_text(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ScenarioConfig c;
  {
    ObjectReader r(j, "");
    r.field("region_file", c.region_file);
    r.field("home_zone", c.home_zone);
    r.field("wind_file", c.wind_file);
    if (r.has("wind_model")) read_wind_model(r.sub("wind_model"), "wind_model", c.wind_model);
    r.field("horizon_steps", c.horizon_steps);
    r.field("rho_obs_m", c.rho_obs_m);
    r.field("rho_heli_m", c.rho_heli_m);
    r.field("d_max_m", c.d_max_m);
    r.field("battery_step_min", c.battery_step_min);
    r.field("sigma_obs", c.sigma_obs);
    r.field("c_fail", c.c_fail);
    r.field("class_c_area_m2", c.class_c_area_m2);
    if (r.has("spread")) read_spread(r.sub("spread"), c.spread);
    if (r.has("kernel")) read_kernel(r.sub("kernel"), c.kernel);
    if (r.has("classifier")) read_classifier(r.sub("classifier"), c.classifier);
    if (r.has("gpc")) read_gpc(r.sub("gpc"), "gpc", c.gpc);
    if (r.has("sampler")) read_sampler(r.sub("sampler"), c.sampler);
    if (r.has("fuel_belief")) {
      ObjectReader fr(r.sub("fuel_belief"), "fuel_belief");
      fr.field("burn_factor_posterior", c.fuel_belief.burn_factor_posterior);
    }
    if (r.has("fire_init")) read_fire_init(r.sub("fire_init"), c.fire_init);
    if (r.has("belief_init")) read_belief_init(r.sub("belief_init"), c.belief_init);
    if (r.has("policy")) read_policy(r.sub("policy"), c.policy);
    if (r.has("heli_params")) read_heli_params(r.sub("heli_params"), c.heli_params);
    c.drone_params.wind_model = c.wind_model;  // default assumed wind = true wind
    if (r.has("drone_params")) read_drone_params(r.sub("drone_params"), c.drone_params);
    r.field("base_seed", c.base_seed);
    r.field("episodes", c.episodes);
  }

  if (c.region_file.empty()) fail("region_file", "is required");
  c.region_file = resolve_path(c.region_file, base_dir);
  c.wind_file = resolve_path(c.wind_file, base_dir);
  if (c.horizon_steps < 1) fail("horizon_steps", "must be >= 1");
  if (c.rho_obs_m <= 0.0) fail("rho_obs_m", "must be > 0");
  if (c.rho_heli_m < 0.0) fail("rho_heli_m", "must be >= 0");
  if (c.d_max_m <= 0.0) fail("d_max_m", "must be > 0");
  if (c.battery_step_min <= 0.0) fail("battery_step_min", "must be > 0");
  if (c.sigma_obs <= 0.0) fail("sigma_obs", "must be > 0");
  if (c.c_fail < 0.0) fail("c_fail", "must be >= 0");
  if (c.class_c_area_m2 <= 0.0) fail("class_c_area_m2", "must be > 0");
  if (c.home_zone < 0) fail("home_zone", "must be >= 0");
  if (c.episodes < 1) fail("episodes", "must be >= 1");

  // Shared scales flow into the policy parameter structs so each consumer
  // reads one coherent place.
  c.classifier.sigma_obs = c.sigma_obs;
  c.heli_params.radius_m = c.rho_heli_m;
  c.drone_params.d_max_m = c.d_max_m;
  c.drone_params.obs_radius_m = c.rho_obs_m;
  c.drone_params.battery_step_min = c.battery_step_min;
  c.drone_params.c_fail = c.c_fail;
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return config_from_json_text(buf.str(), dir);
}

std::string config_to_json_text(const ScenarioConfig& c) {
  json j;
  j["region_file"] = c.region_file;
  j["home_zone"] = c.home_zone;
  if (!c.wind_file.empty()) j["wind_file"] = c.wind_file;
  j["wind_model"] = {{"mu_u", c.wind_model.mu_u},
                     {"sigma_u", c.wind_model.sigma_u},
                     {"sigma_phi", c.wind_model.sigma_phi},
                     {"initial_phi", c.wind_model.initial_phi}};
  j["horizon_steps"] = c.horizon_steps;
  j["rho_obs_m"] = c.rho_obs_m;
  j["rho_heli_m"] = c.rho_heli_m;
  j["d_max_m"] = c.d_max_m;
  j["battery_step_min"] = c.battery_step_min;
  j["sigma_obs"] = c.sigma_obs;
  j["c_fail"] = c.c_fail;
  j["class_c_area_m2"] = c.class_c_area_m2;
  j["spread"] = {{"ros_scale", c.spread.ros_scale},
                 {"wind_coeff", c.spread.wind_coeff},
                 {"wind_exp", c.spread.wind_exp},
                 {"slope_coeff", c.spread.slope_coeff},
                 {"lb_coeff", c.spread.lb_coeff},
                 {"lb_max", c.spread.lb_max},
                 {"edge_noise_sigma", c.spread.edge_noise_sigma},
                 {"step_minutes", c.spread.step_minutes},
                 {"cutoff_zones", c.spread.cutoff_zones},
                 {"p_spot", c.spread.p_spot},
                 {"lambda_spot", c.spread.lambda_spot}};
  j["kernel"] = {{"theta0", c.kernel.theta0},
                 {"theta1", c.kernel.theta1},
                 {"cutoff_zones", c.kernel.cutoff_zones}};
  j["classifier"] = {{"sigma_obs", c.classifier.sigma_obs},
                     {"threshold_l", c.classifier.threshold_l}};
  j["gpc"] = {{"theta0_cov", c.gpc.theta0_cov},
              {"theta1_cov", c.gpc.theta1_cov},
              {"theta2_cov", c.gpc.theta2_cov},
              {"active_radius_m", c.gpc.active_radius_m},
              {"clamp_eps", c.gpc.clamp_eps},
              {"max_newton", c.gpc.max_newton},
              {"newton_tol", c.gpc.newton_tol}};
  j["sampler"] = {{"gpc",
                   {{"theta0_cov", c.sampler.gpc.theta0_cov},
                    {"theta1_cov", c.sampler.gpc.theta1_cov},
                    {"theta2_cov", c.sampler.gpc.theta2_cov},
                    {"active_radius_m", c.sampler.gpc.active_radius_m},
                    {"clamp_eps", c.sampler.gpc.clamp_eps},
                    {"max_newton", c.sampler.gpc.max_newton},
                    {"newton_tol", c.sampler.gpc.newton_tol}}},
                  {"active_lo", c.sampler.active_lo},
                  {"active_hi", c.sampler.active_hi}};
  j["fuel_belief"] = {{"burn_factor_posterior", c.fuel_belief.burn_factor_posterior}};
  j["fire_init"] = {{"min_zones", c.fire_init.min_zones},
                    {"max_zones", c.fire_init.max_zones},
                    {"scatter_sigma_m", c.fire_init.scatter_sigma_m},
                    {"avoid_home_m", c.fire_init.avoid_home_m}};
  j["belief_init"] = {{"amplitude", c.belief_init.amplitude},
                      {"sigma_m", c.belief_init.sigma_m}};
  j["policy"] = {{"heli", c.policy.heli}, {"drone", c.policy.drone}};
  j["heli_params"] = {{"radius_m", c.heli_params.radius_m}, {"theta", c.heli_params.theta}};
  json dp = {{"theta_ie", c.drone_params.theta_ie},
             {"horizon", c.drone_params.horizon},
             {"num_scenarios", c.drone_params.num_scenarios},
             {"wind_model",
              {{"mu_u", c.drone_params.wind_model.mu_u},
               {"sigma_u", c.drone_params.wind_model.sigma_u},
               {"sigma_phi", c.drone_params.wind_model.sigma_phi},
               {"initial_phi", c.drone_params.wind_model.initial_phi}}}};
  if (!c.drone_params.theta_ie_stage.empty()) dp["theta_ie_stage"] = c.drone_params.theta_ie_stage;
  j["drone_params"] = dp;
  j["base_seed"] = c.base_seed;
  j["episodes"] = c.episodes;
  return j.dump(2) + "\n";
}

void set_tunable(ScenarioConfig& c, const std::string& name, double value) {
  static const std::map<std::string, std::function<void(ScenarioConfig&, double)>> table = {
      {"kernel.theta0", [](ScenarioConfig& s, double v) { s.kernel.theta0 = v; }},
      {"kernel.theta1", [](ScenarioConfig& s, double v) { s.kernel.theta1 = v; }},
      {"classifier.threshold_l", [](ScenarioConfig& s, double v) { s.classifier.threshold_l = v; }},
      {"spread.ros_scale", [](ScenarioConfig& s, double v) { s.spread.ros_scale = v; }},
      {"spread.p_spot", [](ScenarioConfig& s, double v) { s.spread.p_spot = v; }},
      {"gpc.theta0_cov", [](ScenarioConfig& s, double v) { s.gpc.theta0_cov = v; }},
      {"gpc.theta1_cov", [](ScenarioConfig& s, double v) { s.gpc.theta1_cov = v; }},
      {"gpc.theta2_cov", [](ScenarioConfig& s, double v) { s.gpc.theta2_cov = v; }},
      {"gpc.active_radius_m",
       [](ScenarioConfig& s, double v) { s.gpc.active_radius_m = v; }},
      {"heli.theta", [](ScenarioConfig& s, double v) { s.heli_params.theta = v; }},
      {"drone.theta_ie", [](ScenarioConfig& s, double v) { s.drone_params.theta_ie = v; }},
      {"drone.horizon",
       [](ScenarioConfig& s, double v) { s.drone_params.horizon = static_cast<int>(v); }},
      {"drone.num_scenarios",
       [](ScenarioConfig& s, double v) { s.drone_params.num_scenarios = static_cast<int>(v); }},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown tunable parameter '" + name + "'");
  it->second(c, value);
}

}  // namespace wildsim
