#include "wildsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include <json.hpp>

namespace wildsim {

namespace {

using json = nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out.precision(17);
  return out;
}

}  // namespace

Simulation make_simulation(const ScenarioConfig& cfg) {
  Simulation sim;
  sim.cfg = cfg;
  try {
    sim.grid = load_region(cfg.region_file);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("region_file: ") + e.what());
  }
  if (cfg.home_zone >= sim.grid.zone_count())
    throw ConfigError("home_zone: index " + std::to_string(cfg.home_zone) +
                      " outside region of " + std::to_string(sim.grid.zone_count()) + " zones");
  sim.grid.home = sim.grid.zone(cfg.home_zone);

  if (!cfg.wind_file.empty()) {
    try {
      sim.wind_series = load_wind_series(cfg.wind_file);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("wind_file: ") + e.what());
    }
    if (static_cast<int>(sim.wind_series.size()) < cfg.horizon_steps)
      throw ConfigError("wind_file: series has " + std::to_string(sim.wind_series.size()) +
                        " entries, need at least " + std::to_string(cfg.horizon_steps));
  }

  bool any_eligible = false;
  for (int z = 0; z < sim.grid.zone_count() && !any_eligible; ++z)
    any_eligible = distance_m(sim.grid, sim.grid.home.index, z) >= cfg.fire_init.avoid_home_m;
  if (!any_eligible)
    throw ConfigError("fire_init.avoid_home_m: no zone lies that far from home");
  if (cfg.fire_init.max_zones > sim.grid.zone_count())
    throw ConfigError("fire_init.max_zones: exceeds the zone count");
  return sim;
}

namespace {

HeliPolicyRef make_heli_ref(const ScenarioConfig& cfg) {
  HeliPolicyRef ref;
  if (cfg.policy.heli == "dla1") ref.kind = HeliPolicyRef::Kind::Dla1;
  else if (cfg.policy.heli == "cfa-dla") ref.kind = HeliPolicyRef::Kind::CfaDla;
  else ref.kind = HeliPolicyRef::Kind::None;
  ref.params = cfg.heli_params;
  ref.kernel = cfg.kernel;
  return ref;
}

// Initial ground truth: a cluster of burning zones around a random centroid
// kept away from home. Each zone scores distance-to-centroid plus Gaussian
// scatter; the n best scores ignite with their fresh-ignition fuel split.
int init_fire(EnvState& env, const RegionGrid& g, const FireInitParams& p, Rng& rng) {
  std::vector<int> eligible;
  for (int z = 0; z < g.zone_count(); ++z)
    if (distance_m(g, g.home.index, z) >= p.avoid_home_m) eligible.push_back(z);
  const int centroid =
      eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
  const int n = std::uniform_int_distribution<int>(p.min_zones, p.max_zones)(rng);

  std::normal_distribution<double> scatter(0.0, p.scatter_sigma_m);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(g.zone_count());
  for (int z = 0; z < g.zone_count(); ++z) {
    const double score = distance_m(g, centroid, z) + scatter(rng);
    if (z == g.home.index) continue;
    scored.emplace_back(score, z);
  }
  std::partial_sort(scored.begin(), scored.begin() + std::min<std::size_t>(n, scored.size()),
                    scored.end());
  for (int i = 0; i < n && i < static_cast<int>(scored.size()); ++i) {
    const int z = scored[i].second;
    const FuelParams& f = g.fuel[z];
    env.q[z] = f.q_init;
    env.h[z] = f.eta - f.q_init;
    env.d[z] = 0;
    env.k[z] = 1;
  }
  return centroid;
}

// Prior belief: ignition probability decays radially from the reported
// centroid; the fuel split assumes a fresh ignition wherever fire is likely.
void init_belief(BeliefState& b, const RegionGrid& g, const BeliefInitParams& p, int centroid) {
  for (int z = 0; z < g.zone_count(); ++z) {
    const double d = distance_m(g, centroid, z);
    const double pk = p.amplitude * std::exp(-d * d / (2.0 * p.sigma_m * p.sigma_m));
    const FuelParams& f = g.fuel[z];
    b.pk[z] = pk;
    b.pq[z] = (static_cast<double>(f.q_init) / f.eta) * pk;
    b.ph[z] = 1.0 - b.pq[z];
    b.pd[z] = 0.0;
  }
}

}  // namespace

EpisodeRecord run_episode(const Simulation& sim, std::uint64_t seed, bool trace_beliefs) {
  const ScenarioConfig& cfg = sim.cfg;
  const RegionGrid& g = sim.grid;
  Rng env_rng = make_stream(seed, RngStreamId::Env);
  Rng wind_rng = make_stream(seed, RngStreamId::Wind);
  Rng sampler_rng = make_stream(seed, RngStreamId::Sampler);

  EnvState env = EnvState::pristine(g);
  const int centroid = init_fire(env, g, cfg.fire_init, env_rng);
  BeliefState belief = BeliefState::pristine(g);
  init_belief(belief, g, cfg.belief_init, centroid);

  const HeliPolicyRef heli = make_heli_ref(cfg);
  const DronePolicyParams& dp = cfg.drone_params;

  auto next_wind = [&](int t, const WindState& prev) -> WindState {
    if (!sim.wind_series.empty()) {
      const std::size_t i = std::min<std::size_t>(t, sim.wind_series.size() - 1);
      return sim.wind_series[i];
    }
    return sample_wind(cfg.wind_model, prev, wind_rng);
  };

  EpisodeRecord ep;
  ep.seed = seed;
  ep.steps.reserve(cfg.horizon_steps);

  int position = g.home.index;
  double battery_min = cfg.horizon_steps * cfg.battery_step_min;
  bool failed = false;
  double cum_cost = 0.0;
  WindState wind = next_wind(0, WindState{0.0, cfg.wind_model.initial_phi});

  for (int t = 0; t < cfg.horizon_steps; ++t) {
    StepRecord rec;
    rec.t = t;
    rec.wind_speed = wind.speed_mps;
    rec.wind_phi = wind.direction_phi;

    // Strike: decided from the current belief, executed on the ground truth,
    // and communicated to the drone before it moves.
    const HeliDecision hd = heli_decide(heli, belief, wind.direction_phi, g);
    rec.heli_target = hd.target;
    const std::vector<int> footprint = apply_extinguish(env, hd, cfg.rho_heli_m, g);
    rec.belief_pk_sum_pre = belief.pk.sum();
    post_decision_belief(belief, footprint);
    rec.belief_pk_sum_post = belief.pk.sum();

    // Movement decision from the post-strike belief.
    int target = position;
    if (!failed) {
      DroneState ds{position, battery_min, cfg.horizon_steps - t, wind, &belief};
      if (cfg.policy.drone == "pfa-cfa") {
        target = pfa_cfa_decide(ds, dp, g);
      } else if (cfg.policy.drone == "ts-dla") {
        target = ts_dla_decide(ds, dp, heli, cfg.sampler, cfg.kernel, g, sampler_rng);
      } else if (cfg.policy.drone == "ie-dla") {
        target = ie_dla_decide(ds, dp, heli, cfg.kernel, cfg.fuel_belief, g);
      }  // "null": stay put
    }
    rec.drone_target = target;

    // Ground truth advances under this step's wind.
    const auto adjacency = sample_adjacency(env, wind, g, cfg.spread, env_rng);
    const auto spots = sample_spotting(env, wind, g, cfg.spread, env_rng);
    step_env(env, adjacency, spots, g);

    // The drone flies, spending one step of battery.
    bool failed_this_step = false;
    if (!failed) {
      position = target;
      battery_min -= cfg.battery_step_min;
      if (battery_min < 0.5 * cfg.battery_step_min && position != g.home.index) {
        failed = true;
        failed_this_step = true;
      }
    }
    rec.drone_failed = failed;

    // Observe from the new position and fold everything into the belief.
    ObservationSet obs;
    if (!failed) obs = observe(env, position, cfg.rho_obs_m, cfg.sigma_obs, g, env_rng);
    const BeliefAdvanceResult adv =
        advance_belief(belief, obs, wind.direction_phi, cfg.kernel, cfg.classifier, cfg.gpc,
                       cfg.fuel_belief, g);
    rec.belief_pk_sum_updated = belief.pk.sum();
    rec.gpc_converged = adv.gpc_converged;
    if (!adv.gpc_converged) ++ep.gpc_fallbacks;

    rec.step_cost = step_cost(env, failed_this_step, cfg.c_fail, g);
    cum_cost += rec.step_cost;
    rec.cum_cost = cum_cost;
    rec.burning_zones = static_cast<int>(std::count(env.k.begin(), env.k.end(), char(1)));
    rec.burned_area_m2 = burned_area_m2(env, g);
    if (trace_beliefs) rec.belief_json = belief_to_json_text(belief);
    ep.steps.push_back(std::move(rec));

    wind = next_wind(t + 1, wind);
  }

  ep.cumulative_cost = cum_cost;
  ep.burned_area_m2 = ep.steps.empty() ? 0.0 : ep.steps.back().burned_area_m2;
  ep.class_c = ep.burned_area_m2 >= cfg.class_c_area_m2;
  ep.drone_failed = failed;
  ep.drone_returned = !failed && position == g.home.index;
  return ep;
}

BatchResult run_batch(const Simulation& sim, int episodes, std::uint64_t base_seed,
                      int parallelism) {
  BatchResult result;
  result.episodes.resize(std::max(0, episodes));
  if (episodes > 0) {
    int workers = parallelism > 0 ? parallelism
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, episodes));
    std::atomic<int> next{0};
    auto work = [&]() {
      for (int i = next.fetch_add(1); i < episodes; i = next.fetch_add(1))
        result.episodes[i] = run_episode(sim, base_seed + static_cast<std::uint64_t>(i));
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
  }
  result.metrics = compute_metrics(result.episodes, sim.cfg.class_c_area_m2);
  return result;
}

BatchMetrics compute_metrics(const std::vector<EpisodeRecord>& eps, double class_c_area_m2) {
  BatchMetrics m;
  m.episodes = static_cast<int>(eps.size());
  if (eps.empty()) return m;

  std::size_t horizon = 0;
  for (const auto& e : eps) horizon = std::max(horizon, e.steps.size());
  m.mean_cum_cost.assign(horizon, 0.0);
  m.ci_half_width.assign(horizon, 0.0);
  const double n = static_cast<double>(eps.size());

  for (std::size_t t = 0; t < horizon; ++t) {
    double sum = 0.0, sumsq = 0.0;
    for (const auto& e : eps) {
      // Episodes shorter than the longest carry their final cost forward.
      const double v = e.steps.empty()
                           ? 0.0
                           : e.steps[std::min(t, e.steps.size() - 1)].cum_cost;
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / n;
    m.mean_cum_cost[t] = mean;
    if (eps.size() > 1) {
      const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
      m.ci_half_width[t] = 1.96 * std::sqrt(var / n);
    }
  }

  double total = 0.0, totalsq = 0.0, burned = 0.0;
  int class_c = 0, fails = 0, returns = 0;
  for (const auto& e : eps) {
    total += e.cumulative_cost;
    totalsq += e.cumulative_cost * e.cumulative_cost;
    burned += e.burned_area_m2;
    class_c += e.burned_area_m2 >= class_c_area_m2 ? 1 : 0;
    fails += e.drone_failed ? 1 : 0;
    returns += e.drone_returned ? 1 : 0;
  }
  m.mean_total_cost = total / n;
  if (eps.size() > 1) {
    const double var =
        std::max(0.0, (totalsq - n * m.mean_total_cost * m.mean_total_cost) / (n - 1.0));
    m.total_ci_half_width = 1.96 * std::sqrt(var / n);
  }
  m.class_c_prob = class_c / n;
  m.failure_rate = fails / n;
  m.return_rate = returns / n;
  m.mean_burned_area_m2 = burned / n;
  return m;
}

TuneResult tune_grid(const Simulation& sim, const TuneSpec& spec, int episodes,
                     std::uint64_t base_seed, int parallelism) {
  if (spec.names.size() != spec.values.size())
    throw ConfigError("tune spec: names and value lists differ in length");
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    if (spec.values[i].empty())
      throw ConfigError("tune spec: empty value list for '" + spec.names[i] + "'");

  TuneResult result;
  result.spec = spec;
  const std::size_t k = spec.names.size();
  std::vector<std::size_t> idx(k, 0);

  while (true) {
    TuneEntry entry;
    entry.values.resize(k);
    Simulation run = sim;  // grid and wind series are shared by value
    for (std::size_t i = 0; i < k; ++i) {
      entry.values[i] = spec.values[i][idx[i]];
      set_tunable(run.cfg, spec.names[i], entry.values[i]);
    }
    entry.metrics = run_batch(run, episodes, base_seed, parallelism).metrics;
    result.ranked.push_back(std::move(entry));

    // Odometer increment over the cartesian product.
    std::size_t pos = 0;
    while (pos < k && ++idx[pos] == spec.values[pos].size()) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == k || k == 0) break;
  }

  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const TuneEntry& a, const TuneEntry& b) {
                     return a.metrics.mean_total_cost < b.metrics.mean_total_cost;
                   });
  result.best = 0;
  return result;
}

namespace {

json metrics_to_json(const BatchMetrics& m) {
  return json{{"episodes", m.episodes},
              {"mean_cum_cost", m.mean_cum_cost},
              {"ci_half_width", m.ci_half_width},
              {"mean_total_cost", m.mean_total_cost},
              {"total_ci_half_width", m.total_ci_half_width},
              {"class_c_prob", m.class_c_prob},
              {"failure_rate", m.failure_rate},
              {"return_rate", m.return_rate},
              {"mean_burned_area_m2", m.mean_burned_area_m2}};
}

json episode_to_json(const EpisodeRecord& e) {
  json steps = json::array();
  for (const auto& s : e.steps) {
    json js{{"t", s.t},
            {"heli_target", s.heli_target},
            {"drone_target", s.drone_target},
            {"wind_speed", s.wind_speed},
            {"wind_phi", s.wind_phi},
            {"step_cost", s.step_cost},
            {"cum_cost", s.cum_cost},
            {"drone_failed", s.drone_failed},
            {"burning_zones", s.burning_zones},
            {"burned_area_m2", s.burned_area_m2},
            {"belief_pk_sum_pre", s.belief_pk_sum_pre},
            {"belief_pk_sum_post", s.belief_pk_sum_post},
            {"belief_pk_sum_updated", s.belief_pk_sum_updated},
            {"gpc_converged", s.gpc_converged}};
    if (!s.belief_json.empty()) js["belief"] = json::parse(s.belief_json);
    steps.push_back(std::move(js));
  }
  return json{{"seed", e.seed},
              {"cumulative_cost", e.cumulative_cost},
              {"burned_area_m2", e.burned_area_m2},
              {"class_c", e.class_c},
              {"drone_returned", e.drone_returned},
              {"drone_failed", e.drone_failed},
              {"gpc_fallbacks", e.gpc_fallbacks},
              {"steps", std::move(steps)}};
}

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out)
    if (c == '.' || c == '/' || c == ' ') c = '_';
  return out;
}

}  // namespace

void export_batch_json(const BatchResult& r, const ScenarioConfig& cfg, const std::string& path) {
  json j;
  j["config"] = json::parse(config_to_json_text(cfg));
  j["metrics"] = metrics_to_json(r.metrics);
  json eps = json::array();
  for (const auto& e : r.episodes) eps.push_back(episode_to_json(e));
  j["episodes"] = std::move(eps);
  open_out(path) << j.dump(2) << "\n";
}

void export_batch_csv(const BatchResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out((std::filesystem::path(dir) / "episodes.csv").string());
    out << "seed,cumulative_cost,burned_area_m2,class_c,drone_returned,drone_failed,"
           "gpc_fallbacks\n";
    for (const auto& e : r.episodes)
      out << e.seed << ',' << e.cumulative_cost << ',' << e.burned_area_m2 << ',' << e.class_c
          << ',' << e.drone_returned << ',' << e.drone_failed << ',' << e.gpc_fallbacks << "\n";
  }
  {
    auto out = open_out((std::filesystem::path(dir) / "cost_profile.csv").string());
    out << "step,mean_cum_cost,ci_half_width\n";
    for (std::size_t t = 0; t < r.metrics.mean_cum_cost.size(); ++t)
      out << t << ',' << r.metrics.mean_cum_cost[t] << ',' << r.metrics.ci_half_width[t] << "\n";
  }
}

void export_tune_json(const TuneResult& r, const std::string& path) {
  json ranked = json::array();
  for (const auto& e : r.ranked)
    ranked.push_back(json{{"values", e.values}, {"metrics", metrics_to_json(e.metrics)}});
  json j{{"names", r.spec.names},
         {"grids", r.spec.values},
         {"ranked", std::move(ranked)},
         {"best", r.best}};
  open_out(path) << j.dump(2) << "\n";
}

void export_tune_csv(const TuneResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::size_t k = r.spec.names.size();
  {
    auto out = open_out((std::filesystem::path(dir) / "ranked.csv").string());
    for (const auto& name : r.spec.names) out << name << ',';
    out << "mean_total_cost,total_ci_half_width,class_c_prob,return_rate\n";
    for (const auto& e : r.ranked) {
      for (double v : e.values) out << v << ',';
      out << e.metrics.mean_total_cost << ',' << e.metrics.total_ci_half_width << ','
          << e.metrics.class_c_prob << ',' << e.metrics.return_rate << "\n";
    }
  }
  if (r.ranked.empty() || k < 2) return;

  // One 2-D level-set slice per parameter pair, anchored at the best
  // combination's values in every other coordinate.
  const std::vector<double>& best = r.ranked[r.best].values;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const std::string name = "levelset_" + sanitize(r.spec.names[i]) + "_" +
                               sanitize(r.spec.names[j]) + ".csv";
      auto out = open_out((std::filesystem::path(dir) / name).string());
      out << r.spec.names[i] << ',' << r.spec.names[j] << ",mean_total_cost\n";
      for (const auto& e : r.ranked) {
        bool on_slice = true;
        for (std::size_t m = 0; m < k && on_slice; ++m)
          if (m != i && m != j && e.values[m] != best[m]) on_slice = false;
        if (on_slice)
          out << e.values[i] << ',' << e.values[j] << ',' << e.metrics.mean_total_cost << "\n";
      }
    }
  }
}

std::string episode_to_json_text(const EpisodeRecord& e) { return episode_to_json(e).dump(2); }

std::string belief_to_json_text(const BeliefState& b) {
  json j;
  j["t"] = b.t;
  j["pk"] = std::vector<double>(b.pk.data(), b.pk.data() + b.pk.size());
  j["pq"] = std::vector<double>(b.pq.data(), b.pq.data() + b.pq.size());
  j["ph"] = std::vector<double>(b.ph.data(), b.ph.data() + b.ph.size());
  j["pd"] = std::vector<double>(b.pd.data(), b.pd.data() + b.pd.size());
  std::vector<int> ext(b.extinguished.begin(), b.extinguished.end());
  j["extinguished"] = ext;
  return j.dump();
}

}  // namespace wildsim
