#pragma once

// Batch experiment harness: seeded episodes, aggregate metrics, grid tuning
// with common random numbers, JSON/CSV export.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wildsim/config.hpp"

namespace wildsim {

// Immutable per-scenario context shared by every episode.
struct Simulation {
  ScenarioConfig cfg;
  RegionGrid grid;
  std::vector<WindState> wind_series;  // empty: wind sampled from the model
};
Simulation make_simulation(const ScenarioConfig& cfg);

struct StepRecord {
  int t = 0;
  int heli_target = -1;
  int drone_target = 0;
  double wind_speed = 0.0;
  double wind_phi = 0.0;
  double step_cost = 0.0;
  double cum_cost = 0.0;
  bool drone_failed = false;
  int burning_zones = 0;          // ground truth after the transition
  double burned_area_m2 = 0.0;    // ground truth after the transition
  double belief_pk_sum_pre = 0.0;       // before the strike footprint
  double belief_pk_sum_post = 0.0;      // after the strike footprint
  double belief_pk_sum_updated = 0.0;   // after the full belief advance
  bool gpc_converged = true;
  std::string belief_json;  // per-zone belief snapshot when tracing
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  double cumulative_cost = 0.0;
  double burned_area_m2 = 0.0;
  bool class_c = false;
  bool drone_returned = false;
  bool drone_failed = false;
  int gpc_fallbacks = 0;
};

EpisodeRecord run_episode(const Simulation& sim, std::uint64_t seed, bool trace_beliefs = false);

struct BatchMetrics {
  int episodes = 0;
  std::vector<double> mean_cum_cost;  // per step, averaged over episodes
  std::vector<double> ci_half_width;  // 1.96 * standard error per step
  double mean_total_cost = 0.0;
  double total_ci_half_width = 0.0;
  double class_c_prob = 0.0;
  double failure_rate = 0.0;
  double return_rate = 0.0;
  double mean_burned_area_m2 = 0.0;
};

struct BatchResult {
  std::vector<EpisodeRecord> episodes;
  BatchMetrics metrics;
};

// Episode i uses seed base_seed + i regardless of parallelism, so any
// parallelism level reproduces the sequential result exactly.
BatchResult run_batch(const Simulation& sim, int episodes, std::uint64_t base_seed,
                      int parallelism);
BatchMetrics compute_metrics(const std::vector<EpisodeRecord>& eps, double class_c_area_m2);

struct TuneEntry {
  std::vector<double> values;  // one per TuneSpec name
  BatchMetrics metrics;
};
struct TuneResult {
  TuneSpec spec;
  std::vector<TuneEntry> ranked;  // ascending mean total cost
  std::size_t best = 0;           // index into ranked (always 0 when nonempty)
};

// Exhaustive grid search; every combination runs the same seed block
// (common random numbers).
TuneResult tune_grid(const Simulation& sim, const TuneSpec& spec, int episodes,
                     std::uint64_t base_seed, int parallelism);

// Export. JSON round-trips through parse; CSV files are header-only for an
// empty batch. Tune export adds a ranked table plus one level-set CSV per
// parameter pair (the 2-D slice through the best combination).
void export_batch_json(const BatchResult& r, const ScenarioConfig& cfg, const std::string& path);
void export_batch_csv(const BatchResult& r, const std::string& dir);
void export_tune_json(const TuneResult& r, const std::string& path);
void export_tune_csv(const TuneResult& r, const std::string& dir);

std::string episode_to_json_text(const EpisodeRecord& e);
std::string belief_to_json_text(const BeliefState& b);

}  // namespace wildsim
