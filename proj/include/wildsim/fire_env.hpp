#pragma once

// Ground-truth fire process: integer fuel ledger per zone, stochastic spread,
// extinguishing, spotting, noisy observations and the step cost.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "wildsim/region.hpp"
#include "wildsim/rng.hpp"

namespace wildsim {

// Per-zone fuel ledger. h healthy, q burning, d dead; h+q+d == eta exactly in
// every zone at every step. k (burning flag) is true iff q > 0. Extinguished
// zones are permanently removed from the spread process.
struct EnvState {
  Eigen::ArrayXi h, q, d;
  std::vector<char> k;
  std::vector<char> extinguished;
  int t = 0;

  int zone_count() const { return static_cast<int>(k.size()); }
  static EnvState pristine(const RegionGrid& g);
};

struct SpreadParams {
  double ros_scale = 1.0;          // overall rate-of-spread calibration
  double wind_coeff = 0.4;         // wind multiplier strength
  double wind_exp = 1.4;           // wind multiplier exponent
  double slope_coeff = 5.0;        // upslope multiplier strength
  double lb_coeff = 0.3;           // length-to-breadth growth per m/s of wind
  double lb_max = 8.0;             // cap on length-to-breadth ratio
  double edge_noise_sigma = 0.3;   // log-normal sigma on per-edge spread lengths
  double step_minutes = 10.0;      // spread window per step
  double cutoff_zones = 10.0;      // neighbourhood radius in zone widths
  double p_spot = 0.0;             // per burning zone per step spotting probability
  double lambda_spot = 1.0 / 150.0;  // inverse mean spotting distance [1/m]
};

// One-hot extinguishing decision; kNoTarget means no strike this step.
struct HeliDecision {
  static constexpr int kNoTarget = -1;
  int target = kNoTarget;
};

// Head rate of spread [m/min] from one zone toward a neighbour, for spread
// direction psi (bearing source->target). Heterogeneous neighbours burn at
// the mid-point of their fuel characteristics; slope is the rise over run
// toward the target.
double rothermel_ros(const FuelParams& from, const FuelParams& to, const WindState& wind,
                     double psi, double slope, const SpreadParams& p);

// Random spread edges for this step as (source, target) pairs: source burns
// and a log-normally perturbed spread length reached the target's centre.
// Extinguished zones have no in or out edges. Self edges (d = 0) are always
// present for burning zones.
std::vector<std::pair<int, int>> sample_adjacency(const EnvState& s, const WindState& wind,
                                                  const RegionGrid& g, const SpreadParams& p,
                                                  Rng& rng);

// Spot ignitions: each burning zone throws an ember with probability p_spot,
// at an exponential distance downwind; returns landing zones (inside the
// grid, not extinguished).
std::vector<int> sample_spotting(const EnvState& s, const WindState& wind, const RegionGrid& g,
                                 const SpreadParams& p, Rng& rng);

// Applies the strike in place: every zone within radius_m of the target is
// permanently extinguished (q moved to d, flag set). Returns the footprint;
// empty for kNoTarget. Idempotent.
std::vector<int> apply_extinguish(EnvState& s, const HeliDecision& x, double radius_m,
                                  const RegionGrid& g);

// Advances the fuel ledger one step given sampled spread edges and spot
// ignitions: burning fuel dies off (xi), ignites healthy fuel (lambda),
// newly reached zones ignite q_init units. Real-valued flows are apportioned
// back to integers by largest remainder, so h+q+d == eta is exact. The
// burning flag is re-derived as q > 0. Throws std::logic_error if
// conservation would break.
void step_env(EnvState& s, const std::vector<std::pair<int, int>>& adjacency,
              const std::vector<int>& spot_ignitions, const RegionGrid& g);

// Noisy fuel readings y = c*q + N(0, sigma^2) for every zone within radius_m
// of the drone, ascending zone order.
struct ObservationSet {
  std::vector<int> zones;
  Eigen::VectorXd y;
};
ObservationSet observe(const EnvState& s, int drone_zone, double radius_m, double sigma_obs,
                       const RegionGrid& g, Rng& rng);

// Step cost: sum_z r_z * q_z, plus c_fail if the drone ran out of battery
// away from home this step.
double step_cost(const EnvState& s, bool drone_failed, double c_fail, const RegionGrid& g);

// Area of zones touched by fire (q + d > 0), square metres.
double burned_area_m2(const EnvState& s, const RegionGrid& g);

}  // namespace wildsim
