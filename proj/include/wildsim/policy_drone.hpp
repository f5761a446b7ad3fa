#pragma once

// Drone movement policies: a myopic explore/return rule and two lookahead
// planners (scenario sampling and deterministic belief drift), both reduced
// to an exact stage-wise dynamic program over (step, zone).

#include <Eigen/Dense>
#include <vector>

#include "wildsim/belief.hpp"
#include "wildsim/policy_heli.hpp"
#include "wildsim/region.hpp"
#include "wildsim/rng.hpp"
#include "wildsim/sampler.hpp"

namespace wildsim {

// Decision-time snapshot handed to a drone policy. The belief already has
// this step's strike footprint applied (the helicopter decision is
// communicated before the drone moves).
struct DroneState {
  int position = 0;
  double battery_min = 0.0;  // flight minutes remaining
  int steps_left = 0;        // episode steps remaining including this one
  WindState wind{};
  const BeliefState* belief = nullptr;
};

struct DronePolicyParams {
  double d_max_m = 360.0;       // movement range per step
  double obs_radius_m = 180.0;  // field of view
  double battery_step_min = 10.0;
  double c_fail = 1e4;          // stranded-away-from-home penalty
  double theta_ie = 0.75;       // uncertainty bonus weight
  std::vector<double> theta_ie_stage;  // per-stage override; empty = constant
  int horizon = 4;              // lookahead depth in steps
  int num_scenarios = 20;       // sampled worlds per scenario lookahead
  WindModelParams wind_model{}; // assumed wind process inside lookaheads
};

int battery_steps_remaining(const DroneState& s, const DronePolicyParams& p);

// True when the drone must head home now: the remaining range after this
// step no longer covers the distance back (strictly greater comparison, so a
// drone exactly on the boundary keeps exploring one more step).
bool pfa_return_home(const DroneState& s, const DronePolicyParams& p, const RegionGrid& g);

// Per-zone exploration metric: r*eta*pq + theta * r * sqrt(eta*pq*(1-pq)).
Eigen::ArrayXd interval_estimation_map(const BeliefState& b, double theta_ie,
                                       const RegionGrid& g);

// Explore/return hybrid: when the return rule fires, step toward home;
// otherwise chase the best field-of-view sum of the metric, projected onto
// the reachable set (nearest reachable zone to the global argmax). Ties to
// the lowest zone index.
int pfa_cfa_decide(const DroneState& s, const DronePolicyParams& p, const RegionGrid& g);

// Stage-wise path problem over `horizon` consecutive moves starting from
// `start`. Objective of a path z_0..z_{H-1}:
//   sum_s node_reward[s][z_s]
//   - sum_s overlap_weight[s] * sum_{z in fov(prev_s) ∩ fov(z_s)} overlap_field[s][z]
//   - c_fail per stage where battery hits empty away from home
//   - c_fail at the end if home is no longer reachable on the remaining
//     battery (prev_0 = start; fov = disk of obs_radius_m).
struct LookaheadProblem {
  int horizon = 1;
  int start = 0;
  int home = 0;
  int battery_steps = 0;       // full steps of battery left at decision time
  double c_fail = 0.0;
  double reach_m = 360.0;      // per-move range
  double obs_radius_m = 180.0; // field-of-view radius for overlap terms
  std::vector<Eigen::ArrayXd> node_reward;    // [horizon][zones]
  std::vector<Eigen::ArrayXd> overlap_field;  // empty, or [horizon][zones]
  std::vector<double> overlap_weight;         // empty, or [horizon]
};

struct ChainDpResult {
  std::vector<int> path;  // horizon zones; path[0] is the decision
  double value = 0.0;
};

// Exact maximization by forward dynamic programming with backpointers; ties
// broken toward the lowest zone index at every backtrack step.
ChainDpResult solve_chain_dp(const LookaheadProblem& p, const RegionGrid& g);

// Hop counts to home over the reach graph (moves of length <= reach_m);
// INT_MAX/2 where home is unreachable.
std::vector<int> hops_to_home(int home, double reach_m, const RegionGrid& g);

// Scenario-sampling lookahead: draws worlds from the belief, rolls each
// forward under the assumed dynamics (directional-kernel spread, sampled
// wind drift, the communicated helicopter policy) and scores a zone by the
// scenario-average marginal burning cost seen in its field of view.
LookaheadProblem build_lookahead_ts(const DroneState& s, const DronePolicyParams& p,
                                    const HeliPolicyRef& heli, const SamplerParams& sp,
                                    const SpreadKernelParams& kp, const RegionGrid& g, Rng& rng);

// Deterministic lookahead: propagates the belief forward with the
// no-observation drift (helicopter policy applied inside), scoring a zone by
// expected marginal burning cost plus an uncertainty bonus; consecutive
// overlapping views forfeit the bonus on shared zones.
LookaheadProblem build_lookahead_ie(const DroneState& s, const DronePolicyParams& p,
                                    const HeliPolicyRef& heli, const SpreadKernelParams& kp,
                                    const FuelBeliefParams& fp, const RegionGrid& g);

int ts_dla_decide(const DroneState& s, const DronePolicyParams& p, const HeliPolicyRef& heli,
                  const SamplerParams& sp, const SpreadKernelParams& kp, const RegionGrid& g,
                  Rng& rng);
int ie_dla_decide(const DroneState& s, const DronePolicyParams& p, const HeliPolicyRef& heli,
                  const SpreadKernelParams& kp, const FuelBeliefParams& fp, const RegionGrid& g);

// Kernel-based spread sampling for assumed-dynamics rollouts: each burning
// source reaches a target within the cutoff with probability
// exp(-gamma(psi|phi) * d); self edges always present.
std::vector<std::pair<int, int>> sample_adjacency_kernel(const EnvState& s, double wind_phi,
                                                         const SpreadKernelParams& kp,
                                                         const RegionGrid& g, Rng& rng);

// Degenerate belief matching a sampled world exactly (pk = k, fuel split =
// observed fractions); used to run the communicated helicopter policy inside
// scenario rollouts.
BeliefState belief_from_world(const SampledWorld& w, const std::vector<char>& extinguished,
                              const RegionGrid& g);

}  // namespace wildsim
