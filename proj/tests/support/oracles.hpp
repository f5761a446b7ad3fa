#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Everything here favours the most literal, brute-force formulation
// over speed so it can serve as an oracle for the production code.

#include <Eigen/Dense>
#include <vector>

#include "wildsim/belief.hpp"
#include "wildsim/policy_drone.hpp"
#include "wildsim/region.hpp"
#include "wildsim/rng.hpp"

namespace wildsim::oracles {

// Full-scan neighbourhood (no stencil): zones within radius_m of z, ascending.
std::vector<int> naive_neighbors(const RegionGrid& g, int z, double radius_m);

// Monte Carlo one-step ignition forecast: per trial, sample which zones burn
// (independent Bernoulli pk) and an exponential spread length per
// source-target pair; a target ignites when any burning source's length
// covers the distance. Returns empirical frequencies.
Eigen::ArrayXd mc_forecast(const BeliefState& b, double wind_phi, const SpreadKernelParams& kp,
                           const RegionGrid& g, int trials, Rng& rng);

// Textbook dense Laplace GP classification over the full grid: plain Newton
// with explicit matrix inverses, predictive for every unobserved zone,
// observed zones pinned to their labels. Reference for the windowed
// implementation when the window covers the grid.
Eigen::ArrayXd dense_gpc_reference(const Eigen::ArrayXd& prior, const std::vector<int>& obs_zones,
                                   const std::vector<char>& labels, const GpcParams& p,
                                   const RegionGrid& g);

// Independent evaluation of a lookahead path objective, recomputing fields
// of view and home reachability from scratch.
double evaluate_chain_path(const LookaheadProblem& p, const std::vector<int>& path,
                           const RegionGrid& g);

// Exhaustive enumeration of every feasible path; ties resolved toward the
// path whose reversed sequence is lexicographically smallest, matching the
// DP's backtrack rule.
ChainDpResult enumerate_chain_paths(const LookaheadProblem& p, const RegionGrid& g);

// Brute-force footprint argmax: per-target naive summation of a score field
// over the clipped disk, ties to the lowest index.
int brute_footprint_argmax(const Eigen::ArrayXd& score, double radius_m, const RegionGrid& g);

// Sample means and standard errors of the ground-truth fuel flows applied to
// multinomial/Bernoulli draws from a single-zone belief: with probability
// p_burn the zone burns and the real-valued flow equations apply, with
// probability p_start a fresh ignition replaces q_init units, otherwise any
// believed burning fuel is dead. Fractions of eta.
struct FuelDriftMc {
  double mean_q = 0, mean_h = 0, mean_d = 0;
  double se_q = 0, se_h = 0, se_d = 0;
};
FuelDriftMc mc_fuel_drift(double pq, double ph, double pd, double p_burn, double p_start,
                          const FuelParams& f, int trials, Rng& rng);

// Uniform-fuel test grid (zone_size 30 m, home at zone 0).
RegionGrid make_test_grid(int width, int height);

}  // namespace wildsim::oracles
