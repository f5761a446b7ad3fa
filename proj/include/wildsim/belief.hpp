#pragma once

// The drone's belief over the fire and its update pipeline. Per zone the
// belief carries an ignition probability pk and a multinomial fuel split
// (pq burning, ph healthy, pd dead) over eta units. One step advances as:
// strike footprint applied -> ignition forecast -> observation classifier ->
// GP-classification fusion -> start/burn decomposition -> fuel update.

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "wildsim/fire_env.hpp"
#include "wildsim/gpc.hpp"
#include "wildsim/region.hpp"

namespace wildsim {

struct BeliefState {
  Eigen::ArrayXd pk, pq, ph, pd;
  std::vector<char> extinguished;
  int t = 0;

  int zone_count() const { return static_cast<int>(pk.size()); }
  static BeliefState pristine(const RegionGrid& g);
};

// Directional spread kernel: the chance that fire covers distance d toward
// bearing psi in one step is exp(-gamma * d) with
// gamma(psi | phi) = theta0 * cos(psi - phi) + theta1, both in [1/m].
// theta1 >= theta0 >= 0 keeps gamma nonnegative.
struct SpreadKernelParams {
  double theta0 = 0.1 / 30.0;
  double theta1 = 2.5 / 30.0;
  double cutoff_zones = 10.0;  // ignore sources beyond this many zone widths
};
double spread_gamma(const SpreadKernelParams& p, double psi, double phi);

// Mills-ratio threshold classifier on raw readings: a zone is labelled
// burning iff Phi(u)/phi(u) > threshold_l with u = y / sigma_obs.
struct ClassifierParams {
  double sigma_obs = 2.0;
  double threshold_l = 15.0;
};

struct FuelBeliefParams {
  // Flow weights for the no-observation fuel drift use the observation-updated
  // burn posterior when true; the pre-observation ignition probability when
  // false.
  bool burn_factor_posterior = true;
};

// Zeroes pk and moves pq to pd inside the strike footprint and marks those
// zones extinguished. No-op for an empty footprint.
void post_decision_belief(BeliefState& b, std::span<const int> footprint);

// One-step ignition forecast under the directional kernel:
// f_z = 1 - prod_src (1 - pk_src * exp(-gamma * d)), sources within the
// cutoff including z itself (d = 0), so f_z >= pk_z. Extinguished zones
// forecast 0.
Eigen::ArrayXd forecast_ignition(const BeliefState& b, double wind_phi,
                                 const SpreadKernelParams& p, const RegionGrid& g);

// Binary labels for a batch of readings.
std::vector<char> classify_observations(const ObservationSet& obs, const ClassifierParams& p);

// Fuses binary labels into the forecast field with Laplace GP classification.
// Labelled zones get exactly 0/1; unlabelled zones within active_radius_m of
// any observation get the GP predictive probability; everything else keeps
// the forecast. With no observations returns the forecast unchanged. If the
// Newton iteration fails to converge the forecast is kept (converged=false),
// never an exception.
struct GpcUpdateResult {
  Eigen::ArrayXd pk;
  bool converged = true;
  int iterations = 0;
};
GpcUpdateResult gpc_update(const Eigen::ArrayXd& forecast_pk, std::span<const int> obs_zones,
                           const std::vector<char>& labels, const GpcParams& p,
                           const RegionGrid& g);

// Decomposes the updated ignition probability into "was already burning"
// and "newly started": p_burn = pk_next * pk_post / forecast (0 where the
// forecast is 0), p_start = pk_next - p_burn.
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> start_burn_split(const Eigen::ArrayXd& pk_next,
                                                           const Eigen::ArrayXd& pk_post,
                                                           const Eigen::ArrayXd& forecast);

// No-observation fuel drift for one zone; clamps to [0,1] and renormalizes
// the simplex. p_burn_factor multiplies the burn/extinguish flows, p_start
// scales fresh-ignition fuel.
void drift_fuel(double& pq, double& ph, double& pd, double p_burn_factor, double p_start,
                const FuelParams& f);

// Fuel-split update for every zone: observed zones trust the reading
// (pq = clamp(y / (c*eta)), ph = 1-pq, pd = 0), unobserved zones drift with
// the given burn factor. Extinguished zones stay frozen at (0, ph, pd).
void update_fuel_belief(BeliefState& b, const Eigen::ArrayXd& p_start,
                        const Eigen::ArrayXd& burn_factor, std::span<const int> obs_zones,
                        const Eigen::VectorXd& obs_y, const RegionGrid& g);

// Full pipeline after the strike footprint has been applied. Returns the
// forecast used and GPC diagnostics.
struct BeliefAdvanceResult {
  Eigen::ArrayXd forecast;
  bool gpc_converged = true;
};
BeliefAdvanceResult advance_belief(BeliefState& b, const ObservationSet& obs, double wind_phi,
                                   const SpreadKernelParams& kp, const ClassifierParams& cp,
                                   const GpcParams& gp, const FuelBeliefParams& fp,
                                   const RegionGrid& g);

}  // namespace wildsim
