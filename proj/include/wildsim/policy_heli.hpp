#pragma once

// Helicopter strike policies. Both score every zone from the belief, sum the
// score over each candidate strike footprint and pick the argmax (ties to the
// lowest zone index).

#include <Eigen/Dense>

#include "wildsim/belief.hpp"
#include "wildsim/fire_env.hpp"
#include "wildsim/region.hpp"

namespace wildsim {

struct HeliPolicyParams {
  double radius_m = 120.0;  // strike footprint radius
  double theta = 5.0;       // fresh-ignition weight in the forecast scorer
};

// Scores r_z * (forecast_z - pk_z): expected newly ignited value at risk.
HeliDecision dla1_decide(const BeliefState& b, double wind_phi, const SpreadKernelParams& kp,
                         const HeliPolicyParams& hp, const RegionGrid& g);

// Scores r_z * eta_z * pq_forecast_z + theta * f_start_z, where pq_forecast
// is the one-step no-observation fuel drift (burn factor = current pk,
// start = forecast - pk) and f_start = forecast - pk.
HeliDecision cfa_dla_decide(const BeliefState& b, double wind_phi, const SpreadKernelParams& kp,
                            const HeliPolicyParams& hp, const RegionGrid& g);

// Policy handle that can be carried into drone lookaheads.
struct HeliPolicyRef {
  enum class Kind { None, Dla1, CfaDla };
  Kind kind = Kind::None;
  HeliPolicyParams params{};
  SpreadKernelParams kernel{};
};
HeliDecision heli_decide(const HeliPolicyRef& ref, const BeliefState& b, double wind_phi,
                         const RegionGrid& g);

}  // namespace wildsim
