#pragma once

// Draws coherent ground-truth hypotheses ("worlds") from a belief: a joint
// latent Gaussian field thresholded at zero for the ignition pattern, then
// per-zone multinomial fuel splits conditioned on burning.

#include <Eigen/Dense>
#include <vector>

#include "wildsim/belief.hpp"
#include "wildsim/gpc.hpp"
#include "wildsim/region.hpp"
#include "wildsim/rng.hpp"

namespace wildsim {

struct SamplerParams {
  GpcParams gpc;           // covariance hyperparameters reused for the field
  double active_lo = 1e-4; // zones with pk inside (lo, hi) sample jointly
  double active_hi = 1.0 - 1e-4;
};

// Factorized latent field over the uncertain window: mean is the clamped
// logit of pk, covariance (Sigma^-1 + W)^-1 with W the logistic curvature at
// the mean. chol_l satisfies L L^T = covariance. Zones outside the window
// fall back to independent Bernoulli(pk) draws.
struct LatentFieldFactor {
  std::vector<int> window;
  Eigen::VectorXd mean;
  Eigen::MatrixXd chol_l;
  bool jittered = false;  // factorization needed a jitter retry
};
LatentFieldFactor laplace_field_cov(const BeliefState& b, const SamplerParams& p,
                                    const RegionGrid& g);

// Joint ignition draw: threshold the latent field at zero inside the window,
// independent Bernoulli(pk) outside; extinguished zones never burn.
std::vector<char> sample_ignition_field(const BeliefState& b, const LatentFieldFactor& f,
                                        Rng& rng);

// A complete fuel hypothesis consistent with the environment invariants:
// k true iff q > 0, h+q+d == eta per zone.
struct SampledWorld {
  std::vector<char> k;
  Eigen::ArrayXi h, q, d;
};

// Burning zones draw (q,h,d) ~ multinomial(eta; pq,ph,pd); non-burning zones
// are taken fully healthy. A burning draw that comes back with q == 0 is
// demoted to non-burning (fully healthy) to keep the flag coherent.
SampledWorld sample_fuel_state(const BeliefState& b, const std::vector<char>& k_field,
                               const RegionGrid& g, Rng& rng);

}  // namespace wildsim
