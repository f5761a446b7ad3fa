#pragma once

// Laplace-approximate Gaussian-process binary classification on zone sets:
// squared-exponential covariance over zone centres, logistic likelihood,
// damped Newton mode finding, probit-corrected predictive probabilities.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "wildsim/region.hpp"

namespace wildsim {

struct GpcParams {
  double theta0_cov = 4.0;       // kernel signal variance
  double theta1_cov = 1.4e-4;    // inverse squared length scale [1/m^2]
  double theta2_cov = 0.05;      // nugget added when z == z'
  double active_radius_m = 150;  // solve only near current observations
  double clamp_eps = 1e-6;       // probability clamp before taking logits
  int max_newton = 50;
  double newton_tol = 1e-8;
};

// Covariance matrix between two zone sets:
// k(z,z') = theta0 * exp(-theta1 * d(z,z')^2) + theta2 * 1[z == z'].
Eigen::MatrixXd rbf_kernel(const RegionGrid& g, std::span<const int> za,
                           std::span<const int> zb, const GpcParams& p);

// Posterior mode of the latent field at the labelled zones, found by damped
// Newton iteration on the Laplace objective with prior mean `mean`.
struct LaplaceFit {
  Eigen::VectorXd f_hat;      // latent mode at the labelled zones
  Eigen::VectorXd grad;       // y - sigmoid(f_hat) at the mode
  Eigen::VectorXd sqrt_w;     // sqrt of the likelihood curvature at the mode
  Eigen::MatrixXd chol_b;     // lower Cholesky of B = I + sqrtW K sqrtW
  bool converged = false;
  int iterations = 0;
};
LaplaceFit laplace_fit(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& mean,
                       const Eigen::VectorXd& y01, const GpcParams& p);

// Predictive class probability at one query zone given a fit:
// sigmoid(kappa * gbar) with kappa = (1 + pi/8 * var)^(-1/2).
double gpc_predict(const LaplaceFit& fit, const Eigen::VectorXd& k_star, double k_star_star,
                   double prior_mean);

double logit(double p);
double sigmoid(double x);
double clamp_prob(double p, double eps);

}  // namespace wildsim
