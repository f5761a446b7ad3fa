#include "wildsim/gpc.hpp"

#include <algorithm>
#include <cmath>

namespace wildsim {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp_prob(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }

double logit(double p) { return std::log(p / (1.0 - p)); }

Eigen::MatrixXd rbf_kernel(const RegionGrid& g, std::span<const int> za, std::span<const int> zb,
                           const GpcParams& p) {
  Eigen::MatrixXd k(za.size(), zb.size());
  for (std::size_t i = 0; i < za.size(); ++i) {
    for (std::size_t j = 0; j < zb.size(); ++j) {
      const double d = distance_m(g, za[i], zb[j]);
      double v = p.theta0_cov * std::exp(-p.theta1_cov * d * d);
      if (za[i] == zb[j]) v += p.theta2_cov;
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return k;
}

namespace {

double log_likelihood(const Eigen::VectorXd& f, const Eigen::VectorXd& y01) {
  // sum y*log(sigma(f)) + (1-y)*log(1-sigma(f)), written stably as
  // y*f - log(1+exp(f)).
  double ll = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double fi = f[i];
    const double log1pexp = fi > 30.0 ? fi : std::log1p(std::exp(fi));
    ll += y01[i] * fi - log1pexp;
  }
  return ll;
}

}  // namespace

LaplaceFit laplace_fit(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& mean,
                       const Eigen::VectorXd& y01, const GpcParams& p) {
  const Eigen::Index n = mean.size();
  LaplaceFit fit;
  Eigen::VectorXd f = mean;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);  // a == K^-1 (f - mean) throughout
  double objective = log_likelihood(f, y01);     // -0.5 a'(f-m) term is zero at start

  for (int iter = 1; iter <= p.max_newton; ++iter) {
    fit.iterations = iter;
    Eigen::VectorXd pi(n), sqrt_w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      pi[i] = sigmoid(f[i]);
      sqrt_w[i] = std::sqrt(std::max(pi[i] * (1.0 - pi[i]), 1e-12));
    }
    const Eigen::VectorXd grad = y01 - pi;
    Eigen::MatrixXd b_mat = Eigen::MatrixXd::Identity(n, n);
    b_mat += sqrt_w.asDiagonal() * kernel * sqrt_w.asDiagonal();
    const Eigen::LLT<Eigen::MatrixXd> llt(b_mat);

    const Eigen::VectorXd b = sqrt_w.array().square().matrix().asDiagonal() * (f - mean) + grad;
    const Eigen::VectorXd kb = kernel * b;
    const Eigen::VectorXd a_new =
        b - sqrt_w.asDiagonal() * llt.solve(sqrt_w.asDiagonal() * kb);

    // Damped step: halve toward the current iterate until the objective
    // stops decreasing (a stays consistent because K is linear).
    Eigen::VectorXd a_try = a_new;
    Eigen::VectorXd f_try = mean + kernel * a_try;
    double obj_try = -0.5 * a_try.dot(f_try - mean) + log_likelihood(f_try, y01);
    for (int halvings = 0; halvings < 12 && obj_try < objective; ++halvings) {
      a_try = 0.5 * (a_try + a);
      f_try = mean + kernel * a_try;
      obj_try = -0.5 * a_try.dot(f_try - mean) + log_likelihood(f_try, y01);
    }

    const double delta = (f_try - f).cwiseAbs().maxCoeff();
    f = f_try;
    a = a_try;
    objective = obj_try;
    if (delta < p.newton_tol) {
      fit.converged = true;
      break;
    }
  }

  // Final curvature at the mode (recomputed so prediction is consistent).
  Eigen::VectorXd pi(n);
  fit.sqrt_w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pi[i] = sigmoid(f[i]);
    fit.sqrt_w[i] = std::sqrt(std::max(pi[i] * (1.0 - pi[i]), 1e-12));
  }
  fit.f_hat = f;
  fit.grad = y01 - pi;
  Eigen::MatrixXd b_mat = Eigen::MatrixXd::Identity(n, n);
  b_mat += fit.sqrt_w.asDiagonal() * kernel * fit.sqrt_w.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(b_mat);
  fit.chol_b = llt.matrixL();
  return fit;
}

double gpc_predict(const LaplaceFit& fit, const Eigen::VectorXd& k_star, double k_star_star,
                   double prior_mean) {
  const double gbar = prior_mean + k_star.dot(fit.grad);
  const Eigen::VectorXd v =
      fit.chol_b.triangularView<Eigen::Lower>().solve(fit.sqrt_w.asDiagonal() * k_star);
  const double var = std::max(0.0, k_star_star - v.squaredNorm());
  const double kappa = 1.0 / std::sqrt(1.0 + kPi / 8.0 * var);
  return sigmoid(kappa * gbar);
}

}  // namespace wildsim
