#include "wildsim/sampler.hpp"

#include <cmath>

namespace wildsim {

LatentFieldFactor laplace_field_cov(const BeliefState& b, const SamplerParams& p,
                                    const RegionGrid& g) {
  LatentFieldFactor out;
  for (int z = 0; z < g.zone_count(); ++z) {
    if (b.extinguished[z]) continue;
    if (b.pk[z] > p.active_lo && b.pk[z] < p.active_hi) out.window.push_back(z);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(out.window.size());
  out.mean.resize(n);
  if (n == 0) {
    out.chol_l.resize(0, 0);
    return out;
  }

  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pk = clamp_prob(b.pk[out.window[static_cast<std::size_t>(i)]], p.gpc.clamp_eps);
    out.mean[i] = logit(pk);
    w[i] = pk * (1.0 - pk);  // logistic curvature at the mean
  }

  const Eigen::MatrixXd sigma = rbf_kernel(g, out.window, out.window, p.gpc);
  const Eigen::LLT<Eigen::MatrixXd> sigma_llt(sigma);
  Eigen::MatrixXd precision = sigma_llt.solve(Eigen::MatrixXd::Identity(n, n));
  precision += w.asDiagonal();
  const Eigen::MatrixXd cov = precision.llt().solve(Eigen::MatrixXd::Identity(n, n));

  Eigen::LLT<Eigen::MatrixXd> cov_llt(cov);
  if (cov_llt.info() != Eigen::Success) {
    // One jitter retry with ten times the nugget on the diagonal.
    Eigen::MatrixXd jittered = cov;
    jittered.diagonal().array() += 10.0 * p.gpc.theta2_cov;
    cov_llt.compute(jittered);
    out.jittered = true;
    if (cov_llt.info() != Eigen::Success)
      throw std::runtime_error("latent field covariance is not positive definite");
  }
  out.chol_l = cov_llt.matrixL();
  return out;
}

std::vector<char> sample_ignition_field(const BeliefState& b, const LatentFieldFactor& f,
                                        Rng& rng) {
  const int n = b.zone_count();
  std::vector<char> k(n, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Draw order is fixed: window normals first, then per-zone uniforms.
  if (!f.window.empty()) {
    Eigen::VectorXd xi(static_cast<Eigen::Index>(f.window.size()));
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = normal(rng);
    const Eigen::VectorXd latent = f.mean + f.chol_l * xi;
    for (std::size_t i = 0; i < f.window.size(); ++i)
      k[f.window[i]] = latent[static_cast<Eigen::Index>(i)] > 0.0 ? 1 : 0;
  }
  std::vector<char> in_window(n, 0);
  for (int z : f.window) in_window[z] = 1;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int z = 0; z < n; ++z) {
    if (in_window[z]) continue;
    if (b.extinguished[z]) continue;
    if (b.pk[z] > 0.0 && u01(rng) < b.pk[z]) k[z] = 1;
  }
  return k;
}

SampledWorld sample_fuel_state(const BeliefState& b, const std::vector<char>& k_field,
                               const RegionGrid& g, Rng& rng) {
  const int n = g.zone_count();
  SampledWorld w;
  w.k = k_field;
  w.h.resize(n);
  w.q.resize(n);
  w.d.resize(n);
  for (int z = 0; z < n; ++z) {
    const FuelParams& f = g.fuel[z];
    if (!w.k[z]) {
      w.h[z] = f.eta;
      w.q[z] = 0;
      w.d[z] = 0;
      continue;
    }
    // Multinomial via a binomial chain: q first, then h from the remainder.
    const double pq = std::clamp(b.pq[z], 0.0, 1.0);
    const double ph = std::clamp(b.ph[z], 0.0, 1.0);
    const double pd = std::clamp(b.pd[z], 0.0, 1.0);
    const double sum = pq + ph + pd;
    const double pq_n = sum > 0.0 ? pq / sum : 0.0;
    const double ph_n = sum > 0.0 ? ph / sum : 1.0;
    std::binomial_distribution<int> draw_q(f.eta, pq_n);
    const int q = draw_q(rng);
    int h = 0;
    if (q < f.eta && pq_n < 1.0) {
      std::binomial_distribution<int> draw_h(f.eta - q, std::clamp(ph_n / (1.0 - pq_n), 0.0, 1.0));
      h = draw_h(rng);
    }
    if (q == 0) {
      // A burning flag with no burning fuel is incoherent; demote the zone
      // to the non-burning rule (fully healthy).
      w.k[z] = 0;
      w.h[z] = f.eta;
      w.q[z] = 0;
      w.d[z] = 0;
      continue;
    }
    w.q[z] = q;
    w.h[z] = h;
    w.d[z] = f.eta - q - h;
  }
  return w;
}

}  // namespace wildsim
