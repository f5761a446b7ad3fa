#include "wildsim/belief.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wildsim {

BeliefState BeliefState::pristine(const RegionGrid& g) {
  const int n = g.zone_count();
  BeliefState b;
  b.pk = Eigen::ArrayXd::Zero(n);
  b.pq = Eigen::ArrayXd::Zero(n);
  b.ph = Eigen::ArrayXd::Ones(n);
  b.pd = Eigen::ArrayXd::Zero(n);
  b.extinguished.assign(n, 0);
  return b;
}

double spread_gamma(const SpreadKernelParams& p, double psi, double phi) {
  return p.theta0 * std::cos(psi - phi) + p.theta1;
}

void post_decision_belief(BeliefState& b, std::span<const int> footprint) {
  for (int z : footprint) {
    b.extinguished[z] = 1;
    b.pk[z] = 0.0;
    b.pd[z] += b.pq[z];
    b.pq[z] = 0.0;
  }
}

Eigen::ArrayXd forecast_ignition(const BeliefState& b, double wind_phi,
                                 const SpreadKernelParams& p, const RegionGrid& g) {
  const int n = g.zone_count();
  // Survival products: prod_z = prod over sources of (1 - pk_src * e^{-gamma d}).
  Eigen::ArrayXd survive = Eigen::ArrayXd::Ones(n);
  const auto offsets = disk_offsets(g, p.cutoff_zones * g.zone_size_m);
  // Per-offset decay is the same for every source; precompute it. psi is the
  // bearing of the source as seen from the target, so the kernel damps least
  // (spread is likeliest) when the source sits upwind of the target.
  std::vector<double> decay(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const auto [dr, dc] = offsets[i];
    const double d = g.zone_size_m * std::hypot(static_cast<double>(dr), static_cast<double>(dc));
    const double psi = (dr == 0 && dc == 0)
                           ? 0.0
                           : wrap_angle(std::atan2(-static_cast<double>(dc), static_cast<double>(dr)));
    decay[i] = std::exp(-spread_gamma(p, psi, wind_phi) * d);
  }
  for (int src = 0; src < n; ++src) {
    const double pk = b.pk[src];
    if (pk <= 0.0 || b.extinguished[src]) continue;
    const ZoneId c = g.zone(src);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      const auto [dr, dc] = offsets[i];
      const int row = c.row + dr, col = c.col + dc;
      if (!g.contains(row, col)) continue;
      survive[row * g.width + col] *= 1.0 - pk * decay[i];
    }
  }
  Eigen::ArrayXd f = 1.0 - survive;
  for (int z = 0; z < n; ++z)
    if (b.extinguished[z]) f[z] = 0.0;
  return f;
}

std::vector<char> classify_observations(const ObservationSet& obs, const ClassifierParams& p) {
  std::vector<char> labels(obs.zones.size(), 0);
  for (std::size_t i = 0; i < obs.zones.size(); ++i) {
    // Mills ratio Phi(u)/phi(u), clamped where both tails underflow.
    const double u = std::clamp(obs.y[static_cast<Eigen::Index>(i)] / p.sigma_obs, -37.0, 37.0);
    const double cdf = 0.5 * std::erfc(-u / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi);
    labels[i] = (cdf / pdf > p.threshold_l) ? 1 : 0;
  }
  return labels;
}

GpcUpdateResult gpc_update(const Eigen::ArrayXd& forecast_pk, std::span<const int> obs_zones,
                           const std::vector<char>& labels, const GpcParams& p,
                           const RegionGrid& g) {
  GpcUpdateResult res;
  res.pk = forecast_pk;
  if (obs_zones.empty()) return res;

  // Active window: anything within active_radius_m of an observation.
  std::set<int> window_set;
  for (int z : obs_zones)
    for (int w : neighbors_within(g, z, p.active_radius_m)) window_set.insert(w);
  std::vector<char> observed(g.zone_count(), 0);
  for (std::size_t i = 0; i < obs_zones.size(); ++i) observed[obs_zones[i]] = 1;

  const std::vector<int> train(obs_zones.begin(), obs_zones.end());
  Eigen::VectorXd y01(static_cast<Eigen::Index>(train.size()));
  Eigen::VectorXd mean(static_cast<Eigen::Index>(train.size()));
  for (std::size_t i = 0; i < train.size(); ++i) {
    y01[static_cast<Eigen::Index>(i)] = labels[i] ? 1.0 : 0.0;
    mean[static_cast<Eigen::Index>(i)] = logit(clamp_prob(forecast_pk[train[i]], p.clamp_eps));
  }
  const Eigen::MatrixXd kernel = rbf_kernel(g, train, train, p);
  const LaplaceFit fit = laplace_fit(kernel, mean, y01, p);
  res.converged = fit.converged;
  res.iterations = fit.iterations;

  if (fit.converged) {
    const double k_ss = p.theta0_cov + p.theta2_cov;
    Eigen::VectorXd k_star(static_cast<Eigen::Index>(train.size()));
    for (int z : window_set) {
      if (observed[z]) continue;
      for (std::size_t i = 0; i < train.size(); ++i) {
        const double d = distance_m(g, z, train[i]);
        k_star[static_cast<Eigen::Index>(i)] = p.theta0_cov * std::exp(-p.theta1_cov * d * d);
      }
      const double prior = logit(clamp_prob(forecast_pk[z], p.clamp_eps));
      res.pk[z] = gpc_predict(fit, k_star, k_ss, prior);
    }
  }
  // Labelled zones are trusted outright, converged or not.
  for (std::size_t i = 0; i < train.size(); ++i) res.pk[train[i]] = labels[i] ? 1.0 : 0.0;
  return res;
}

std::pair<Eigen::ArrayXd, Eigen::ArrayXd> start_burn_split(const Eigen::ArrayXd& pk_next,
                                                           const Eigen::ArrayXd& pk_post,
                                                           const Eigen::ArrayXd& forecast) {
  const Eigen::Index n = pk_next.size();
  Eigen::ArrayXd p_burn(n), p_start(n);
  for (Eigen::Index z = 0; z < n; ++z) {
    const double pb =
        forecast[z] > 0.0 ? std::clamp(pk_next[z] * pk_post[z] / forecast[z], 0.0, 1.0) : 0.0;
    p_burn[z] = pb;
    p_start[z] = std::clamp(pk_next[z] - pb, 0.0, 1.0);
  }
  return {std::move(p_start), std::move(p_burn)};
}

void drift_fuel(double& pq, double& ph, double& pd, double p_burn_factor, double p_start,
                const FuelParams& f) {
  const double start_frac = static_cast<double>(f.q_init) / f.eta;
  const double spread = f.lambda * (f.eta - 1) * ph * pq * p_burn_factor;
  double q2 = (1.0 - f.xi) * pq * p_burn_factor + spread + start_frac * p_start;
  double h2 = ph - spread - start_frac * p_start;
  double d2 = pd + pq * (1.0 - p_burn_factor) + f.xi * pq * p_burn_factor;
  q2 = std::clamp(q2, 0.0, 1.0);
  h2 = std::clamp(h2, 0.0, 1.0);
  d2 = std::clamp(d2, 0.0, 1.0);
  const double sum = q2 + h2 + d2;
  if (sum > 0.0) {
    pq = q2 / sum;
    ph = h2 / sum;
    pd = d2 / sum;
  } else {
    pq = 0.0;
    ph = 1.0;
    pd = 0.0;
  }
}

void update_fuel_belief(BeliefState& b, const Eigen::ArrayXd& p_start,
                        const Eigen::ArrayXd& burn_factor, std::span<const int> obs_zones,
                        const Eigen::VectorXd& obs_y, const RegionGrid& g) {
  std::vector<char> observed(g.zone_count(), 0);
  for (std::size_t i = 0; i < obs_zones.size(); ++i) {
    const int z = obs_zones[i];
    observed[z] = 1;
    if (b.extinguished[z]) continue;
    const FuelParams& f = g.fuel[z];
    const double pq = std::clamp(obs_y[static_cast<Eigen::Index>(i)] / (f.c * f.eta), 0.0, 1.0);
    b.pq[z] = pq;
    b.ph[z] = 1.0 - pq;
    b.pd[z] = 0.0;
  }
  for (int z = 0; z < g.zone_count(); ++z) {
    if (observed[z] || b.extinguished[z]) continue;
    drift_fuel(b.pq[z], b.ph[z], b.pd[z], burn_factor[z], p_start[z], g.fuel[z]);
  }
}

BeliefAdvanceResult advance_belief(BeliefState& b, const ObservationSet& obs, double wind_phi,
                                   const SpreadKernelParams& kp, const ClassifierParams& cp,
                                   const GpcParams& gp, const FuelBeliefParams& fp,
                                   const RegionGrid& g) {
  BeliefAdvanceResult out;
  const Eigen::ArrayXd pk_post = b.pk;  // strike footprint already applied
  out.forecast = forecast_ignition(b, wind_phi, kp, g);

  const std::vector<char> labels = classify_observations(obs, cp);
  GpcUpdateResult upd = gpc_update(out.forecast, obs.zones, labels, gp, g);
  out.gpc_converged = upd.converged;
  for (int z = 0; z < g.zone_count(); ++z)
    if (b.extinguished[z]) upd.pk[z] = 0.0;

  auto [p_start, p_burn] = start_burn_split(upd.pk, pk_post, out.forecast);
  // The fuel drift can weight its flows by either the observation-updated
  // burn posterior or the pre-observation ignition probability.
  const Eigen::ArrayXd& burn_factor = fp.burn_factor_posterior ? p_burn : pk_post;
  update_fuel_belief(b, p_start, burn_factor, obs.zones, obs.y, g);
  b.pk = upd.pk;
  b.t += 1;
  return out;
}

}  // namespace wildsim
