#include "wildsim/policy_drone.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace wildsim {

int battery_steps_remaining(const DroneState& s, const DronePolicyParams& p) {
  return static_cast<int>(std::floor(s.battery_min / p.battery_step_min + 0.5));
}

bool pfa_return_home(const DroneState& s, const DronePolicyParams& p, const RegionGrid& g) {
  const int steps = battery_steps_remaining(s, p);
  const double dist_home = distance_m(g, s.position, g.home.index);
  // max(0, .): with the battery already spent the rule still never fires at
  // home itself (there is nowhere left to return to).
  return dist_home > p.d_max_m * std::max(0, steps - 1);
}

Eigen::ArrayXd interval_estimation_map(const BeliefState& b, double theta_ie,
                                       const RegionGrid& g) {
  Eigen::ArrayXd m(g.zone_count());
  for (int z = 0; z < g.zone_count(); ++z) {
    const FuelParams& f = g.fuel[z];
    const double pq = std::clamp(b.pq[z], 0.0, 1.0);
    m[z] = f.r * f.eta * pq + theta_ie * f.r * std::sqrt(f.eta * pq * (1.0 - pq));
  }
  return m;
}

namespace {

// Reachable-set helpers: a move of length <= reach covers the clipped disk.
int nearest_reachable(int from, int goal, double reach_m, const RegionGrid& g) {
  int best = from;
  double best_d = distance_m(g, goal, from);
  for (int z : neighbors_within(g, from, reach_m)) {
    const double d = distance_m(g, goal, z);
    if (d < best_d) {
      best = z;
      best_d = d;
    }  // ties keep the lowest index (neighbors are ascending)
  }
  return best;
}

}  // namespace

int pfa_cfa_decide(const DroneState& s, const DronePolicyParams& p, const RegionGrid& g) {
  if (pfa_return_home(s, p, g)) return nearest_reachable(s.position, g.home.index, p.d_max_m, g);
  const Eigen::ArrayXd metric = interval_estimation_map(*s.belief, p.theta_ie, g);
  const Eigen::ArrayXd view = disk_sums(metric, p.obs_radius_m, g);
  int best = 0;
  for (int z = 1; z < g.zone_count(); ++z)
    if (view[z] > view[best]) best = z;
  if (distance_m(g, s.position, best) <= p.d_max_m) return best;
  return nearest_reachable(s.position, best, p.d_max_m, g);
}

std::vector<int> hops_to_home(int home, double reach_m, const RegionGrid& g) {
  std::vector<int> hops(g.zone_count(), INT_MAX / 2);
  std::deque<int> queue;
  hops[home] = 0;
  queue.push_back(home);
  const auto offsets = disk_offsets(g, reach_m);
  while (!queue.empty()) {
    const int z = queue.front();
    queue.pop_front();
    const ZoneId c = g.zone(z);
    for (const auto& [dr, dc] : offsets) {
      const int row = c.row + dr, col = c.col + dc;
      if (!g.contains(row, col)) continue;
      const int nz = row * g.width + col;
      if (hops[nz] > hops[z] + 1) {
        hops[nz] = hops[z] + 1;
        queue.push_back(nz);
      }
    }
  }
  return hops;
}

namespace {

// Field-of-view overlap sums around a fixed centre: a bounding-box copy of
// the stage field masked to the centre's disk, with row prefix sums, so
// overlap(a, b) costs one lookup per row instead of a cell-by-cell scan.
class OverlapScanner {
 public:
  OverlapScanner(const RegionGrid& g, double radius_m)
      : grid_(g), rc_(static_cast<int>(std::floor(radius_m / g.zone_size_m))), side_(2 * rc_ + 1) {
    const double r2 = (radius_m / g.zone_size_m) * (radius_m / g.zone_size_m);
    span_.resize(rc_ + 1);
    for (int dr = 0; dr <= rc_; ++dr) {
      const double rem = r2 - static_cast<double>(dr) * dr;
      span_[dr] = rem >= 0.0 ? static_cast<int>(std::floor(std::sqrt(rem))) : -1;
    }
    prefix_.assign(static_cast<std::size_t>(side_) * (side_ + 1), 0.0);
  }

  // Loads the field masked to the disk around `a`.
  void focus(const Eigen::ArrayXd& field, int a) {
    a_row_ = a / grid_.width;
    a_col_ = a % grid_.width;
    for (int i = 0; i < side_; ++i) {
      const int row = a_row_ - rc_ + i;
      double acc = 0.0;
      double* pref = &prefix_[static_cast<std::size_t>(i) * (side_ + 1)];
      pref[0] = 0.0;
      const int dr = std::abs(i - rc_);
      const int sp = dr <= rc_ ? span_[dr] : -1;
      for (int j = 0; j < side_; ++j) {
        const int col = a_col_ - rc_ + j;
        const int dc = j - rc_;
        const bool inside = sp >= 0 && std::abs(dc) <= sp && grid_.contains(row, col);
        if (inside) acc += field[row * grid_.width + col];
        pref[j + 1] = acc;
      }
    }
  }

  // Sum of the focused (masked) field over the disk around `b`.
  double overlap(int b) const {
    const int b_row = b / grid_.width, b_col = b % grid_.width;
    if (std::abs(b_row - a_row_) > 2 * rc_ || std::abs(b_col - a_col_) > 2 * rc_) return 0.0;
    double sum = 0.0;
    for (int dr = -rc_; dr <= rc_; ++dr) {
      const int row = b_row + dr;
      const int i = row - (a_row_ - rc_);
      if (i < 0 || i >= side_) continue;
      const int sp = span_[std::abs(dr)];
      if (sp < 0) continue;
      int lo = b_col - sp, hi = b_col + sp;  // inclusive cell range of b's disk row
      lo = std::max(lo, a_col_ - rc_);
      hi = std::min(hi, a_col_ + rc_);
      if (lo > hi) continue;
      const double* pref = &prefix_[static_cast<std::size_t>(i) * (side_ + 1)];
      sum += pref[hi - (a_col_ - rc_) + 1] - pref[lo - (a_col_ - rc_)];
    }
    return sum;
  }

 private:
  const RegionGrid& grid_;
  int rc_;
  int side_;
  int a_row_ = 0, a_col_ = 0;
  std::vector<int> span_;
  std::vector<double> prefix_;
};

constexpr double kNegInf = -1e300;

}  // namespace

ChainDpResult solve_chain_dp(const LookaheadProblem& p, const RegionGrid& g) {
  const int n = g.zone_count();
  const int h = p.horizon;
  if (h < 1 || static_cast<int>(p.node_reward.size()) != h)
    throw std::logic_error("lookahead problem malformed");
  const bool has_overlap = !p.overlap_field.empty();
  const auto reach = disk_offsets(g, p.reach_m);
  OverlapScanner scanner(g, p.obs_radius_m);

  // Stage value of occupying z at stage s, including the stranded penalty
  // when the battery hits empty away from home.
  auto stage_value = [&](int s, int z) {
    double v = p.node_reward[s][z];
    if (p.battery_steps - (s + 1) <= 0 && z != p.home) v -= p.c_fail;
    return v;
  };

  std::vector<Eigen::ArrayXd> best(h, Eigen::ArrayXd::Constant(n, kNegInf));
  std::vector<std::vector<int>> bp(h, std::vector<int>(n, -1));

  // Stage 0: moves from the fixed start; overlap couples with the start view.
  if (has_overlap && p.overlap_weight[0] != 0.0) scanner.focus(p.overlap_field[0], p.start);
  {
    const ZoneId c = g.zone(p.start);
    for (const auto& [dr, dc] : reach) {
      const int row = c.row + dr, col = c.col + dc;
      if (!g.contains(row, col)) continue;
      const int z = row * g.width + col;
      double v = stage_value(0, z);
      if (has_overlap && p.overlap_weight[0] != 0.0) v -= p.overlap_weight[0] * scanner.overlap(z);
      best[0][z] = v;
    }
  }

  for (int s = 1; s < h; ++s) {
    const bool pen = has_overlap && p.overlap_weight[s] != 0.0;
    Eigen::ArrayXd incoming = Eigen::ArrayXd::Constant(n, kNegInf);
    std::vector<int>& back = bp[s];
    for (int a = 0; a < n; ++a) {
      if (best[s - 1][a] <= kNegInf) continue;
      if (pen) scanner.focus(p.overlap_field[s], a);
      const double base = best[s - 1][a];
      const ZoneId c = g.zone(a);
      for (const auto& [dr, dc] : reach) {
        const int row = c.row + dr, col = c.col + dc;
        if (!g.contains(row, col)) continue;
        const int z = row * g.width + col;
        const double v = pen ? base - p.overlap_weight[s] * scanner.overlap(z) : base;
        if (v > incoming[z]) {  // strict: ascending a keeps the lowest index
          incoming[z] = v;
          back[z] = a;
        }
      }
    }
    for (int z = 0; z < n; ++z)
      best[s][z] = incoming[z] > kNegInf ? incoming[z] + stage_value(s, z) : kNegInf;
  }

  // Terminal shaping: home must stay reachable on what's left of the battery.
  const std::vector<int> hops = hops_to_home(p.home, p.reach_m, g);
  const int steps_after = p.battery_steps - h;
  int goal = -1;
  double goal_value = kNegInf;
  for (int z = 0; z < n; ++z) {
    if (best[h - 1][z] <= kNegInf) continue;
    double v = best[h - 1][z];
    if (hops[z] > steps_after) v -= p.c_fail;
    if (v > goal_value) {
      goal_value = v;
      goal = z;
    }
  }
  if (goal < 0) throw std::logic_error("lookahead has no feasible path");

  ChainDpResult res;
  res.value = goal_value;
  res.path.assign(h, -1);
  res.path[h - 1] = goal;
  for (int s = h - 1; s > 0; --s) res.path[s - 1] = bp[s][res.path[s]];
  return res;
}

std::vector<std::pair<int, int>> sample_adjacency_kernel(const EnvState& s, double wind_phi,
                                                         const SpreadKernelParams& kp,
                                                         const RegionGrid& g, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto offsets = disk_offsets(g, kp.cutoff_zones * g.zone_size_m);
  // Per-offset spread probability exp(-gamma(psi|phi) * d), with psi the
  // target-to-source bearing as in the ignition forecast.
  std::vector<double> prob(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const auto [dr, dc] = offsets[i];
    const double d = g.zone_size_m * std::hypot(static_cast<double>(dr), static_cast<double>(dc));
    const double psi = (dr == 0 && dc == 0)
                           ? 0.0
                           : wrap_angle(std::atan2(-static_cast<double>(dc), static_cast<double>(dr)));
    prob[i] = std::exp(-spread_gamma(kp, psi, wind_phi) * d);
  }
  for (int src = 0; src < s.zone_count(); ++src) {
    if (!s.k[src] || s.extinguished[src]) continue;
    const ZoneId c = g.zone(src);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      const auto [dr, dc] = offsets[i];
      const int row = c.row + dr, col = c.col + dc;
      if (!g.contains(row, col)) continue;
      const int dst = row * g.width + col;
      if (dst == src) {
        edges.emplace_back(src, dst);
        continue;
      }
      if (s.extinguished[dst]) continue;
      if (u01(rng) < prob[i]) edges.emplace_back(src, dst);
    }
  }
  return edges;
}

BeliefState belief_from_world(const SampledWorld& w, const std::vector<char>& extinguished,
                              const RegionGrid& g) {
  BeliefState b = BeliefState::pristine(g);
  b.extinguished = extinguished;
  for (int z = 0; z < g.zone_count(); ++z) {
    const double eta = g.fuel[z].eta;
    b.pk[z] = w.k[z] ? 1.0 : 0.0;
    b.pq[z] = w.q[z] / eta;
    b.ph[z] = w.h[z] / eta;
    b.pd[z] = w.d[z] / eta;
  }
  return b;
}

namespace {

int effective_horizon(const DroneState& s, const DronePolicyParams& p) {
  const int steps = battery_steps_remaining(s, p);
  return std::max(1, std::min({p.horizon, s.steps_left, steps}));
}

double stage_theta(const DronePolicyParams& p, int stage) {
  if (p.theta_ie_stage.empty()) return p.theta_ie;
  const std::size_t i = std::min(static_cast<std::size_t>(stage), p.theta_ie_stage.size() - 1);
  return p.theta_ie_stage[i];
}

LookaheadProblem problem_shell(const DroneState& s, const DronePolicyParams& p, int horizon) {
  LookaheadProblem out;
  out.horizon = horizon;
  out.start = s.position;
  out.battery_steps = battery_steps_remaining(s, p);
  out.c_fail = p.c_fail;
  out.reach_m = p.d_max_m;
  out.obs_radius_m = p.obs_radius_m;
  return out;
}

}  // namespace

LookaheadProblem build_lookahead_ts(const DroneState& s, const DronePolicyParams& p,
                                    const HeliPolicyRef& heli, const SamplerParams& sp,
                                    const SpreadKernelParams& kp, const RegionGrid& g, Rng& rng) {
  const int h = effective_horizon(s, p);
  LookaheadProblem out = problem_shell(s, p, h);
  out.home = g.home.index;

  const int n = g.zone_count();
  std::vector<Eigen::ArrayXd> marginal(h, Eigen::ArrayXd::Zero(n));
  const LatentFieldFactor factor = laplace_field_cov(*s.belief, sp, g);
  std::normal_distribution<double> wind_step(0.0, p.wind_model.sigma_phi);

  for (int w = 0; w < p.num_scenarios; ++w) {
    const std::vector<char> kf = sample_ignition_field(*s.belief, factor, rng);
    const SampledWorld world = sample_fuel_state(*s.belief, kf, g, rng);
    EnvState e;
    e.h = world.h;
    e.q = world.q;
    e.d = world.d;
    e.k = world.k;
    e.extinguished = s.belief->extinguished;
    double phi = s.wind.direction_phi;
    for (int st = 0; st < h; ++st) {
      if (heli.kind != HeliPolicyRef::Kind::None) {
        const BeliefState bw = belief_from_world({e.k, e.h, e.q, e.d}, e.extinguished, g);
        const HeliDecision hd = heli_decide(heli, bw, phi, g);
        apply_extinguish(e, hd, heli.params.radius_m, g);
      }
      const Eigen::ArrayXi q_post = e.q;
      const auto adj = sample_adjacency_kernel(e, phi, kp, g, rng);
      step_env(e, adj, {}, g);
      for (int z = 0; z < n; ++z) marginal[st][z] += g.fuel[z].r * (e.q[z] - q_post[z]);
      phi = wrap_angle(phi + wind_step(rng));
    }
  }

  out.node_reward.reserve(h);
  const double denom = std::max(1, p.num_scenarios);
  for (int st = 0; st < h; ++st)
    out.node_reward.push_back(disk_sums(marginal[st] / denom, p.obs_radius_m, g));
  return out;
}

LookaheadProblem build_lookahead_ie(const DroneState& s, const DronePolicyParams& p,
                                    const HeliPolicyRef& heli, const SpreadKernelParams& kp,
                                    const FuelBeliefParams& /*fp*/, const RegionGrid& g) {
  const int h = effective_horizon(s, p);
  LookaheadProblem out = problem_shell(s, p, h);
  out.home = g.home.index;

  const int n = g.zone_count();
  BeliefState b = *s.belief;
  const Eigen::ArrayXd pq_base = b.pq;
  const double phi = s.wind.direction_phi;  // held fixed: deterministic drift

  out.node_reward.reserve(h);
  out.overlap_field.reserve(h);
  out.overlap_weight.reserve(h);
  for (int st = 0; st < h; ++st) {
    if (heli.kind != HeliPolicyRef::Kind::None) {
      const HeliDecision hd = heli_decide(heli, b, phi, g);
      if (hd.target != HeliDecision::kNoTarget) {
        const std::vector<int> fp_zones = neighbors_within(g, hd.target, heli.params.radius_m);
        post_decision_belief(b, fp_zones);
      }
    }
    const Eigen::ArrayXd pkx = b.pk;
    const Eigen::ArrayXd fk = forecast_ignition(b, phi, kp, g);
    for (int z = 0; z < n; ++z) {
      if (b.extinguished[z]) continue;
      const double p_start = std::max(0.0, fk[z] - pkx[z]);
      drift_fuel(b.pq[z], b.ph[z], b.pd[z], pkx[z], p_start, g.fuel[z]);
    }
    b.pk = fk;

    const double theta = stage_theta(p, st);
    Eigen::ArrayXd mu(n), sig(n);
    for (int z = 0; z < n; ++z) {
      const FuelParams& f = g.fuel[z];
      mu[z] = f.r * f.eta * (b.pq[z] - pq_base[z]);
      sig[z] = f.r * std::sqrt(std::max(0.0, f.eta * b.pq[z] * (1.0 - b.pq[z])));
    }
    out.node_reward.push_back(disk_sums(mu + theta * sig, p.obs_radius_m, g));
    out.overlap_field.push_back(std::move(sig));
    out.overlap_weight.push_back(theta);
  }
  return out;
}

int ts_dla_decide(const DroneState& s, const DronePolicyParams& p, const HeliPolicyRef& heli,
                  const SamplerParams& sp, const SpreadKernelParams& kp, const RegionGrid& g,
                  Rng& rng) {
  const LookaheadProblem prob = build_lookahead_ts(s, p, heli, sp, kp, g, rng);
  return solve_chain_dp(prob, g).path[0];
}

int ie_dla_decide(const DroneState& s, const DronePolicyParams& p, const HeliPolicyRef& heli,
                  const SpreadKernelParams& kp, const FuelBeliefParams& fp, const RegionGrid& g) {
  const LookaheadProblem prob = build_lookahead_ie(s, p, heli, kp, fp, g);
  return solve_chain_dp(prob, g).path[0];
}

}  // namespace wildsim
