#include "wildsim/fire_env.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace wildsim {

EnvState EnvState::pristine(const RegionGrid& g) {
  const int n = g.zone_count();
  EnvState s;
  s.h.resize(n);
  s.q = Eigen::ArrayXi::Zero(n);
  s.d = Eigen::ArrayXi::Zero(n);
  for (int z = 0; z < n; ++z) s.h[z] = g.fuel[z].eta;
  s.k.assign(n, 0);
  s.extinguished.assign(n, 0);
  return s;
}

namespace {

FuelParams midpoint(const FuelParams& a, const FuelParams& b) {
  FuelParams m = a;
  m.kappa_load = 0.5 * (a.kappa_load + b.kappa_load);
  m.kappa_sav = 0.5 * (a.kappa_sav + b.kappa_sav);
  m.kappa_depth = 0.5 * (a.kappa_depth + b.kappa_depth);
  m.kappa_moist = 0.5 * (a.kappa_moist + b.kappa_moist);
  m.kappa_heat = 0.5 * (a.kappa_heat + b.kappa_heat);
  m.kappa_dens = 0.5 * (a.kappa_dens + b.kappa_dens);
  m.m_tot = 0.5 * (a.m_tot + b.m_tot);
  m.m_eff = 0.5 * (a.m_eff + b.m_eff);
  return m;
}

}  // namespace

double rothermel_ros(const FuelParams& from, const FuelParams& to, const WindState& wind,
                     double psi, double slope, const SpreadParams& p) {
  // Classic spread-model structure: reaction intensity * propagating flux /
  // heat sink, then wind, slope and elliptical direction multipliers. The
  // shapes keep the standard monotonicities (wind and upslope accelerate,
  // moisture damps); ros_scale absorbs absolute calibration.
  const FuelParams f = midpoint(from, to);
  const double fineness = f.kappa_sav * f.kappa_depth;
  const double reaction_vel = fineness / (400.0 + fineness);
  const double eta_moist = std::exp(-3.0 * f.kappa_moist);
  const double eta_mineral = std::min(1.0, 0.174 * std::pow(std::max(f.m_eff, 1e-4), -0.19));
  const double reaction_intensity =
      reaction_vel * f.kappa_load * (1.0 - f.m_tot) * f.kappa_heat * eta_moist * eta_mineral;
  const double beta = f.kappa_load / (f.kappa_depth * f.kappa_dens);  // packing ratio
  const double prop_flux = beta / (0.1 + beta);
  const double heat_sink = f.kappa_dens * f.kappa_depth * (250.0 + 1100.0 * f.kappa_moist);
  const double base = reaction_intensity * prop_flux / heat_sink;

  const double wind_amp = 1.0 + p.wind_coeff * std::pow(wind.speed_mps, p.wind_exp);
  const double up = std::max(slope, 0.0);
  const double slope_amp = 1.0 + p.slope_coeff * up * up;
  // Elliptical fire shape: eccentricity grows with wind, the head (psi equal
  // to the wind direction) keeps factor 1 and the back fire is slowest.
  const double lb = std::min(p.lb_max, 1.0 + p.lb_coeff * wind.speed_mps);
  const double ecc = std::sqrt(std::max(0.0, 1.0 - 1.0 / (lb * lb)));
  const double dir = (1.0 - ecc) / (1.0 - ecc * std::cos(psi - wind.direction_phi));
  return p.ros_scale * base * wind_amp * slope_amp * dir;
}

std::vector<std::pair<int, int>> sample_adjacency(const EnvState& s, const WindState& wind,
                                                  const RegionGrid& g, const SpreadParams& p,
                                                  Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  std::normal_distribution<double> noise(0.0, p.edge_noise_sigma);
  const auto offsets = disk_offsets(g, p.cutoff_zones * g.zone_size_m);
  for (int src = 0; src < s.zone_count(); ++src) {
    if (!s.k[src] || s.extinguished[src]) continue;
    const ZoneId c = g.zone(src);
    for (const auto& [dr, dc] : offsets) {
      const int row = c.row + dr, col = c.col + dc;
      if (!g.contains(row, col)) continue;
      const int dst = row * g.width + col;
      if (dst == src) {
        edges.emplace_back(src, dst);  // a burning zone always reaches itself
        continue;
      }
      if (s.extinguished[dst]) continue;
      const double d = distance_m(g, src, dst);
      const double psi = bearing(g, src, dst);
      const double slope = (g.fuel[dst].kappa_elev - g.fuel[src].kappa_elev) / d;
      const double ros = rothermel_ros(g.fuel[src], g.fuel[dst], wind, psi, slope, p);
      const double length = ros * p.step_minutes * std::exp(noise(rng));
      if (length >= d) edges.emplace_back(src, dst);
    }
  }
  return edges;
}

std::vector<int> sample_spotting(const EnvState& s, const WindState& wind, const RegionGrid& g,
                                 const SpreadParams& p, Rng& rng) {
  std::vector<int> out;
  if (p.p_spot <= 0.0) return out;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::exponential_distribution<double> dist(p.lambda_spot);
  for (int src = 0; src < s.zone_count(); ++src) {
    if (!s.k[src] || s.extinguished[src]) continue;
    if (u01(rng) >= p.p_spot) continue;
    const double d = dist(rng);
    const ZoneId c = g.zone(src);
    // Ember travels downwind from the source centre; row 0 is north.
    const double x = (c.col + 0.5) * g.zone_size_m + d * std::sin(wind.direction_phi);
    const double y = (c.row + 0.5) * g.zone_size_m - d * std::cos(wind.direction_phi);
    const int col = static_cast<int>(std::floor(x / g.zone_size_m));
    const int row = static_cast<int>(std::floor(y / g.zone_size_m));
    if (!g.contains(row, col)) continue;
    const int dst = row * g.width + col;
    if (!s.extinguished[dst]) out.push_back(dst);
  }
  return out;
}

std::vector<int> apply_extinguish(EnvState& s, const HeliDecision& x, double radius_m,
                                  const RegionGrid& g) {
  if (x.target == HeliDecision::kNoTarget) return {};
  std::vector<int> footprint = neighbors_within(g, x.target, radius_m);
  for (int z : footprint) {
    s.extinguished[z] = 1;
    s.d[z] += s.q[z];
    s.q[z] = 0;
    s.k[z] = 0;
  }
  return footprint;
}

namespace {

// Rounds three nonnegative flows summing to `total` back to integers with
// the same total: floor everything, then hand out the leftover units by
// largest fractional remainder (ties in q, h, d order).
std::array<int, 3> apportion(double qf, double hf, double df, int total) {
  const std::array<double, 3> real{qf, hf, df};
  std::array<int, 3> out{};
  std::array<double, 3> rem{};
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    out[i] = static_cast<int>(std::floor(real[i]));
    rem[i] = real[i] - out[i];
    assigned += out[i];
  }
  int left = total - assigned;
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (int i = 0; i < 3 && left > 0; ++i, --left) out[order[i]] += 1;
  return out;
}

}  // namespace

void step_env(EnvState& s, const std::vector<std::pair<int, int>>& adjacency,
              const std::vector<int>& spot_ignitions, const RegionGrid& g) {
  const int n = s.zone_count();
  std::vector<char> reached(n, 0);
  for (const auto& [src, dst] : adjacency)
    if (s.k[src] && !s.extinguished[dst]) reached[dst] = 1;
  for (int z : spot_ignitions)
    if (!s.extinguished[z]) reached[z] = 1;

  for (int z = 0; z < n; ++z) {
    if (s.extinguished[z]) continue;
    const FuelParams& f = g.fuel[z];
    const double qx = s.q[z], hx = s.h[z], dx = s.d[z];
    const bool new_ignite = reached[z] && !s.k[z];
    // Flows: burning fuel dies off, burning fuel ignites healthy fuel, and a
    // fresh ignition moves q_init units out of the healthy pool. Transfers
    // cap at the available healthy fuel.
    const double die = f.xi * qx;
    const double spread_transfer = std::min(f.lambda * qx * hx, hx);
    const double ignite_transfer =
        new_ignite ? std::min(static_cast<double>(f.q_init), hx - spread_transfer) : 0.0;
    const double qf = qx - die + spread_transfer + ignite_transfer;
    const double hf = hx - spread_transfer - ignite_transfer;
    const double df = dx + die;
    const auto [qi, hi, di] = apportion(qf, hf, df, f.eta);
    if (qi + hi + di != f.eta || qi < 0 || hi < 0 || di < 0)
      throw std::logic_error("fuel conservation broken in zone " + std::to_string(z));
    if (di < s.d[z]) throw std::logic_error("dead fuel decreased in zone " + std::to_string(z));
    s.q[z] = qi;
    s.h[z] = hi;
    s.d[z] = di;
    s.k[z] = qi > 0;
  }
  s.t += 1;
}

ObservationSet observe(const EnvState& s, int drone_zone, double radius_m, double sigma_obs,
                       const RegionGrid& g, Rng& rng) {
  ObservationSet obs;
  obs.zones = neighbors_within(g, drone_zone, radius_m);
  obs.y.resize(static_cast<Eigen::Index>(obs.zones.size()));
  std::normal_distribution<double> noise(0.0, sigma_obs);
  for (std::size_t i = 0; i < obs.zones.size(); ++i) {
    const int z = obs.zones[i];
    obs.y[static_cast<Eigen::Index>(i)] = g.fuel[z].c * s.q[z] + noise(rng);
  }
  return obs;
}

double step_cost(const EnvState& s, bool drone_failed, double c_fail, const RegionGrid& g) {
  double cost = 0.0;
  for (int z = 0; z < s.zone_count(); ++z) cost += g.fuel[z].r * s.q[z];
  if (drone_failed) cost += c_fail;
  return cost;
}

double burned_area_m2(const EnvState& s, const RegionGrid& g) {
  int touched = 0;
  for (int z = 0; z < s.zone_count(); ++z)
    if (s.q[z] + s.d[z] > 0) ++touched;
  return touched * g.zone_size_m * g.zone_size_m;
}

}  // namespace wildsim
