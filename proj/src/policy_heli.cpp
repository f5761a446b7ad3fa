#include "wildsim/policy_heli.hpp"

namespace wildsim {

namespace {

int footprint_argmax(const Eigen::ArrayXd& score, double radius_m, const RegionGrid& g) {
  const Eigen::ArrayXd sums = disk_sums(score, radius_m, g);
  int best = 0;
  for (int z = 1; z < g.zone_count(); ++z)
    if (sums[z] > sums[best]) best = z;  // ties keep the lowest index
  return best;
}

}  // namespace

HeliDecision dla1_decide(const BeliefState& b, double wind_phi, const SpreadKernelParams& kp,
                         const HeliPolicyParams& hp, const RegionGrid& g) {
  const Eigen::ArrayXd forecast = forecast_ignition(b, wind_phi, kp, g);
  Eigen::ArrayXd score(g.zone_count());
  for (int z = 0; z < g.zone_count(); ++z) score[z] = g.fuel[z].r * (forecast[z] - b.pk[z]);
  return {footprint_argmax(score, hp.radius_m, g)};
}

HeliDecision cfa_dla_decide(const BeliefState& b, double wind_phi, const SpreadKernelParams& kp,
                            const HeliPolicyParams& hp, const RegionGrid& g) {
  const Eigen::ArrayXd forecast = forecast_ignition(b, wind_phi, kp, g);
  Eigen::ArrayXd score(g.zone_count());
  for (int z = 0; z < g.zone_count(); ++z) {
    const FuelParams& f = g.fuel[z];
    const double f_start = std::max(0.0, forecast[z] - b.pk[z]);
    // One-step fuel forecast without observations: burn factor is the
    // current ignition probability, fresh starts come from the forecast.
    double pq = b.pq[z], ph = b.ph[z], pd = b.pd[z];
    if (!b.extinguished[z]) drift_fuel(pq, ph, pd, b.pk[z], f_start, f);
    score[z] = f.r * f.eta * pq + hp.theta * f_start;
  }
  return {footprint_argmax(score, hp.radius_m, g)};
}

HeliDecision heli_decide(const HeliPolicyRef& ref, const BeliefState& b, double wind_phi,
                         const RegionGrid& g) {
  switch (ref.kind) {
    case HeliPolicyRef::Kind::Dla1:
      return dla1_decide(b, wind_phi, ref.kernel, ref.params, g);
    case HeliPolicyRef::Kind::CfaDla:
      return cfa_dla_decide(b, wind_phi, ref.kernel, ref.params, g);
    case HeliPolicyRef::Kind::None:
      break;
  }
  return {HeliDecision::kNoTarget};
}

}  // namespace wildsim
