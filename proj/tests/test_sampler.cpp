#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "wildsim/gpc.hpp"
#include "wildsim/sampler.hpp"

using namespace wildsim;

TEST_CASE("latent field factorization") {
  SUBCASE("single uncertain zone: scalar posterior variance") {
    const RegionGrid g = oracles::make_test_grid(1, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pk[0] = 0.5;
    const SamplerParams p{};
    const LatentFieldFactor f = laplace_field_cov(b, p, g);
    REQUIRE(f.window == std::vector<int>{0});
    CHECK(f.mean[0] == doctest::Approx(0.0).epsilon(1e-12));  // logit(0.5)
    const double s = p.gpc.theta0_cov + p.gpc.theta2_cov;
    const double w = 0.25;  // logistic curvature at pk = 0.5
    const double var = 1.0 / (1.0 / s + w);
    CHECK(f.chol_l(0, 0) * f.chol_l(0, 0) == doctest::Approx(var).epsilon(1e-12));
    CHECK(!f.jittered);
  }
  SUBCASE("five-zone chain matches the dense inverse") {
    const RegionGrid g = oracles::make_test_grid(5, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pk << 0.3, 0.5, 0.7, 0.2, 0.6;
    const SamplerParams p{};
    const LatentFieldFactor f = laplace_field_cov(b, p, g);
    REQUIRE(f.window.size() == 5);

    const Eigen::MatrixXd sigma = rbf_kernel(g, f.window, f.window, p.gpc);
    Eigen::MatrixXd precision = sigma.inverse();
    for (int i = 0; i < 5; ++i) {
      const double pk = b.pk[f.window[static_cast<std::size_t>(i)]];
      precision(i, i) += pk * (1.0 - pk);
      CHECK(f.mean[i] == doctest::Approx(logit(pk)).epsilon(1e-12));
    }
    const Eigen::MatrixXd ref = precision.inverse();
    const Eigen::MatrixXd cov = f.chol_l * f.chol_l.transpose();
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) CHECK(cov(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-8));
  }
  SUBCASE("only uncertain, unextinguished zones enter the window") {
    const RegionGrid g = oracles::make_test_grid(5, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pk << 0.0, 0.4, 1.0 - 1e-7, 0.6, 0.5;
    b.extinguished[3] = 1;
    b.pk[3] = 0.0;
    const LatentFieldFactor f = laplace_field_cov(b, SamplerParams{}, g);
    CHECK(f.window == std::vector<int>{1, 4});
  }
}

TEST_CASE("ignition field sampling") {
  SUBCASE("balanced belief keeps a balanced marginal") {
    const RegionGrid g = oracles::make_test_grid(1, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pk[0] = 0.5;
    const LatentFieldFactor f = laplace_field_cov(b, SamplerParams{}, g);
    Rng rng = make_stream(41, RngStreamId::Sampler);
    const int trials = 100000;
    int hits = 0;
    for (int i = 0; i < trials; ++i) hits += sample_ignition_field(b, f, rng)[0];
    const double freq = static_cast<double>(hits) / trials;
    const double sigma = std::sqrt(0.25 / trials);
    CHECK(std::abs(freq - 0.5) < 3.0 * sigma);
  }
  SUBCASE("saturated beliefs fall back to near-certain Bernoulli draws") {
    const RegionGrid g = oracles::make_test_grid(3, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pk << 1.0 - 1e-6, 0.0, 0.9;
    b.extinguished[2] = 1;  // extinguished: never burns even with high pk
    const LatentFieldFactor f = laplace_field_cov(b, SamplerParams{}, g);
    CHECK(f.window.empty());
    Rng rng = make_stream(43, RngStreamId::Sampler);
    for (int i = 0; i < 2000; ++i) {
      const auto k = sample_ignition_field(b, f, rng);
      CHECK(k[0] == 1);
      CHECK(k[1] == 0);
      CHECK(k[2] == 0);
    }
  }
  SUBCASE("marginal frequency is monotone in the believed probability") {
    const RegionGrid g = oracles::make_test_grid(3, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pk << 0.2, 0.5, 0.8;
    const LatentFieldFactor f = laplace_field_cov(b, SamplerParams{}, g);
    Rng rng = make_stream(47, RngStreamId::Sampler);
    Eigen::Array3d freq = Eigen::Array3d::Zero();
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
      const auto k = sample_ignition_field(b, f, rng);
      for (int z = 0; z < 3; ++z) freq[z] += k[z];
    }
    freq /= trials;
    CHECK(freq[0] < freq[1] - 0.05);
    CHECK(freq[1] < freq[2] - 0.05);
  }
  SUBCASE("distant zones draw independently") {
    RegionGrid g = oracles::make_test_grid(2, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pk << 0.5, 0.5;
    SamplerParams p{};
    p.gpc.theta1_cov = 1.0;  // correlation dies within a metre
    const LatentFieldFactor f = laplace_field_cov(b, p, g);
    Rng rng = make_stream(53, RngStreamId::Sampler);
    const int trials = 40000;
    int both = 0;
    for (int i = 0; i < trials; ++i) {
      const auto k = sample_ignition_field(b, f, rng);
      both += k[0] && k[1];
    }
    const double freq = static_cast<double>(both) / trials;
    const double sigma = std::sqrt(0.25 * 0.75 / trials);
    CHECK(std::abs(freq - 0.25) < 3.0 * sigma);
  }
}

TEST_CASE("fuel state sampling") {
  SUBCASE("non-burning zones are fully healthy") {
    const RegionGrid g = oracles::make_test_grid(2, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pq[0] = 0.5;  // ignored: the flag decides
    b.ph[0] = 0.2;
    b.pd[0] = 0.3;
    Rng rng = make_stream(59, RngStreamId::Sampler);
    const SampledWorld w = sample_fuel_state(b, {0, 0}, g, rng);
    for (int z = 0; z < 2; ++z) {
      CHECK(w.k[z] == 0);
      CHECK(w.h[z] == 100);
      CHECK(w.q[z] == 0);
      CHECK(w.d[z] == 0);
    }
  }
  SUBCASE("degenerate all-burning split") {
    const RegionGrid g = oracles::make_test_grid(1, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pq[0] = 1.0;
    b.ph[0] = 0.0;
    b.pd[0] = 0.0;
    Rng rng = make_stream(61, RngStreamId::Sampler);
    const SampledWorld w = sample_fuel_state(b, {1}, g, rng);
    CHECK(w.h[0] == 0);
    CHECK(w.q[0] == 100);
    CHECK(w.d[0] == 0);
  }
  SUBCASE("multinomial moments and exact conservation") {
    const RegionGrid g = oracles::make_test_grid(1, 1);
    BeliefState b = BeliefState::pristine(g);
    b.pq[0] = 0.2;
    b.ph[0] = 0.5;
    b.pd[0] = 0.3;
    Rng rng = make_stream(67, RngStreamId::Sampler);
    const int trials = 100000;
    double sum_q = 0, sum_h = 0, sum_d = 0;
    for (int i = 0; i < trials; ++i) {
      const SampledWorld w = sample_fuel_state(b, {1}, g, rng);
      REQUIRE(w.h[0] + w.q[0] + w.d[0] == 100);
      REQUIRE(w.k[0] == (w.q[0] > 0 ? 1 : 0));
      sum_q += w.q[0];
      sum_h += w.h[0];
      sum_d += w.d[0];
    }
    const double rt = std::sqrt(static_cast<double>(trials));
    CHECK(std::abs(sum_q / trials - 20.0) < 3.0 * std::sqrt(100 * 0.2 * 0.8) / rt);
    CHECK(std::abs(sum_h / trials - 50.0) < 3.0 * std::sqrt(100 * 0.5 * 0.5) / rt);
    CHECK(std::abs(sum_d / trials - 30.0) < 3.0 * std::sqrt(100 * 0.3 * 0.7) / rt);
  }
  SUBCASE("a draw with no burning fuel demotes the flag coherently") {
    RegionGrid g = oracles::make_test_grid(1, 1);
    g.fuel[0].eta = 3;
    g.fuel[0].q_init = 1;
    BeliefState b = BeliefState::pristine(g);
    b.pq[0] = 0.05;
    b.ph[0] = 0.9;
    b.pd[0] = 0.05;
    Rng rng = make_stream(71, RngStreamId::Sampler);
    int demoted = 0, kept = 0;
    for (int i = 0; i < 2000; ++i) {
      const SampledWorld w = sample_fuel_state(b, {1}, g, rng);
      CHECK(w.h[0] + w.q[0] + w.d[0] == 3);
      if (w.q[0] == 0) {
        ++demoted;
        CHECK(w.k[0] == 0);
        CHECK(w.h[0] == 3);
        CHECK(w.d[0] == 0);
      } else {
        ++kept;
        CHECK(w.k[0] == 1);
      }
    }
    CHECK(demoted > 0);  // ~86% of draws at these parameters
    CHECK(kept > 0);
  }
}
