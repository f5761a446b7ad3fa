#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wildsim/harness.hpp"

using namespace wildsim;
namespace fs = std::filesystem;

namespace {

// Self-cleaning scratch directory holding a saved region and config files.
struct ScenarioDir {
  fs::path dir;

  explicit ScenarioDir(const std::string& tag) {
    dir = fs::temp_directory_path() / ("wildsim_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);

    RegionGrid g;
    g.width = 6;
    g.height = 6;
    g.zone_size_m = 30.0;
    g.fuel.assign(36, FuelParams{});
    save_region(g, (dir / "region.csv").string());
  }
  ~ScenarioDir() { fs::remove_all(dir); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p.string();
  }
};

// A small but lively scenario: real spread, short horizon, fast policies.
std::string base_config(const std::string& heli, const std::string& drone) {
  return std::string(R"({
    "region_file": "region.csv",
    "horizon_steps": 4,
    "rho_obs_m": 90.0, "rho_heli_m": 60.0, "d_max_m": 90.0,
    "spread": {"ros_scale": 3.0e4},
    "fire_init": {"min_zones": 2, "max_zones": 3,
                  "scatter_sigma_m": 30.0, "avoid_home_m": 90.0},
    "policy": {"heli": ")") +
         heli + R"(", "drone": ")" + drone + R"("},
    "episodes": 4
  })";
}

Simulation load_sim(const ScenarioDir& sd, const std::string& text) {
  return make_simulation(load_config(sd.write("cfg.json", text)));
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("simulation construction validates the scenario") {
  const ScenarioDir sd("sim_validate");

  CHECK_NOTHROW(load_sim(sd, base_config("null", "null")));

  ScenarioConfig bad = load_config(sd.write("cfg.json", base_config("null", "null")));
  SUBCASE("home zone must exist") {
    bad.home_zone = 36;
    CHECK_THROWS_AS(make_simulation(bad), ConfigError);
  }
  SUBCASE("some zone must be eligible for ignition") {
    bad.fire_init.avoid_home_m = 1e6;
    CHECK_THROWS_AS(make_simulation(bad), ConfigError);
  }
  SUBCASE("initial fire cannot outgrow the region") {
    bad.fire_init.max_zones = 37;
    CHECK_THROWS_AS(make_simulation(bad), ConfigError);
  }
  SUBCASE("region file must exist") {
    bad.region_file = (sd.dir / "missing.csv").string();
    CHECK_THROWS_AS(make_simulation(bad), ConfigError);
  }
}

TEST_CASE("episodes are reproducible and internally consistent") {
  const ScenarioDir sd("episode");
  const Simulation sim = load_sim(sd, base_config("dla1", "pfa-cfa"));

  const EpisodeRecord a = run_episode(sim, 42);
  const EpisodeRecord b = run_episode(sim, 42);
  CHECK(episode_to_json_text(a) == episode_to_json_text(b));

  REQUIRE(a.steps.size() == 4);
  double cum = 0.0;
  for (const auto& s : a.steps) {
    cum += s.step_cost;
    CHECK(s.cum_cost == doctest::Approx(cum).epsilon(1e-12));
    CHECK(s.step_cost >= 0.0);
    // A strike can only remove believed fire.
    CHECK(s.belief_pk_sum_post <= s.belief_pk_sum_pre + 1e-12);
    CHECK(s.heli_target >= 0);  // something is always worth striking here
  }
  CHECK(a.cumulative_cost == doctest::Approx(cum));
  CHECK(a.burned_area_m2 == a.steps.back().burned_area_m2);
  CHECK(a.burned_area_m2 > 0.0);  // the initial cluster alone touches zones

  // The range guard brings the drone home on the last battery step.
  CHECK(a.drone_returned);
  CHECK(!a.drone_failed);
  CHECK(a.steps.back().drone_target == sim.grid.home.index);

  // A different seed gives a different fire.
  const EpisodeRecord c = run_episode(sim, 43);
  CHECK(episode_to_json_text(a) != episode_to_json_text(c));
}

TEST_CASE("null policies do nothing") {
  const ScenarioDir sd("null_policies");
  const Simulation sim = load_sim(sd, base_config("null", "null"));
  const EpisodeRecord e = run_episode(sim, 7);
  for (const auto& s : e.steps) {
    CHECK(s.heli_target == HeliDecision::kNoTarget);
    CHECK(s.drone_target == sim.grid.home.index);
    CHECK(s.belief_pk_sum_post == s.belief_pk_sum_pre);
  }
  CHECK(e.drone_returned);
}

TEST_CASE("scenario-sampling policy runs whole episodes deterministically") {
  const ScenarioDir sd("ts_episode");
  std::string text = base_config("dla1", "ts-dla");
  text.insert(text.rfind('}'), R"(, "drone_params": {"horizon": 2, "num_scenarios": 3})");
  const Simulation sim = load_sim(sd, text);
  const EpisodeRecord a = run_episode(sim, 11);
  const EpisodeRecord b = run_episode(sim, 11);
  CHECK(episode_to_json_text(a) == episode_to_json_text(b));
  CHECK(a.steps.size() == 4);
}

TEST_CASE("belief tracing embeds per-zone snapshots") {
  const ScenarioDir sd("trace");
  const Simulation sim = load_sim(sd, base_config("null", "pfa-cfa"));
  const EpisodeRecord e = run_episode(sim, 3, true);
  REQUIRE(!e.steps.empty());
  for (const auto& s : e.steps) {
    REQUIRE(!s.belief_json.empty());
    const auto j = nlohmann::json::parse(s.belief_json);
    CHECK(j["pk"].size() == 36);
    CHECK(j["extinguished"].size() == 36);
  }
  const auto full = nlohmann::json::parse(episode_to_json_text(e));
  CHECK(full["steps"][0].contains("belief"));
}

TEST_CASE("a fixed wind series overrides the wind model") {
  const ScenarioDir sd("wind_series");
  sd.write("wind.csv",
           "timestamp,speed_mps,direction_deg\n"
           "0,1.0,0\n1,2.0,90\n2,3.0,180\n3,4.0,270\n4,5.0,45\n");
  std::string text = base_config("null", "null");
  text.insert(text.rfind('}'), R"(, "wind_file": "wind.csv")");
  const Simulation sim = load_sim(sd, text);
  REQUIRE(sim.wind_series.size() == 5);

  const EpisodeRecord e = run_episode(sim, 1);
  for (int t = 0; t < 4; ++t) {
    CHECK(e.steps[t].wind_speed == doctest::Approx(1.0 + t));
    CHECK(e.steps[t].wind_phi == doctest::Approx(wrap_angle((90.0 * t) * kPi / 180.0)));
  }

  SUBCASE("a series shorter than the horizon is rejected") {
    sd.write("wind.csv", "timestamp,speed_mps,direction_deg\n0,1.0,0\n1,2.0,90\n");
    CHECK_THROWS_AS(load_sim(sd, text), ConfigError);
  }
}

TEST_CASE("batch seeding is positional at any parallelism") {
  const ScenarioDir sd("batch");
  const Simulation sim = load_sim(sd, base_config("dla1", "pfa-cfa"));
  const BatchResult seq = run_batch(sim, 6, 100, 1);
  const BatchResult par = run_batch(sim, 6, 100, 3);
  REQUIRE(seq.episodes.size() == 6);
  REQUIRE(par.episodes.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(seq.episodes[i].seed == 100 + static_cast<std::uint64_t>(i));
    CHECK(episode_to_json_text(seq.episodes[i]) == episode_to_json_text(par.episodes[i]));
  }
  CHECK(seq.metrics.mean_total_cost == par.metrics.mean_total_cost);
  CHECK(seq.metrics.mean_cum_cost == par.metrics.mean_cum_cost);
}

TEST_CASE("metric arithmetic") {
  auto make_ep = [](std::vector<double> cum, double burned, bool failed, bool returned) {
    EpisodeRecord e;
    for (std::size_t t = 0; t < cum.size(); ++t) {
      StepRecord s;
      s.t = static_cast<int>(t);
      s.cum_cost = cum[t];
      e.steps.push_back(s);
    }
    e.cumulative_cost = cum.empty() ? 0.0 : cum.back();
    e.burned_area_m2 = burned;
    e.drone_failed = failed;
    e.drone_returned = returned;
    return e;
  };

  SUBCASE("two episodes") {
    const std::vector<EpisodeRecord> eps = {make_ep({1.0, 3.0}, 100.0, false, true),
                                            make_ep({2.0, 6.0}, 900.0, true, false)};
    const BatchMetrics m = compute_metrics(eps, 500.0);
    CHECK(m.episodes == 2);
    REQUIRE(m.mean_cum_cost.size() == 2);
    CHECK(m.mean_cum_cost[0] == doctest::Approx(1.5));
    CHECK(m.mean_cum_cost[1] == doctest::Approx(4.5));
    // Sample sd of {1,2} is sqrt(0.5): half-width 1.96*sqrt(0.5/2) = 0.98.
    CHECK(m.ci_half_width[0] == doctest::Approx(0.98).epsilon(1e-12));
    CHECK(m.mean_total_cost == doctest::Approx(4.5));
    CHECK(m.class_c_prob == doctest::Approx(0.5));
    CHECK(m.failure_rate == doctest::Approx(0.5));
    CHECK(m.return_rate == doctest::Approx(0.5));
    CHECK(m.mean_burned_area_m2 == doctest::Approx(500.0));
  }
  SUBCASE("a single episode has no interval") {
    const BatchMetrics m = compute_metrics({make_ep({2.0}, 10.0, false, true)}, 500.0);
    CHECK(m.mean_total_cost == doctest::Approx(2.0));
    CHECK(m.total_ci_half_width == 0.0);
    CHECK(m.ci_half_width[0] == 0.0);
  }
  SUBCASE("ragged horizons carry the final cost forward") {
    const std::vector<EpisodeRecord> eps = {make_ep({4.0}, 0.0, false, true),
                                            make_ep({1.0, 2.0, 3.0}, 0.0, false, true)};
    const BatchMetrics m = compute_metrics(eps, 500.0);
    REQUIRE(m.mean_cum_cost.size() == 3);
    CHECK(m.mean_cum_cost[2] == doctest::Approx((4.0 + 3.0) / 2.0));
  }
  SUBCASE("empty batch") {
    const BatchMetrics m = compute_metrics({}, 500.0);
    CHECK(m.episodes == 0);
    CHECK(m.mean_cum_cost.empty());
  }
}

TEST_CASE("grid tuning") {
  const ScenarioDir sd("tune");
  const Simulation sim = load_sim(sd, base_config("null", "pfa-cfa"));
  TuneSpec spec;
  spec.names = {"spread.ros_scale", "kernel.theta0"};
  spec.values = {{1.0, 3.0e4}, {0.001, 0.02}};

  const TuneResult r = tune_grid(sim, spec, 2, 500, 1);
  REQUIRE(r.ranked.size() == 4);
  CHECK(r.best == 0);
  for (std::size_t i = 1; i < r.ranked.size(); ++i)
    CHECK(r.ranked[i - 1].metrics.mean_total_cost <= r.ranked[i].metrics.mean_total_cost);

  // Common random numbers: the same grid re-run reproduces every entry.
  const TuneResult r2 = tune_grid(sim, spec, 2, 500, 1);
  for (std::size_t i = 0; i < r.ranked.size(); ++i) {
    CHECK(r.ranked[i].values == r2.ranked[i].values);
    CHECK(r.ranked[i].metrics.mean_total_cost == r2.ranked[i].metrics.mean_total_cost);
  }

  SUBCASE("malformed specs are rejected") {
    TuneSpec bad = spec;
    bad.values.pop_back();
    CHECK_THROWS_AS(tune_grid(sim, bad, 1, 1, 1), ConfigError);
    bad = spec;
    bad.values[0].clear();
    CHECK_THROWS_AS(tune_grid(sim, bad, 1, 1, 1), ConfigError);
  }
}

TEST_CASE("exports") {
  const ScenarioDir sd("exports");
  const Simulation sim = load_sim(sd, base_config("null", "pfa-cfa"));
  const BatchResult batch = run_batch(sim, 3, 9, 1);

  SUBCASE("batch JSON round-trips through a parser") {
    const std::string path = (sd.dir / "batch.json").string();
    export_batch_json(batch, sim.cfg, path);
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    CHECK(j["episodes"].size() == 3);
    CHECK(j["config"]["region_file"] == sim.cfg.region_file);
    CHECK(j["metrics"]["mean_total_cost"].get<double>() ==
          doctest::Approx(batch.metrics.mean_total_cost));
    CHECK(j["episodes"][0]["steps"].size() == 4);
  }
  SUBCASE("batch CSVs have one row per record") {
    const std::string dir = (sd.dir / "csv").string();
    export_batch_csv(batch, dir);
    CHECK(count_lines(fs::path(dir) / "episodes.csv") == 1 + 3);
    CHECK(count_lines(fs::path(dir) / "cost_profile.csv") == 1 + 4);

    BatchResult empty;
    empty.metrics = compute_metrics({}, 1.0);
    const std::string edir = (sd.dir / "csv_empty").string();
    export_batch_csv(empty, edir);
    CHECK(count_lines(fs::path(edir) / "episodes.csv") == 1);
    CHECK(count_lines(fs::path(edir) / "cost_profile.csv") == 1);
  }
  SUBCASE("tune exports include the ranked table and level sets") {
    TuneSpec spec;
    spec.names = {"spread.ros_scale", "kernel.theta0"};
    spec.values = {{1.0, 3.0e4}, {0.001, 0.02}};
    const TuneResult r = tune_grid(sim, spec, 1, 5, 1);

    const std::string jpath = (sd.dir / "tune.json").string();
    export_tune_json(r, jpath);
    std::ifstream in(jpath);
    const auto j = nlohmann::json::parse(in);
    CHECK(j["ranked"].size() == 4);
    CHECK(j["names"] == nlohmann::json(spec.names));

    const std::string dir = (sd.dir / "tune_csv").string();
    export_tune_csv(r, dir);
    CHECK(count_lines(fs::path(dir) / "ranked.csv") == 1 + 4);
    const fs::path level = fs::path(dir) / "levelset_spread_ros_scale_kernel_theta0.csv";
    CHECK(fs::exists(level));
    // The slice through the best point varies both coordinates: 2x2 grid.
    CHECK(count_lines(level) == 1 + 4);
  }
}
