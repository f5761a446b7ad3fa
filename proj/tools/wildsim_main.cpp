// Command-line front end: batch simulation, grid tuning, single-episode
// replay with belief traces, and config validation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wildsim/harness.hpp"

namespace {

using namespace wildsim;

void print_metrics(const BatchMetrics& m) {
  std::printf("episodes            %d\n", m.episodes);
  std::printf("mean total cost     %.6g  (+/- %.6g)\n", m.mean_total_cost,
              m.total_ci_half_width);
  std::printf("class C probability %.4f\n", m.class_c_prob);
  std::printf("return rate         %.4f\n", m.return_rate);
  std::printf("failure rate        %.4f\n", m.failure_rate);
  std::printf("mean burned area    %.6g m^2\n", m.mean_burned_area_m2);
}

// "name=v1,v2,v3" -> one tuning axis.
void parse_tune_axis(const std::string& arg, TuneSpec& spec) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("tune parameter must look like name=v1,v2,... (got '" + arg + "')");
  spec.names.push_back(arg.substr(0, eq));
  std::vector<double> values;
  std::size_t pos = eq + 1;
  while (pos <= arg.size()) {
    const auto comma = arg.find(',', pos);
    const std::string tok =
        arg.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("tune parameter '" + spec.names.back() + "': bad value '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty())
    throw ConfigError("tune parameter '" + spec.names.back() + "': no values given");
  spec.values.push_back(std::move(values));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wildfire mitigation testbed"};
  app.require_subcommand(1);

  std::string config_path;
  int episodes_override = -1;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int parallelism = 0;
  std::string out_json;
  std::string out_csv_dir;

  auto add_common = [&](CLI::App* cmd, bool batch_opts) {
    cmd->add_option("-c,--config", config_path, "scenario config JSON")->required();
    if (batch_opts) {
      cmd->add_option("-n,--episodes", episodes_override, "episode count override");
      cmd->add_option("-p,--parallel", parallelism,
                      "worker threads (0 = hardware concurrency)");
    }
    cmd->add_option("-s,--seed", seed_override, "base seed override")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("-o,--out", out_json, "write JSON results here");
    if (batch_opts) cmd->add_option("--csv-dir", out_csv_dir, "write CSV results here");
  };

  CLI::App* sim_cmd = app.add_subcommand("simulate", "run a batch of episodes");
  add_common(sim_cmd, true);

  CLI::App* tune_cmd = app.add_subcommand("tune", "grid search over tunable parameters");
  add_common(tune_cmd, true);
  std::vector<std::string> tune_args;
  tune_cmd->add_option("--param", tune_args, "tuning axis, name=v1,v2,... (repeatable)")
      ->required();

  CLI::App* replay_cmd = app.add_subcommand("replay", "trace one episode in full detail");
  add_common(replay_cmd, false);

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a config and its data files");
  validate_cmd->add_option("-c,--config", config_path, "scenario config JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ScenarioConfig cfg = load_config(config_path);
    if (episodes_override > 0) cfg.episodes = episodes_override;
    if (seed_set) cfg.base_seed = seed_override;
    const Simulation sim = make_simulation(cfg);

    if (validate_cmd->parsed()) {
      std::printf("ok: %dx%d region, %d zones, %d episodes planned\n", sim.grid.width,
                  sim.grid.height, sim.grid.zone_count(), cfg.episodes);
      return 0;
    }

    if (sim_cmd->parsed()) {
      const BatchResult result = run_batch(sim, cfg.episodes, cfg.base_seed, parallelism);
      print_metrics(result.metrics);
      if (!out_json.empty()) export_batch_json(result, cfg, out_json);
      if (!out_csv_dir.empty()) export_batch_csv(result, out_csv_dir);
      return 0;
    }

    if (tune_cmd->parsed()) {
      TuneSpec spec;
      for (const auto& arg : tune_args) parse_tune_axis(arg, spec);
      const TuneResult result = tune_grid(sim, spec, cfg.episodes, cfg.base_seed, parallelism);
      if (!result.ranked.empty()) {
        std::printf("best combination:\n");
        for (std::size_t i = 0; i < spec.names.size(); ++i)
          std::printf("  %s = %g\n", spec.names[i].c_str(),
                      result.ranked[result.best].values[i]);
        print_metrics(result.ranked[result.best].metrics);
      }
      if (!out_json.empty()) export_tune_json(result, out_json);
      if (!out_csv_dir.empty()) export_tune_csv(result, out_csv_dir);
      return 0;
    }

    // replay
    const EpisodeRecord ep = run_episode(sim, cfg.base_seed, /*trace_beliefs=*/true);
    if (!out_json.empty()) {
      std::ofstream out(out_json);
      if (!out) throw std::runtime_error("cannot open output file: " + out_json);
      out << episode_to_json_text(ep) << "\n";
    } else {
      std::cout << episode_to_json_text(ep) << "\n";
    }
    std::fprintf(stderr, "seed %llu: total cost %.6g, burned %.6g m^2, %s\n",
                 static_cast<unsigned long long>(ep.seed), ep.cumulative_cost,
                 ep.burned_area_m2, ep.drone_returned ? "returned" : "did not return");
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
