#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "cafl/config.hpp"
#include "cafl/errors.hpp"
#include "cafl/experiment.hpp"
#include "cafl/export.hpp"

namespace {

struct RunOptions {
  std::string config;
  std::string seeds;
  std::string strategies;
  std::string timing;
  std::string out;
  bool quiet = false;
};

cafl::ExperimentConfig resolve(const RunOptions& opts) {
  cafl::ExperimentConfig config =
      opts.config.empty() ? cafl::ExperimentConfig{} : cafl::load_config(opts.config);
  if (!opts.seeds.empty()) config.seeds = cafl::parse_seed_list(opts.seeds);
  if (!opts.strategies.empty()) {
    config.strategies = cafl::parse_strategy_list(opts.strategies);
  }
  if (!opts.timing.empty()) config.timing = cafl::parse_timing_mode(opts.timing);
  if (!opts.out.empty()) config.output_dir = opts.out;
  config.validate();
  return config;
}

int run(const RunOptions& opts) {
  const cafl::ExperimentConfig config = resolve(opts);
  cafl::ProgressCallback progress;
  if (!opts.quiet) {
    progress = [&](cafl::StrategyKind s, std::uint64_t seed,
                   const cafl::RoundRecord& r) {
      if (r.round != config.rounds) return;
      std::fprintf(stderr, "%-7s seed %-3llu acc %.4f  f1 %.4f\n",
                   std::string(cafl::to_string(s)).c_str(),
                   static_cast<unsigned long long>(seed), r.metrics.accuracy,
                   r.metrics.macro_f1);
    };
  }
  const cafl::ResultsBundle results = cafl::run_experiment(config, progress);
  cafl::export_results(results.rows, results.summary, config, config.output_dir);
  cafl::write_summary_csv(std::cout, results.summary);
  return 0;
}

int summarize(const std::string& rounds_path) {
  const auto rows = cafl::read_rounds_csv(std::filesystem::path(rounds_path));
  cafl::write_summary_csv(std::cout, cafl::summarize(rows));
  return 0;
}

int validate(const RunOptions& opts) {
  std::cout << cafl::config_to_json(resolve(opts)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cellular-automaton client selection for vehicular federated learning"};
  app.set_version_flag("--version", cafl::version_string());
  app.require_subcommand(1);

  RunOptions opts;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", opts.config, "JSON config or manifest.json")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seeds, "Comma-separated seeds, e.g. 0,1,2");
    cmd->add_option("--strategy", opts.strategies, "Comma-separated: ca_cs,random");
    cmd->add_option("--timing", opts.timing, "wallclock or simulated");
    cmd->add_option("-o,--out", opts.out, "Output directory");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Run the experiment grid and export results");
  add_run_flags(run_cmd);
  run_cmd->add_flag("-q,--quiet", opts.quiet, "No per-run progress on stderr");

  CLI::App* validate_cmd =
      app.add_subcommand("validate-config", "Print the fully resolved config");
  add_run_flags(validate_cmd);

  std::string rounds_path;
  CLI::App* summarize_cmd =
      app.add_subcommand("summarize", "Recompute summary.csv from a rounds.csv");
  summarize_cmd->add_option("rounds_csv", rounds_path)->required()->check(
      CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(opts);
    if (*validate_cmd) return validate(opts);
    if (*summarize_cmd) return summarize(rounds_path);
  } catch (const cafl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cafl::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const cafl::OutputError& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
