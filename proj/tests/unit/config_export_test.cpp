#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cafl/config.hpp"
#include "cafl/errors.hpp"
#include "cafl/experiment.hpp"
#include "cafl/export.hpp"

namespace cafl {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cafl_cfg_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.dataset.n_samples = 400;
  c.dataset.n_features = 6;
  c.dataset.n_classes = 4;
  c.mobility.n_vehicles = 20;
  c.rounds = 3;
  c.seeds = {0, 1};
  c.timing = TimingMode::kSimulated;
  c.trainer.local_epochs = 1;
  return c;
}

TEST(Config, DefaultsMatchTheExperiment) {
  const ExperimentConfig c = parse_config("{}");
  EXPECT_EQ(c.grid_side, 5);
  EXPECT_EQ(c.mobility.n_vehicles, 100);
  EXPECT_EQ(c.rounds, 20);
  EXPECT_EQ(c.seeds.size(), 10u);
  EXPECT_DOUBLE_EQ(c.ca.select_fraction, 0.4);
  EXPECT_DOUBLE_EQ(c.latency.penalty_seconds, 5.0);
  EXPECT_EQ(c.trainer.batch_size, 32);
}

TEST(Config, RoundTripsThroughJson) {
  ExperimentConfig c = tiny_config();
  c.ca.von_neumann_weight = 0.7;
  c.latency.mode = PenaltyMode::kOncePerRound;
  c.trainer.kind = TrainerKind::kMlp;
  c.strategies = {StrategyKind::kRandom};
  const std::string once = config_to_json(c);
  const std::string twice = config_to_json(parse_config(once));
  EXPECT_EQ(once, twice);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(parse_config(R"({"grid_sid": 5})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"ca": {"alpha": 1}})"), ConfigError);
  EXPECT_THROW(parse_config("{"), ConfigError);
}

TEST(Config, InvalidValuesAreRejected) {
  EXPECT_THROW(parse_config(R"({"grid_side": 0})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"seeds": [1, 1]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"strategies": ["greedy"]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"ca": {"von_neumann_weight": 0.1}})"), ConfigError);
}

TEST(Config, RelativeIdxPathsResolveAgainstBaseDir) {
  const ExperimentConfig c = parse_config(
      R"({"dataset": {"kind": "mnist_idx",
                      "files": [{"images": "a.idx", "labels": "b.idx"}]}})",
      "/data/here");
  ASSERT_EQ(c.dataset.files.size(), 1u);
  EXPECT_EQ(c.dataset.files[0].images, fs::path("/data/here/a.idx"));
}

TEST(Config, CommandLineLists) {
  EXPECT_EQ(parse_seed_list("3,1,2"), (std::vector<std::uint64_t>{3, 1, 2}));
  EXPECT_THROW(parse_seed_list("1,x"), ConfigError);
  EXPECT_EQ(parse_strategy_list("random"),
            std::vector<StrategyKind>{StrategyKind::kRandom});
}

TEST(Export, FloatFormatting) {
  EXPECT_EQ(format_float(0.5), "0.5");
  EXPECT_EQ(format_float(1.0 / 3.0), "0.333333");
  EXPECT_EQ(format_float(1234567.0), "1.23457e+06");
}

TEST(Export, FullGridWritesFourHundredRows) {
  std::vector<RoundRow> rows;
  for (const char* s : {"ca_cs", "random"}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      for (int r = 1; r <= 20; ++r) rows.push_back(RoundRow{s, seed, r, 10});
    }
  }
  std::stringstream out;
  write_rounds_csv(out, rows);
  std::string line;
  std::getline(out, line);
  EXPECT_EQ(line, kRoundsHeader);
  int count = 0;
  while (std::getline(out, line)) ++count;
  EXPECT_EQ(count, 400);

  const auto summary = summarize(rows);
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[0].strategy, "ca_cs");
  EXPECT_EQ(summary[0].n_seeds, 10u);
}

TEST(Export, EmptyInputWritesHeaderOnly) {
  std::stringstream rounds, summary;
  write_rounds_csv(rounds, {});
  write_summary_csv(summary, {});
  EXPECT_EQ(rounds.str(), std::string(kRoundsHeader) + "\n");
  EXPECT_EQ(summary.str(), std::string(kSummaryHeader) + "\n");
}

TEST(Export, SummaryUsesSampleStd) {
  std::vector<RoundRow> rows{{"ca_cs", 0, 1, 10, 1, 5, 1, 6, 0.5, 0.4},
                             {"ca_cs", 1, 1, 10, 3, 15, 1, 16, 0.7, 0.6}};
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s[0].final_accuracy.mean, 0.6);
  EXPECT_NEAR(s[0].final_accuracy.std, std::sqrt(0.02), 1e-12);
  EXPECT_DOUBLE_EQ(s[0].stragglers_selected.mean, 2.0);
  EXPECT_DOUBLE_EQ(s[0].total_seconds.mean, 11.0);
}

TEST(Export, CsvReadsBack) {
  std::vector<RoundRow> rows{{"random", 4, 2, 10, 2, 10, 0.25, 10.25, 0.5, 0.125}};
  std::stringstream buf;
  write_rounds_csv(buf, rows);
  const auto back = read_rounds_csv(buf);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].strategy, "random");
  EXPECT_EQ(back[0].n_stragglers_selected, 2u);
  EXPECT_DOUBLE_EQ(back[0].total_s, 10.25);
  std::stringstream bad("nonsense\n1,2\n");
  EXPECT_THROW(read_rounds_csv(bad), DataError);
}

TEST(Export, UnwritableDirectoryNamesThePath) {
  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "file, not a directory";
  const fs::path target = blocker / "out";
  try {
    export_results({}, {}, ExperimentConfig{}, target);
    FAIL() << "expected OutputError";
  } catch (const OutputError& e) {
    EXPECT_NE(std::string(e.what()).find(blocker.string()), std::string::npos)
        << e.what();
  }
  fs::remove_all(blocker);
}

TEST(Export, ManifestReproducesTheRun) {
  const ExperimentConfig c = tiny_config();
  const ResultsBundle first = run_experiment(c);
  const fs::path dir = scratch("manifest");
  export_results(first.rows, first.summary, c, dir);
  EXPECT_TRUE(fs::exists(dir / "rounds.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));

  const ExperimentConfig reloaded = load_config(dir / "manifest.json");
  const ResultsBundle second = run_experiment(reloaded);
  const fs::path dir2 = scratch("manifest2");
  export_results(second.rows, second.summary, reloaded, dir2);
  EXPECT_EQ(slurp(dir / "rounds.csv"), slurp(dir2 / "rounds.csv"));
  EXPECT_EQ(slurp(dir / "summary.csv"), slurp(dir2 / "summary.csv"));
  EXPECT_NE(slurp(dir / "manifest.json").find(version_string()), std::string::npos);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

}  // namespace
}  // namespace cafl
