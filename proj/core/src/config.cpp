#include "cafl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cafl/errors.hpp"
#include "json.hpp"

namespace cafl {

using nlohmann::json;

std::string_view to_string(TimingMode mode) noexcept {
  switch (mode) {
    case TimingMode::kWallclock:
      return "wallclock";
    case TimingMode::kSimulated:
      return "simulated";
  }
  return "unknown";
}

TimingMode parse_timing_mode(std::string_view name) {
  if (name == "wallclock") return TimingMode::kWallclock;
  if (name == "simulated") return TimingMode::kSimulated;
  throw ConfigError("unknown timing mode '" + std::string(name) +
                    "' (expected wallclock or simulated)");
}

void ExperimentConfig::validate() const {
  if (grid_side < 1) throw ConfigError("grid_side must be >= 1");
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (strategies.empty()) throw ConfigError("at least one strategy is required");
  if (!(test_frac > 0.0 && test_frac < 1.0)) {
    throw ConfigError("test_frac must lie in (0, 1)");
  }
  if (!(seconds_per_sample >= 0.0) || !std::isfinite(seconds_per_sample)) {
    throw ConfigError("timing.seconds_per_sample must be finite and >= 0");
  }
  if (dataset.n_classes < 1) throw ConfigError("dataset.n_classes must be >= 1");
  if (dataset.kind == DatasetSpec::Kind::kSynthetic) {
    if (dataset.n_features < 1) throw ConfigError("dataset.n_features must be >= 1");
    if (dataset.n_samples < static_cast<std::size_t>(dataset.n_classes)) {
      throw ConfigError("dataset.n_samples must be >= n_classes");
    }
  } else if (dataset.files.empty()) {
    throw ConfigError("dataset.files must list at least one IDX pair");
  }
  ca.validate();
  mobility.validate();
  latency.validate();
  trainer.validate();
  const std::size_t cells =
      static_cast<std::size_t>(grid_side) * static_cast<std::size_t>(grid_side);
  if (fraction_count(ca.select_fraction, cells) == 0) {
    throw ConfigError("ca.select_fraction selects no cells on this grid");
  }
  if (cells < 2 && fraction_count(mobility.move_fraction,
                                   static_cast<std::size_t>(mobility.n_vehicles)) > 0) {
    throw ConfigError("vehicles cannot move on a 1x1 grid; set move_fraction 0");
  }
  std::set<StrategyKind> unique(strategies.begin(), strategies.end());
  if (unique.size() != strategies.size()) {
    throw ConfigError("strategies contains duplicates");
  }
  std::set<std::uint64_t> unique_seeds(seeds.begin(), seeds.end());
  if (unique_seeds.size() != seeds.size()) {
    throw ConfigError("seeds contains duplicates");
  }
}

namespace {

// Reads members of one JSON object, rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = object_.find(key);
    if (it == object_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& item : object_.items()) {
      if (!seen_.contains(item.key())) {
        throw ConfigError("unknown key " + path_ + "." + item.key());
      }
    }
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_dataset(const json& j, DatasetSpec& d,
                  const std::filesystem::path& base_dir) {
  ObjectReader r(j, "dataset");
  std::string kind = d.kind == DatasetSpec::Kind::kSynthetic ? "synthetic"
                                                              : "mnist_idx";
  r.read("kind", kind);
  if (kind == "synthetic") {
    d.kind = DatasetSpec::Kind::kSynthetic;
  } else if (kind == "mnist_idx") {
    d.kind = DatasetSpec::Kind::kMnistIdx;
  } else {
    throw ConfigError("dataset.kind must be synthetic or mnist_idx, got " + kind);
  }
  r.read("n_samples", d.n_samples);
  r.read("n_features", d.n_features);
  r.read("mean_spread", d.mean_spread);
  r.read("n_classes", d.n_classes);
  r.read("seed", d.seed);
  if (const json* files = r.child("files")) {
    if (!files->is_array()) throw ConfigError("dataset.files must be an array");
    d.files.clear();
    for (const json& entry : *files) {
      ObjectReader fr(entry, "dataset.files[]");
      std::string images, labels;
      fr.read("images", images);
      fr.read("labels", labels);
      fr.finish();
      if (images.empty() || labels.empty()) {
        throw ConfigError("dataset.files[] needs images and labels");
      }
      IdxPair pair{images, labels};
      if (pair.images.is_relative()) pair.images = base_dir / pair.images;
      if (pair.labels.is_relative()) pair.labels = base_dir / pair.labels;
      d.files.push_back(std::move(pair));
    }
  }
  r.finish();
}

void read_trainer(const json& j, TrainerSpec& t) {
  ObjectReader r(j, "trainer");
  std::string kind(to_string(t.kind));
  r.read("kind", kind);
  t.kind = parse_trainer(kind);
  r.read("hidden_units", t.hidden_units);
  r.read("learning_rate", t.adam.learning_rate);
  r.read("beta1", t.adam.beta1);
  r.read("beta2", t.adam.beta2);
  r.read("epsilon", t.adam.epsilon);
  r.read("local_epochs", t.local_epochs);
  r.read("batch_size", t.batch_size);
  r.finish();
}

void read_ca(const json& j, CaParams& ca) {
  ObjectReader r(j, "ca");
  r.read("freshness_weight", ca.freshness_weight);
  r.read("staleness_weight", ca.staleness_weight);
  r.read("balance_weight", ca.balance_weight);
  r.read("von_neumann_weight", ca.von_neumann_weight);
  r.read("diagonal_weight", ca.diagonal_weight);
  r.read("select_fraction", ca.select_fraction);
  r.read("dq_floor", ca.dq_floor);
  r.read("tc_floor", ca.tc_floor);
  r.finish();
}

void read_mobility(const json& j, MobilityParams& m) {
  ObjectReader r(j, "mobility");
  r.read("move_fraction", m.move_fraction);
  r.read("arrival_shard_size", m.arrival_shard_size);
  r.read("initial_fraction", m.initial_fraction);
  r.finish();
}

void read_latency(const json& j, LatencyParams& l) {
  ObjectReader r(j, "latency");
  r.read("straggler_fraction", l.straggler_fraction);
  r.read("penalty_seconds", l.penalty_seconds);
  std::string mode(to_string(l.mode));
  r.read("penalty_mode", mode);
  l.mode = parse_penalty_mode(mode);
  r.finish();
}

void read_timing(const json& j, ExperimentConfig& c) {
  ObjectReader r(j, "timing");
  std::string mode(to_string(c.timing));
  r.read("mode", mode);
  c.timing = parse_timing_mode(mode);
  r.read("seconds_per_sample", c.seconds_per_sample);
  r.finish();
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (root.is_object() && root.contains("config") && root.contains("tool")) {
    root = root.at("config");
  }

  ExperimentConfig c;
  ObjectReader r(root, "config");
  r.read("grid_side", c.grid_side);
  r.read("n_vehicles", c.mobility.n_vehicles);
  r.read("test_frac", c.test_frac);
  r.read("rounds", c.rounds);
  r.read("seeds", c.seeds);
  if (const json* d = r.child("dataset")) read_dataset(*d, c.dataset, base_dir);
  if (const json* t = r.child("trainer")) read_trainer(*t, c.trainer);
  if (const json* a = r.child("ca")) read_ca(*a, c.ca);
  if (const json* m = r.child("mobility")) read_mobility(*m, c.mobility);
  if (const json* l = r.child("latency")) read_latency(*l, c.latency);
  if (const json* t = r.child("timing")) read_timing(*t, c);
  if (const json* s = r.child("strategies")) {
    if (!s->is_array()) throw ConfigError("strategies must be an array");
    c.strategies.clear();
    for (const json& name : *s) {
      if (!name.is_string()) throw ConfigError("strategies[] must be strings");
      c.strategies.push_back(parse_strategy(name.get<std::string>()));
    }
  }
  std::string output_dir = c.output_dir.string();
  r.read("output_dir", output_dir);
  c.output_dir = output_dir;
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["grid_side"] = c.grid_side;
  j["n_vehicles"] = c.mobility.n_vehicles;
  j["test_frac"] = c.test_frac;
  j["rounds"] = c.rounds;
  j["seeds"] = c.seeds;

  json d;
  d["kind"] = c.dataset.kind == DatasetSpec::Kind::kSynthetic ? "synthetic"
                                                              : "mnist_idx";
  d["n_classes"] = c.dataset.n_classes;
  d["seed"] = c.dataset.seed;
  if (c.dataset.kind == DatasetSpec::Kind::kSynthetic) {
    d["n_samples"] = c.dataset.n_samples;
    d["n_features"] = c.dataset.n_features;
    d["mean_spread"] = c.dataset.mean_spread;
  } else {
    d["files"] = json::array();
    for (const IdxPair& p : c.dataset.files) {
      d["files"].push_back(
          {{"images", p.images.string()}, {"labels", p.labels.string()}});
    }
  }
  j["dataset"] = d;

  j["trainer"] = {{"kind", std::string(to_string(c.trainer.kind))},
                  {"hidden_units", c.trainer.hidden_units},
                  {"learning_rate", c.trainer.adam.learning_rate},
                  {"beta1", c.trainer.adam.beta1},
                  {"beta2", c.trainer.adam.beta2},
                  {"epsilon", c.trainer.adam.epsilon},
                  {"local_epochs", c.trainer.local_epochs},
                  {"batch_size", c.trainer.batch_size}};
  j["ca"] = {{"freshness_weight", c.ca.freshness_weight},
             {"staleness_weight", c.ca.staleness_weight},
             {"balance_weight", c.ca.balance_weight},
             {"von_neumann_weight", c.ca.von_neumann_weight},
             {"diagonal_weight", c.ca.diagonal_weight},
             {"select_fraction", c.ca.select_fraction},
             {"dq_floor", c.ca.dq_floor},
             {"tc_floor", c.ca.tc_floor}};
  j["mobility"] = {{"move_fraction", c.mobility.move_fraction},
                   {"arrival_shard_size", c.mobility.arrival_shard_size},
                   {"initial_fraction", c.mobility.initial_fraction}};
  j["latency"] = {{"straggler_fraction", c.latency.straggler_fraction},
                  {"penalty_seconds", c.latency.penalty_seconds},
                  {"penalty_mode", std::string(to_string(c.latency.mode))}};
  j["timing"] = {{"mode", std::string(to_string(c.timing))},
                 {"seconds_per_sample", c.seconds_per_sample}};
  j["strategies"] = json::array();
  for (StrategyKind s : c.strategies) j["strategies"].push_back(std::string(to_string(s)));
  j["output_dir"] = c.output_dir.string();
  return j.dump(2);
}

namespace {

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : text) {
    if (ch == ',') {
      out.push_back(item);
      item.clear();
    } else if (ch != ' ') {
      item.push_back(ch);
    }
  }
  out.push_back(item);
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& item : split_commas(text)) {
    if (item.empty() ||
        !std::all_of(item.begin(), item.end(),
                     [](char ch) { return ch >= '0' && ch <= '9'; })) {
      throw ConfigError("invalid seed '" + item + "'");
    }
    try {
      seeds.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError("seed out of range '" + item + "'");
    }
  }
  return seeds;
}

std::vector<StrategyKind> parse_strategy_list(std::string_view text) {
  std::vector<StrategyKind> out;
  for (const std::string& item : split_commas(text)) {
    out.push_back(parse_strategy(item));
  }
  return out;
}

}  // namespace cafl
