#include "cafl/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>

#include "cafl/config.hpp"
#include "cafl/errors.hpp"
#include "json.hpp"

#ifndef CAFL_VERSION_STRING
#define CAFL_VERSION_STRING "unknown"
#endif

namespace cafl {

std::string version_string() { return std::string("cafl ") + CAFL_VERSION_STRING; }

std::string format_float(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::vector<SeedTotals> seed_totals(std::span<const RoundRow> rows) {
  std::vector<SeedTotals> out;
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> slot;
  for (const RoundRow& row : rows) {
    const auto key = std::make_pair(row.strategy, row.seed);
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, out.size()).first;
      SeedTotals fresh;
      fresh.strategy = row.strategy;
      fresh.seed = row.seed;
      out.push_back(fresh);
    }
    SeedTotals& t = out[it->second];
    t.total_seconds += row.total_s;
    t.stragglers_selected += row.n_stragglers_selected;
    if (row.round >= t.final_round) {
      t.final_round = row.round;
      t.final_accuracy = row.accuracy;
      t.final_macro_f1 = row.macro_f1;
    }
  }
  return out;
}

namespace {

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const RoundRow> rows) {
  const std::vector<SeedTotals> totals = seed_totals(rows);
  std::vector<std::string> order;
  for (const SeedTotals& t : totals) {
    if (std::find(order.begin(), order.end(), t.strategy) == order.end()) {
      order.push_back(t.strategy);
    }
  }
  std::vector<SummaryRow> out;
  for (const std::string& strategy : order) {
    std::vector<double> acc, f1, secs, stragglers;
    for (const SeedTotals& t : totals) {
      if (t.strategy != strategy) continue;
      acc.push_back(t.final_accuracy);
      f1.push_back(t.final_macro_f1);
      secs.push_back(t.total_seconds);
      stragglers.push_back(static_cast<double>(t.stragglers_selected));
    }
    SummaryRow row;
    row.strategy = strategy;
    row.n_seeds = acc.size();
    row.final_accuracy = mean_std(acc);
    row.final_macro_f1 = mean_std(f1);
    row.total_seconds = mean_std(secs);
    row.stragglers_selected = mean_std(stragglers);
    out.push_back(row);
  }
  return out;
}

void write_rounds_csv(std::ostream& out, std::span<const RoundRow> rows) {
  out << kRoundsHeader << '\n';
  for (const RoundRow& r : rows) {
    out << r.strategy << ',' << r.seed << ',' << r.round << ',' << r.n_selected
        << ',' << r.n_stragglers_selected << ',' << format_float(r.penalty_s)
        << ',' << format_float(r.train_s) << ',' << format_float(r.total_s)
        << ',' << format_float(r.accuracy) << ',' << format_float(r.macro_f1)
        << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    out << r.strategy << ',' << r.n_seeds << ','
        << format_float(r.final_accuracy.mean) << ','
        << format_float(r.final_accuracy.std) << ','
        << format_float(r.final_macro_f1.mean) << ','
        << format_float(r.final_macro_f1.std) << ','
        << format_float(r.total_seconds.mean) << ','
        << format_float(r.total_seconds.std) << ','
        << format_float(r.stragglers_selected.mean) << ','
        << format_float(r.stragglers_selected.std) << '\n';
  }
}

std::vector<RoundRow> read_rounds_csv(std::istream& in) {
  std::vector<RoundRow> rows;
  std::string line;
  if (!std::getline(in, line)) throw DataError("rounds.csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRoundsHeader) {
    throw DataError("rounds.csv: unexpected header '" + line + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 10) {
      throw DataError("rounds.csv line " + std::to_string(line_no) + ": expected 10 fields, got " +
                      std::to_string(fields.size()));
    }
    try {
      RoundRow r;
      r.strategy = fields[0];
      r.seed = std::stoull(fields[1]);
      r.round = std::stoi(fields[2]);
      r.n_selected = std::stoull(fields[3]);
      r.n_stragglers_selected = std::stoull(fields[4]);
      r.penalty_s = std::stod(fields[5]);
      r.train_s = std::stod(fields[6]);
      r.total_s = std::stod(fields[7]);
      r.accuracy = std::stod(fields[8]);
      r.macro_f1 = std::stod(fields[9]);
      rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw DataError("rounds.csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<RoundRow> read_rounds_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  return read_rounds_csv(in);
}

std::string manifest_json(const ExperimentConfig& config, std::size_t n_records) {
  nlohmann::json j;
  j["tool"] = "cafl";
  j["version"] = version_string();
  j["config"] = nlohmann::json::parse(config_to_json(config));
  j["seeds"] = config.seeds;
  j["records"] = n_records;
  j["files"] = {"rounds.csv", "summary.csv"};
  return j.dump(2);
}

namespace {

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw OutputError("write failed for " + path.string());
}

}  // namespace

void export_results(std::span<const RoundRow> rows,
                    std::span<const SummaryRow> summary,
                    const ExperimentConfig& config,
                    const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OutputError("cannot create output directory " + dir.string() +
                      (ec ? ": " + ec.message() : std::string()));
  }
  write_file(dir / "rounds.csv",
             [&](std::ostream& out) { write_rounds_csv(out, rows); });
  write_file(dir / "summary.csv",
             [&](std::ostream& out) { write_summary_csv(out, summary); });
  write_file(dir / "manifest.json", [&](std::ostream& out) {
    out << manifest_json(config, rows.size()) << '\n';
  });
}

}  // namespace cafl
