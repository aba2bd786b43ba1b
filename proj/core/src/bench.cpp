#include "blinkword/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "blinkword/errors.hpp"
#include "json_codec.hpp"

namespace blinkword {
namespace {

using codec::json;

void check_candidate(const ModelCandidate& c) {
  if (!(c.accuracy >= 0.0 && c.accuracy <= 1.0)) {
    throw ArgumentError("candidate " + c.name + ": accuracy must lie in [0, 1]");
  }
  if (!(c.avg_latency_ms > 0.0) || !std::isfinite(c.avg_latency_ms)) {
    throw ArgumentError("candidate " + c.name + ": latency must be positive");
  }
}

// Strict preference order used by select_model.
bool better(const ModelCandidate& a, const ModelCandidate& b) {
  if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
  if (a.avg_latency_ms != b.avg_latency_ms) return a.avg_latency_ms < b.avg_latency_ms;
  return a.name < b.name;
}

std::string format_budget(double budget_ms) {
  if (std::isinf(budget_ms)) return "unbounded";
  std::ostringstream out;
  out << budget_ms << " ms";
  return out.str();
}

// 23591810 -> "23,591,810"
std::string group_digits(std::uint64_t n) {
  std::string digits = std::to_string(n);
  for (auto i = static_cast<std::ptrdiff_t>(digits.size()) - 3; i > 0; i -= 3) {
    digits.insert(static_cast<std::size_t>(i), ",");
  }
  return digits;
}

}  // namespace

ModelCandidate select_model(std::span<const ModelCandidate> candidates, double budget_ms) {
  if (candidates.empty()) throw ArgumentError("select_model needs at least one candidate");
  if (!(budget_ms > 0.0)) throw ArgumentError("latency budget must be positive");
  const ModelCandidate* best = nullptr;
  const ModelCandidate* fastest = nullptr;
  for (const auto& c : candidates) {
    check_candidate(c);
    if (!fastest || c.avg_latency_ms < fastest->avg_latency_ms) fastest = &c;
    if (c.avg_latency_ms > budget_ms) continue;
    if (!best || better(c, *best)) best = &c;
  }
  if (!best) {
    std::ostringstream msg;
    msg << "no candidate meets the " << format_budget(budget_ms)
        << " latency budget; the fastest is " << fastest->name << " at "
        << fastest->avg_latency_ms << " ms";
    throw InfeasibleError(msg.str(), fastest->avg_latency_ms);
  }
  return *best;
}

BenchReport make_bench_report(std::vector<ModelCandidate> candidates, double budget_ms) {
  BenchReport report;
  report.selected = select_model(candidates, budget_ms);
  report.candidates = std::move(candidates);
  report.budget_ms = budget_ms;
  return report;
}

std::vector<ModelCandidate> parse_candidates(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed candidate file: ") + e.what(), e.byte);
  }
  std::vector<ModelCandidate> out;
  try {
    for (const auto& row : doc.at("candidates")) {
      ModelCandidate c;
      c.name = row.at("name").get<std::string>();
      c.accuracy = row.at("accuracy").get<double>();
      c.avg_latency_ms = row.at("avg_latency_ms").get<double>();
      c.total_params = row.at("total_params").get<std::uint64_t>();
      if (row.contains("model_size_bytes")) {
        c.model_size_bytes = row.at("model_size_bytes").get<std::uint64_t>();
      }
      check_candidate(c);
      out.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("invalid candidate file: ") + e.what());
  }
  return out;
}

std::vector<ModelCandidate> load_candidates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open candidate file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_candidates(buffer.str());
}

std::string render_table(const BenchReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %12s %10s %14s %12s\n", "Model", "Total params",
                "Accuracy", "Avg latency", "Within T");
  out << line;
  for (const auto& c : report.candidates) {
    std::snprintf(line, sizeof line, "%-14s %12s %9.2f%% %11.2f ms %12s\n", c.name.c_str(),
                  group_digits(c.total_params).c_str(), c.accuracy * 100.0,
                  c.avg_latency_ms, c.avg_latency_ms <= report.budget_ms ? "yes" : "no");
    out << line;
  }
  out << "T = " << format_budget(report.budget_ms) << "; selected: " << report.selected.name
      << "\n";
  return out.str();
}

std::string bench_report_json(const BenchReport& report) {
  auto encode = [](const ModelCandidate& c) {
    json j = {{"name", c.name},
              {"accuracy", c.accuracy},
              {"avg_latency_ms", c.avg_latency_ms},
              {"total_params", c.total_params}};
    if (c.model_size_bytes) j["model_size_bytes"] = *c.model_size_bytes;
    return j;
  };
  json rows = json::array();
  for (const auto& c : report.candidates) rows.push_back(encode(c));
  json doc = {{"candidates", std::move(rows)},
              {"selected", encode(report.selected)},
              {"budget_ms", std::isinf(report.budget_ms) ? json(nullptr) : json(report.budget_ms)}};
  return doc.dump(2) + "\n";
}

EvalResult evaluate(const Classifier& classifier, std::span<const LabeledFrame> test_set,
                    const MeasureOptions& options) {
  if (test_set.empty()) throw ArgumentError("evaluation needs a non-empty test set");
  EvalResult result;
  result.accuracy = accuracy(classifier, test_set);
  std::vector<Frame> frames;
  frames.reserve(test_set.size());
  for (const auto& item : test_set) frames.push_back(item.frame);
  result.latency = measure_latency(classifier, frames, options);
  return result;
}

std::vector<SweepRow> sweep(std::span<const std::size_t> batch_sizes,
                            std::span<const LabeledFrame> training,
                            std::span<const LabeledFrame> validation, const TrainConfig& base) {
  if (batch_sizes.empty()) throw ArgumentError("sweep needs at least one batch size");
  std::vector<SweepRow> rows;
  for (const std::size_t batch : batch_sizes) {
    TrainConfig config = base;
    config.batch_size = batch;
    const auto result = train(training, validation, config);
    rows.push_back({batch, result.report.best_validation_accuracy, result.report.epoch_of_best});
  }
  return rows;
}

std::string render_sweep(std::span<const SweepRow> rows) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof line, "%-10s %10s %10s\n", "Batch S.", "Acc. (%)", "Ep. imp.");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10zu %10.2f %10zu\n", r.batch_size, r.accuracy * 100.0,
                  r.epoch_of_best);
    out << line;
  }
  return out.str();
}

}  // namespace blinkword
