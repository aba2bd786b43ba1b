#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blinkword/classifier.hpp"
#include "blinkword/dataset.hpp"
#include "blinkword/latency.hpp"
#include "blinkword/train.hpp"

namespace blinkword {

struct ModelCandidate {
  std::string name;
  double accuracy = 0.0;  // fraction in [0, 1]
  double avg_latency_ms = 0.0;
  std::uint64_t total_params = 0;
  std::optional<std::uint64_t> model_size_bytes;

  bool operator==(const ModelCandidate&) const = default;
};

inline constexpr double kUnboundedLatency = std::numeric_limits<double>::infinity();

// Highest accuracy among candidates with avg_latency_ms <= budget_ms; ties go
// to the lower latency, then the lexicographically smaller name. Throws
// InfeasibleError when nothing fits and ArgumentError on an empty list or a
// non-positive budget.
ModelCandidate select_model(std::span<const ModelCandidate> candidates, double budget_ms);

struct BenchReport {
  std::vector<ModelCandidate> candidates;
  ModelCandidate selected;
  double budget_ms = kUnboundedLatency;
};

BenchReport make_bench_report(std::vector<ModelCandidate> candidates, double budget_ms);

// {"candidates": [{"name", "accuracy", "avg_latency_ms", "total_params",
//  "model_size_bytes"?}, ...]}
std::vector<ModelCandidate> parse_candidates(const std::string& text);
std::vector<ModelCandidate> load_candidates(const std::filesystem::path& path);

std::string render_table(const BenchReport& report);
std::string bench_report_json(const BenchReport& report);

struct EvalResult {
  double accuracy = 0.0;
  LatencyStats latency;
};

EvalResult evaluate(const Classifier& classifier, std::span<const LabeledFrame> test_set,
                    const MeasureOptions& options = {});

struct SweepRow {
  std::size_t batch_size = 0;
  double accuracy = 0.0;  // best validation accuracy
  std::size_t epoch_of_best = 0;
};

// One training run per batch size, all sharing base.seed.
std::vector<SweepRow> sweep(std::span<const std::size_t> batch_sizes,
                            std::span<const LabeledFrame> training,
                            std::span<const LabeledFrame> validation,
                            const TrainConfig& base);

std::string render_sweep(std::span<const SweepRow> rows);

}  // namespace blinkword
