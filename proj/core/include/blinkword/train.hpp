#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "blinkword/dataset.hpp"
#include "blinkword/tinynet.hpp"

namespace blinkword {

struct TrainConfig {
  std::size_t hidden_dim = 16;
  std::size_t batch_size = 16;
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  std::uint64_t seed = 42;
  // Epochs without validation improvement before stopping; 0 disables.
  std::size_t early_stop_patience = 0;
};

struct EpochMetrics {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;

  bool operator==(const EpochMetrics&) const = default;
};

struct TrainReport {
  std::vector<EpochMetrics> epochs;
  // 1-based epoch at which the best validation accuracy was first reached.
  std::size_t epoch_of_best = 0;
  double best_validation_accuracy = 0.0;
  double final_validation_accuracy = 0.0;

  bool operator==(const TrainReport&) const = default;
};

struct TrainResult {
  // Weights from epoch_of_best.
  TinyNet model;
  TrainReport report;
};

// Mini-batch gradient descent on mean cross-entropy. Shuffling and
// initialisation come from a generator seeded with config.seed, so equal
// inputs give bitwise-equal results. An empty validation set falls back to
// training accuracy for model selection.
TrainResult train(std::span<const LabeledFrame> training,
                  std::span<const LabeledFrame> validation,
                  const TrainConfig& config,
                  const std::optional<TinyNet>& init = std::nullopt);

// Fraction of `set` on which decide(classify(frame)) matches the label.
double accuracy(const Classifier& classifier, std::span<const LabeledFrame> set,
                double threshold = kDefaultDecisionThreshold);

// Deterministic train/validation split: the first `training_fraction` of each
// class goes to training.
std::pair<LabeledSet, LabeledSet> split(const LabeledSet& set, double training_fraction);

}  // namespace blinkword
