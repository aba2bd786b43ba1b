#include "blinkword/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "blinkword/errors.hpp"
#include "tinynet_math.hpp"

namespace blinkword {

double accuracy(const Classifier& classifier, std::span<const LabeledFrame> set,
                double threshold) {
  if (set.empty()) throw ArgumentError("accuracy of an empty set is undefined");
  std::size_t correct = 0;
  for (const auto& item : set) {
    if (decide(classifier.classify(item.frame), threshold) == item.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

std::pair<LabeledSet, LabeledSet> split(const LabeledSet& set, double training_fraction) {
  if (!(training_fraction > 0.0 && training_fraction < 1.0)) {
    throw ArgumentError("training fraction must lie in (0, 1)");
  }
  LabeledSet training;
  LabeledSet validation;
  for (EyeState label : {EyeState::kClosed, EyeState::kOpen}) {
    const std::size_t total = count_label(set, label);
    const auto cut = static_cast<std::size_t>(std::llround(training_fraction * total));
    std::size_t seen = 0;
    for (const auto& item : set) {
      if (item.label != label) continue;
      (seen++ < cut ? training : validation).push_back(item);
    }
  }
  return {std::move(training), std::move(validation)};
}

TrainResult train(std::span<const LabeledFrame> training,
                  std::span<const LabeledFrame> validation, const TrainConfig& config,
                  const std::optional<TinyNet>& init) {
  if (training.empty()) throw DataError("training set is empty");
  if (count_label(training, EyeState::kOpen) == 0 ||
      count_label(training, EyeState::kClosed) == 0) {
    throw DataError("training set must contain both Open and Closed frames");
  }
  if (config.batch_size == 0) throw ArgumentError("batch size must be positive");
  if (config.batch_size > training.size()) {
    throw DataError("batch size " + std::to_string(config.batch_size) +
                    " exceeds training set size " + std::to_string(training.size()));
  }
  if (config.epochs == 0) throw ArgumentError("epochs must be positive");
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    throw ArgumentError("learning rate must be a non-negative finite number");
  }
  if (init && init->hidden_dim() != config.hidden_dim) {
    throw ArgumentError("initial model has hidden width " + std::to_string(init->hidden_dim()) +
                        ", config expects " + std::to_string(config.hidden_dim));
  }
  if (init && !init->all_finite()) throw NumericError("initial model has non-finite weights");

  std::mt19937_64 rng(config.seed);
  // The init draw always consumes the stream so shuffles match with and
  // without a supplied model.
  TinyNet model = TinyNet::random(config.hidden_dim, rng());
  if (init) model = *init;

  TrainReport report;
  TinyNet best = model;
  double best_accuracy = -1.0;
  std::size_t since_best = 0;

  std::vector<std::size_t> order(training.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Eigen::MatrixXd inputs = detail::scaled_matrix(training);
  std::vector<int> labels(training.size());
  for (std::size_t j = 0; j < training.size(); ++j) {
    labels[j] = training[j].label == EyeState::kClosed ? 1 : 0;
  }
  Eigen::MatrixXd batch_inputs(inputs.rows(), static_cast<Eigen::Index>(config.batch_size));
  std::vector<int> batch_labels;
  std::vector<double> gradient;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const auto width = static_cast<Eigen::Index>(stop - start);
      batch_labels.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch_inputs.col(static_cast<Eigen::Index>(i - start)) =
            inputs.col(static_cast<Eigen::Index>(order[i]));
        batch_labels.push_back(labels[order[i]]);
      }
      std::size_t correct = 0;
      const double loss = detail::batch_loss(model, batch_inputs.leftCols(width), batch_labels,
                                             &gradient, &correct);
      if (!std::isfinite(loss)) {
        throw NumericError("training diverged: non-finite loss in epoch " +
                           std::to_string(epoch));
      }
      loss_sum += loss * static_cast<double>(width);
      correct_sum += correct;
      auto params = model.parameters();
      for (std::size_t p = 0; p < params.size(); ++p) {
        params[p] -= config.learning_rate * gradient[p];
      }
    }
    if (!model.all_finite()) {
      throw NumericError("training diverged: non-finite weights after epoch " +
                         std::to_string(epoch));
    }

    EpochMetrics metrics;
    metrics.train_loss = loss_sum / static_cast<double>(training.size());
    metrics.train_accuracy =
        static_cast<double>(correct_sum) / static_cast<double>(training.size());
    metrics.validation_accuracy =
        validation.empty() ? accuracy(model, training) : accuracy(model, validation);
    report.epochs.push_back(metrics);

    if (metrics.validation_accuracy > best_accuracy) {
      best_accuracy = metrics.validation_accuracy;
      report.epoch_of_best = epoch;
      best = model;
      since_best = 0;
    } else if (config.early_stop_patience > 0 && ++since_best >= config.early_stop_patience) {
      break;
    }
  }

  report.best_validation_accuracy = best_accuracy;
  report.final_validation_accuracy = report.epochs.back().validation_accuracy;
  return {std::move(best), std::move(report)};
}

}  // namespace blinkword
