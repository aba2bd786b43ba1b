#include "blinkword/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "blinkword/errors.hpp"

namespace blinkword {
namespace {

// Forward pass state for one batch, computed with plain loops so the
// finite-difference side shares no code with loss_and_gradient.
struct Activations {
  std::size_t n = 0;
  std::vector<std::vector<double>> inputs;    // n x D
  std::vector<std::vector<double>> pre;       // n x H
  std::vector<std::vector<double>> features;  // n x K
  std::vector<std::array<double, 2>> logits;  // n x 2
  std::vector<int> labels;
};

Activations forward_loops(const TinyNet& net, std::span<const LabeledFrame> batch) {
  const std::size_t d = TinyNet::kInputDim;
  const std::size_t h = net.hidden_dim();
  const std::size_t k = net.feature_dim();
  Activations a;
  a.n = batch.size();
  for (const auto& item : batch) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = item.frame.pixels()[i] / 255.0;
    std::vector<double> z(h);
    std::vector<double> feat;
    if (net.is_bypass()) {
      feat = x;
    } else {
      feat.resize(h);
      for (std::size_t u = 0; u < h; ++u) {
        double s = net.b1()[u];
        for (std::size_t i = 0; i < d; ++i) s += net.w1()[u * d + i] * x[i];
        z[u] = s;
        feat[u] = std::max(0.0, s);
      }
    }
    std::array<double, 2> out{};
    for (std::size_t c = 0; c < 2; ++c) {
      double s = net.b2()[c];
      for (std::size_t u = 0; u < k; ++u) s += net.w2()[c * k + u] * feat[u];
      out[c] = s;
    }
    a.inputs.push_back(std::move(x));
    a.pre.push_back(std::move(z));
    a.features.push_back(std::move(feat));
    a.logits.push_back(out);
    a.labels.push_back(item.label == EyeState::kClosed ? 1 : 0);
  }
  return a;
}

// Change in one sample's cross-entropy when its logits move by `delta`,
// written as log1p/expm1 of the offsets so the difference is not lost to
// cancellation against the full loss.
double loss_change(const std::array<double, 2>& logits, int label,
                   const std::array<double, 2>& delta) {
  const double top = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - top);
  const double e1 = std::exp(logits[1] - top);
  const double sum = e0 + e1;
  const double moved = (e0 / sum) * std::expm1(delta[0]) + (e1 / sum) * std::expm1(delta[1]);
  return std::log1p(moved) - delta[static_cast<std::size_t>(label)];
}

// relu(z + dz) - relu(z), exact on either side of the kink.
double relu_step(double z, double dz) {
  if (z > 0.0 && z + dz > 0.0) return dz;
  if (z <= 0.0 && z + dz <= 0.0) return 0.0;
  return std::max(0.0, z + dz) - std::max(0.0, z);
}

}  // namespace

GradientCheckResult gradient_check(const TinyNet& model, std::span<const LabeledFrame> batch,
                                   double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("finite-difference epsilon must be positive");
  if (batch.empty()) throw ArgumentError("gradient check needs a non-empty batch");

  std::vector<double> analytic;
  loss_and_gradient(model, batch, &analytic);
  const Activations act = forward_loops(model, batch);

  const std::size_t d = TinyNet::kInputDim;
  const std::size_t h = model.hidden_dim();
  const std::size_t k = model.feature_dim();

  GradientCheckResult result;
  auto record = [&](std::size_t param, double numeric) {
    const double a = analytic[param];
    const double scale = std::max(std::abs(a), std::abs(numeric));
    const double rel = scale < kGradientFloor ? 0.0 : std::abs(a - numeric) / scale;
    ++result.parameters_checked;
    if (rel > result.max_relative_error || result.parameters_checked == 1) {
      result.max_relative_error = std::max(result.max_relative_error, rel);
      result.worst_parameter = param;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  };
  // (L(p + e) - L(p - e)) / 2e, with `offset(j, e)` giving sample j's logit shift.
  auto central = [&](const std::function<std::array<double, 2>(std::size_t, double)>& offset) {
    double total = 0.0;
    for (std::size_t j = 0; j < act.n; ++j) {
      total += loss_change(act.logits[j], act.labels[j], offset(j, epsilon)) -
               loss_change(act.logits[j], act.labels[j], offset(j, -epsilon));
    }
    return total / static_cast<double>(act.n) / (2.0 * epsilon);
  };

  // Hidden-layer parameters: a change in W1[u, i] or b1[u] moves only
  // pre-activation u, which reaches the logits through column u of W2.
  for (std::size_t u = 0; u < h; ++u) {
    auto via_unit = [&](std::size_t j, double dz) {
      const double step = relu_step(act.pre[j][u], dz);
      return std::array<double, 2>{model.w2()[u] * step, model.w2()[k + u] * step};
    };
    for (std::size_t i = 0; i < d; ++i) {
      record(model.w1_offset() + u * d + i, central([&](std::size_t j, double e) {
               return via_unit(j, e * act.inputs[j][i]);
             }));
    }
    record(model.b1_offset() + u,
           central([&](std::size_t j, double e) { return via_unit(j, e); }));
  }

  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t u = 0; u < k; ++u) {
      record(model.w2_offset() + c * k + u, central([&](std::size_t j, double e) {
               std::array<double, 2> out{};
               out[c] = e * act.features[j][u];
               return out;
             }));
    }
    record(model.b2_offset() + c, central([&](std::size_t, double e) {
             std::array<double, 2> out{};
             out[c] = e;
             return out;
           }));
  }
  return result;
}

}  // namespace blinkword
