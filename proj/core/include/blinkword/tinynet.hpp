#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blinkword/classifier.hpp"
#include "blinkword/dataset.hpp"

namespace blinkword {

// Two-layer network: x (pixels / 255) -> ReLU(W1 x + b1) -> W2 h + b2 ->
// softmax over {Open, Closed}.
//
// All parameters live in one flat vector laid out as [W1 | b1 | W2 | b2],
// matrices row-major. A hidden width of zero is the "bypass" topology used as
// a convex reference: logits = W2 x + b2 with W2 of shape 2 x input_dim.
class TinyNet final : public Classifier {
 public:
  static constexpr std::size_t kInputDim = kFramePixels;
  static constexpr std::size_t kOutputDim = 2;

  // Zero-initialised network.
  explicit TinyNet(std::size_t hidden_dim);

  // He-style normal initialisation drawn from a generator seeded with `seed`.
  static TinyNet random(std::size_t hidden_dim, std::uint64_t seed);
  // Softmax regression; hidden layer bypassed.
  static TinyNet bypass();

  double classify(const Frame& frame) const override;
  std::string name() const override;

  // Softmax output for an already-scaled input of length kInputDim.
  std::array<double, 2> forward(std::span<const double> x) const;

  std::size_t hidden_dim() const noexcept { return hidden_dim_; }
  bool is_bypass() const noexcept { return hidden_dim_ == 0; }
  // Width of the layer feeding W2: hidden_dim, or kInputDim in bypass mode.
  std::size_t feature_dim() const noexcept {
    return is_bypass() ? kInputDim : hidden_dim_;
  }

  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  std::span<double> w1() noexcept;
  std::span<const double> w1() const noexcept;
  std::span<double> b1() noexcept;
  std::span<const double> b1() const noexcept;
  std::span<double> w2() noexcept;
  std::span<const double> w2() const noexcept;
  std::span<double> b2() noexcept;
  std::span<const double> b2() const noexcept;

  std::size_t w1_offset() const noexcept { return 0; }
  std::size_t b1_offset() const noexcept { return hidden_dim_ * kInputDim; }
  std::size_t w2_offset() const noexcept { return b1_offset() + hidden_dim_; }
  std::size_t b2_offset() const noexcept {
    return w2_offset() + kOutputDim * feature_dim();
  }

  bool all_finite() const noexcept;

  bool operator==(const TinyNet& other) const {
    return hidden_dim_ == other.hidden_dim_ && params_ == other.params_;
  }

 private:
  std::size_t hidden_dim_;
  std::vector<double> params_;
};

// Pixels scaled to [0, 1].
std::vector<double> scale_pixels(const Frame& frame);

// Mean cross-entropy of `net` on `batch`; when `gradient` is non-null it is
// resized to parameter_count() and filled with d(loss)/d(params). `correct`,
// if given, receives how many frames the current weights already classify
// correctly.
double loss_and_gradient(const TinyNet& net, std::span<const LabeledFrame> batch,
                         std::vector<double>* gradient, std::size_t* correct = nullptr);

// Copies the overlapping part of `source` into a network of width
// `target_hidden_dim`; the rest is drawn from a generator seeded with `seed`.
TinyNet init_from_model(const TinyNet& source, std::size_t target_hidden_dim,
                        std::uint64_t seed);

}  // namespace blinkword
