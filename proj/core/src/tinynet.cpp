#include "blinkword/tinynet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "blinkword/errors.hpp"
#include "tinynet_math.hpp"

namespace blinkword {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

std::size_t parameter_count_for(std::size_t hidden_dim) {
  const std::size_t feature = hidden_dim == 0 ? TinyNet::kInputDim : hidden_dim;
  return hidden_dim * TinyNet::kInputDim + hidden_dim + TinyNet::kOutputDim * feature +
         TinyNet::kOutputDim;
}

void fill_normal(std::span<double> out, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (auto& v : out) v = dist(rng);
}

}  // namespace

TinyNet::TinyNet(std::size_t hidden_dim)
    : hidden_dim_(hidden_dim), params_(parameter_count_for(hidden_dim), 0.0) {}

TinyNet TinyNet::random(std::size_t hidden_dim, std::uint64_t seed) {
  TinyNet net(hidden_dim);
  std::mt19937_64 rng(seed);
  fill_normal(net.w1(), std::sqrt(2.0 / kInputDim), rng);
  fill_normal(net.w2(), std::sqrt(1.0 / static_cast<double>(net.feature_dim())), rng);
  return net;
}

TinyNet TinyNet::bypass() { return TinyNet(0); }

std::string TinyNet::name() const {
  return is_bypass() ? "tinynet-linear" : "tinynet-h" + std::to_string(hidden_dim_);
}

std::span<double> TinyNet::w1() noexcept {
  return std::span(params_).subspan(w1_offset(), b1_offset());
}
std::span<const double> TinyNet::w1() const noexcept {
  return std::span(params_).subspan(w1_offset(), b1_offset());
}
std::span<double> TinyNet::b1() noexcept {
  return std::span(params_).subspan(b1_offset(), hidden_dim_);
}
std::span<const double> TinyNet::b1() const noexcept {
  return std::span(params_).subspan(b1_offset(), hidden_dim_);
}
std::span<double> TinyNet::w2() noexcept {
  return std::span(params_).subspan(w2_offset(), kOutputDim * feature_dim());
}
std::span<const double> TinyNet::w2() const noexcept {
  return std::span(params_).subspan(w2_offset(), kOutputDim * feature_dim());
}
std::span<double> TinyNet::b2() noexcept {
  return std::span(params_).subspan(b2_offset(), kOutputDim);
}
std::span<const double> TinyNet::b2() const noexcept {
  return std::span(params_).subspan(b2_offset(), kOutputDim);
}

bool TinyNet::all_finite() const noexcept {
  return std::all_of(params_.begin(), params_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::vector<double> scale_pixels(const Frame& frame) {
  std::vector<double> x(kFramePixels);
  const auto px = frame.pixels();
  for (std::size_t i = 0; i < kFramePixels; ++i) x[i] = px[i] / 255.0;
  return x;
}

std::array<double, 2> TinyNet::forward(std::span<const double> x) const {
  if (x.size() != kInputDim) throw ArgumentError("input must have 5600 values");
  const ConstVecMap input(x.data(), static_cast<Eigen::Index>(x.size()));
  const auto k = static_cast<Eigen::Index>(feature_dim());
  const ConstRowMap w2m(w2().data(), kOutputDim, k);
  Eigen::Vector2d logits;
  if (is_bypass()) {
    logits = w2m * input;
  } else {
    const auto h = static_cast<Eigen::Index>(hidden_dim_);
    const ConstRowMap w1m(w1().data(), h, kInputDim);
    const Eigen::VectorXd hidden =
        (w1m * input + ConstVecMap(b1().data(), h)).cwiseMax(0.0);
    logits = w2m * hidden;
  }
  logits += Eigen::Vector2d(b2()[0], b2()[1]);
  const double top = logits.maxCoeff();
  const double e0 = std::exp(logits[0] - top);
  const double e1 = std::exp(logits[1] - top);
  const double z = e0 + e1;
  std::array<double, 2> p{e0 / z, e1 / z};
  if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
    throw NumericError("non-finite network output");
  }
  return p;
}

double TinyNet::classify(const Frame& frame) const {
  const auto x = scale_pixels(frame);
  return forward(x)[1];
}

namespace detail {

Eigen::MatrixXd scaled_matrix(std::span<const LabeledFrame> set) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(TinyNet::kInputDim),
                    static_cast<Eigen::Index>(set.size()));
  for (std::size_t j = 0; j < set.size(); ++j) {
    const auto px = set[j].frame.pixels();
    for (std::size_t i = 0; i < TinyNet::kInputDim; ++i) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = px[i] / 255.0;
    }
  }
  return x;
}

double batch_loss(const TinyNet& net, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  std::span<const int> labels, std::vector<double>* gradient,
                  std::size_t* correct) {
  const auto n = x.cols();
  if (n == 0) throw ArgumentError("loss needs a non-empty batch");
  const auto d = static_cast<Eigen::Index>(TinyNet::kInputDim);
  const auto k = static_cast<Eigen::Index>(net.feature_dim());
  const auto h = static_cast<Eigen::Index>(net.hidden_dim());

  Eigen::MatrixXd pre;
  Eigen::MatrixXd features;
  if (net.is_bypass()) {
    features = x;
  } else {
    pre = ConstRowMap(net.w1().data(), h, d) * x;
    pre.colwise() += ConstVecMap(net.b1().data(), h);
    features = pre.cwiseMax(0.0);
  }
  Eigen::MatrixXd logits = ConstRowMap(net.w2().data(), 2, k) * features;
  logits.colwise() += Eigen::Vector2d(net.b2()[0], net.b2()[1]);

  double loss = 0.0;
  std::size_t right = 0;
  Eigen::MatrixXd delta(2, n);  // d(loss)/d(logits)
  for (Eigen::Index j = 0; j < n; ++j) {
    const double top = logits.col(j).maxCoeff();
    const double lse = top + std::log(std::exp(logits(0, j) - top) + std::exp(logits(1, j) - top));
    const int y = labels[static_cast<std::size_t>(j)];
    loss -= logits(y, j) - lse;
    const int predicted = logits(1, j) >= logits(0, j) ? 1 : 0;
    if (predicted == y) ++right;
    for (int c = 0; c < 2; ++c) {
      delta(c, j) = (std::exp(logits(c, j) - lse) - (c == y ? 1.0 : 0.0)) / static_cast<double>(n);
    }
  }
  loss /= static_cast<double>(n);
  if (correct != nullptr) *correct = right;

  if (gradient != nullptr) {
    gradient->assign(net.parameter_count(), 0.0);
    double* g = gradient->data();
    RowMap(g + net.w2_offset(), 2, k) = delta * features.transpose();
    const Eigen::Vector2d gb2 = delta.rowwise().sum();
    g[net.b2_offset()] = gb2[0];
    g[net.b2_offset() + 1] = gb2[1];
    if (!net.is_bypass()) {
      Eigen::MatrixXd dpre = ConstRowMap(net.w2().data(), 2, k).transpose() * delta;
      dpre = dpre.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
      RowMap(g + net.w1_offset(), h, d) = dpre * x.transpose();
      Eigen::Map<Eigen::VectorXd>(g + net.b1_offset(), h) = dpre.rowwise().sum();
    }
  }
  return loss;
}

}  // namespace detail

double loss_and_gradient(const TinyNet& net, std::span<const LabeledFrame> batch,
                         std::vector<double>* gradient, std::size_t* correct) {
  if (batch.empty()) throw ArgumentError("loss needs a non-empty batch");
  std::vector<int> labels(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    labels[j] = batch[j].label == EyeState::kClosed ? 1 : 0;
  }
  return detail::batch_loss(net, detail::scaled_matrix(batch), labels, gradient, correct);
}

TinyNet init_from_model(const TinyNet& source, std::size_t target_hidden_dim,
                        std::uint64_t seed) {
  if (target_hidden_dim == 0) throw ArgumentError("target hidden width must be positive");
  if (target_hidden_dim == source.hidden_dim()) return source;

  TinyNet target = TinyNet::random(target_hidden_dim, seed);
  const std::size_t d = TinyNet::kInputDim;
  const std::size_t overlap = std::min(source.hidden_dim(), target_hidden_dim);
  for (std::size_t j = 0; j < overlap; ++j) {
    std::copy_n(source.w1().begin() + j * d, d, target.w1().begin() + j * d);
    target.b1()[j] = source.b1()[j];
    for (std::size_t c = 0; c < TinyNet::kOutputDim; ++c) {
      target.w2()[c * target_hidden_dim + j] = source.w2()[c * source.hidden_dim() + j];
    }
  }
  std::copy(source.b2().begin(), source.b2().end(), target.b2().begin());
  return target;
}

}  // namespace blinkword
