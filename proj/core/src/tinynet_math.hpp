#pragma once

// Batch math behind loss_and_gradient, on pre-scaled column-major inputs.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "blinkword/dataset.hpp"
#include "blinkword/tinynet.hpp"

namespace blinkword::detail {

// Columns are frames scaled to [0, 1].
Eigen::MatrixXd scaled_matrix(std::span<const LabeledFrame> set);

// labels[j] is 1 for Closed.
double batch_loss(const TinyNet& net, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  std::span<const int> labels, std::vector<double>* gradient,
                  std::size_t* correct);

}  // namespace blinkword::detail
