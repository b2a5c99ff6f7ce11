//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_NN_DENSE_HPP
#define KGMOL_NN_DENSE_HPP

#include <vector>

#include "kgmol/nn/tensor.hpp"

namespace kgmol::nn {

enum class Activation { Identity, Relu, LeakyRelu, Tanh };

/// Default negative slope for LeakyRelu.
inline constexpr double kLeakySlope = 0.2;

double apply_activation(Activation act, double z, double slope = kLeakySlope);
double activation_derivative(Activation act, double z,
                             double slope = kLeakySlope);

/// Inputs cached by dense_forward for the backward pass.
struct DenseCache {
  Tensor2 x;
  Tensor2 z;  // pre-activation xW + b
  Activation act = Activation::Identity;
  double slope = kLeakySlope;
};

/// act(xW + b); b is broadcast over rows, may be empty for no bias.
/// Throws InternalError on shape mismatch or non-finite output.
Tensor2 dense_forward(const Tensor2 &x, const Tensor2 &w,
                      const std::vector<double> &b, Activation act,
                      DenseCache *cache = nullptr, double slope = kLeakySlope);

struct DenseGrads {
  Tensor2 dx;
  Tensor2 dw;
  std::vector<double> db;
};

DenseGrads dense_backward(const DenseCache &cache, const Tensor2 &w,
                          const Tensor2 &dy);

}  // namespace kgmol::nn

#endif  // KGMOL_NN_DENSE_HPP
