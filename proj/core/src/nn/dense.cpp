//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/nn/dense.hpp"

#include <cmath>

#include "kgmol/errors.hpp"

namespace kgmol::nn {

double apply_activation(Activation act, double z, double slope) {
  switch (act) {
    case Activation::Identity:
      return z;
    case Activation::Relu:
      return z > 0.0 ? z : 0.0;
    case Activation::LeakyRelu:
      return z > 0.0 ? z : slope * z;
    case Activation::Tanh:
      return std::tanh(z);
  }
  throw InternalError("apply_activation: unknown activation");
}

double activation_derivative(Activation act, double z, double slope) {
  switch (act) {
    case Activation::Identity:
      return 1.0;
    case Activation::Relu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::LeakyRelu:
      return z > 0.0 ? 1.0 : slope;
    case Activation::Tanh: {
      double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  throw InternalError("activation_derivative: unknown activation");
}

Tensor2 dense_forward(const Tensor2 &x, const Tensor2 &w,
                      const std::vector<double> &b, Activation act,
                      DenseCache *cache, double slope) {
  if (x.cols() != w.rows())
    throw InternalError("dense_forward: input/weight shape mismatch");
  if (!b.empty() && b.size() != w.cols())
    throw InternalError("dense_forward: bias length mismatch");

  Tensor2 z = matmul(x, w);
  if (!b.empty())
    for (std::size_t i = 0; i < z.rows(); ++i)
      for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += b[j];

  Tensor2 y(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.size(); ++i)
    y.data()[i] = apply_activation(act, z.data()[i], slope);
  check_finite(y, "dense_forward");

  if (cache) {
    cache->x = x;
    cache->z = std::move(z);
    cache->act = act;
    cache->slope = slope;
  }
  return y;
}

DenseGrads dense_backward(const DenseCache &cache, const Tensor2 &w,
                          const Tensor2 &dy) {
  if (!dy.same_shape(cache.z))
    throw InternalError("dense_backward: upstream gradient shape mismatch");

  Tensor2 dz(dy.rows(), dy.cols());
  for (std::size_t i = 0; i < dy.size(); ++i)
    dz.data()[i] =
        dy.data()[i] *
        activation_derivative(cache.act, cache.z.data()[i], cache.slope);

  DenseGrads g;
  g.dx = matmul_nt(dz, w);
  g.dw = matmul_tn(cache.x, dz);
  g.db.assign(dz.cols(), 0.0);
  for (std::size_t i = 0; i < dz.rows(); ++i)
    for (std::size_t j = 0; j < dz.cols(); ++j) g.db[j] += dz(i, j);
  return g;
}

}  // namespace kgmol::nn
