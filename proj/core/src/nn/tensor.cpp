//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/nn/tensor.hpp"

#include <cmath>

#include "kgmol/errors.hpp"

namespace kgmol::nn {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw InternalError("Tensor2: data length does not match shape");
}

void Tensor2::fill(double v) {
  for (auto &x : data_) x = v;
}

Tensor2 matmul(const Tensor2 &a, const Tensor2 &b) {
  if (a.cols() != b.rows()) throw InternalError("matmul: shape mismatch");
  Tensor2 c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Tensor2 matmul_nt(const Tensor2 &a, const Tensor2 &b) {
  if (a.cols() != b.cols()) throw InternalError("matmul_nt: shape mismatch");
  Tensor2 c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      c(i, j) = s;
    }
  return c;
}

Tensor2 matmul_tn(const Tensor2 &a, const Tensor2 &b) {
  if (a.rows() != b.rows()) throw InternalError("matmul_tn: shape mismatch");
  Tensor2 c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k)
    for (std::size_t i = 0; i < a.cols(); ++i) {
      double aki = a(k, i);
      if (aki == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
    }
  return c;
}

void add_inplace(Tensor2 &a, const Tensor2 &b) {
  if (!a.same_shape(b)) throw InternalError("add_inplace: shape mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += b.data()[i];
}

void axpy_inplace(Tensor2 &a, double s, const Tensor2 &b) {
  if (!a.same_shape(b)) throw InternalError("axpy_inplace: shape mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += s * b.data()[i];
}

void check_finite(const Tensor2 &t, const std::string &op) {
  check_finite(t.data(), op);
}

void check_finite(const std::vector<double> &v, const std::string &op) {
  for (double x : v)
    if (!std::isfinite(x))
      throw InternalError("non-finite value produced by " + op);
}

Tensor2 xavier_uniform(std::size_t rows, std::size_t cols, Rng &rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor2 t(rows, cols);
  for (auto &x : t.data()) x = rng.uniform(-limit, limit);
  return t;
}

double dot(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() != b.size()) throw InternalError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(const std::vector<double> &v) {
  return std::sqrt(dot(v, v));
}

}  // namespace kgmol::nn
