//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_NN_TENSOR_HPP
#define KGMOL_NN_TENSOR_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "kgmol/rng.hpp"

namespace kgmol::nn {

/// Dense row-major matrix of doubles. data.size() == rows*cols always.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double &operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::vector<double> &data() { return data_; }
  const std::vector<double> &data() const { return data_; }

  void fill(double v);
  bool same_shape(const Tensor2 &other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// C = A·B. Throws InternalError on shape mismatch.
Tensor2 matmul(const Tensor2 &a, const Tensor2 &b);
/// C = A·Bᵀ.
Tensor2 matmul_nt(const Tensor2 &a, const Tensor2 &b);
/// C = Aᵀ·B.
Tensor2 matmul_tn(const Tensor2 &a, const Tensor2 &b);

/// a += b elementwise (same shape required).
void add_inplace(Tensor2 &a, const Tensor2 &b);
/// a += s·b elementwise.
void axpy_inplace(Tensor2 &a, double s, const Tensor2 &b);

/// Throws InternalError naming `op` if any entry is NaN or infinite.
void check_finite(const Tensor2 &t, const std::string &op);
void check_finite(const std::vector<double> &v, const std::string &op);

/// Xavier-uniform init: entries uniform in ±sqrt(6/(fan_in+fan_out)).
Tensor2 xavier_uniform(std::size_t rows, std::size_t cols, Rng &rng);

double dot(const std::vector<double> &a, const std::vector<double> &b);
double l2_norm(const std::vector<double> &v);

}  // namespace kgmol::nn

#endif  // KGMOL_NN_TENSOR_HPP
