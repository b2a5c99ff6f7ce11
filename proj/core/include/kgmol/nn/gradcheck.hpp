//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_NN_GRADCHECK_HPP
#define KGMOL_NN_GRADCHECK_HPP

#include <functional>
#include <string>

#include "kgmol/nn/param_store.hpp"
#include "kgmol/rng.hpp"

namespace kgmol::nn {

struct CheckReport {
  bool passed = false;
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;

  std::string to_text() const;
};

/// Central-difference check of analytic gradients already stored in
/// `store.grad`. `f` must evaluate the scalar loss from current values
/// without mutating gradients. Checks a seeded random subsample of at least
/// min(num_coords, total) coordinates; relative error per coordinate is
/// |a - n| / max(1, |a|, |n|).
CheckReport finite_diff_gradcheck(
    const std::function<double(ParamStore &)> &f, ParamStore &store,
    double eps, double tol, Rng &rng, std::size_t num_coords = 150);

}  // namespace kgmol::nn

#endif  // KGMOL_NN_GRADCHECK_HPP
