//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "kgmol/errors.hpp"

namespace kgmol::nn {

std::string CheckReport::to_text() const {
  std::ostringstream out;
  out << (passed ? "pass" : "FAIL") << ": max rel err " << max_rel_error
      << " over " << coords_checked << " coords";
  if (!worst_param.empty())
    out << " (worst " << worst_param << "[" << worst_index
        << "] analytic=" << worst_analytic << " numeric=" << worst_numeric
        << ")";
  return out.str();
}

CheckReport finite_diff_gradcheck(
    const std::function<double(ParamStore &)> &f, ParamStore &store,
    double eps, double tol, Rng &rng, std::size_t num_coords) {
  if (eps <= 0.0 || tol <= 0.0)
    throw InternalError("finite_diff_gradcheck: eps and tol must be positive");

  std::vector<std::pair<std::string, std::size_t>> coords;
  for (const auto &[name, e] : store.entries())
    for (std::size_t i = 0; i < e.value.size(); ++i)
      coords.emplace_back(name, i);

  if (coords.size() > num_coords) {
    rng.shuffle(coords);
    coords.resize(num_coords);
    std::sort(coords.begin(), coords.end());
  }

  CheckReport report;
  report.coords_checked = coords.size();
  for (const auto &[name, idx] : coords) {
    double analytic = store.entry(name).grad.data()[idx];
    double &w = store.entry(name).value.data()[idx];
    const double saved = w;

    w = saved + eps;
    double fp = f(store);
    w = saved - eps;
    double fm = f(store);
    w = saved;

    double numeric = (fp - fm) / (2.0 * eps);
    double rel = std::abs(analytic - numeric) /
                 std::max({1.0, std::abs(analytic), std::abs(numeric)});
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_param = name;
      report.worst_index = idx;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  }
  report.passed = report.max_rel_error <= tol;
  return report;
}

}  // namespace kgmol::nn
