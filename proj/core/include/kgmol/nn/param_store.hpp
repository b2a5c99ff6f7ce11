//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_NN_PARAM_STORE_HPP
#define KGMOL_NN_PARAM_STORE_HPP

#include <cstdint>
#include <map>
#include <string>

#include "kgmol/nn/tensor.hpp"

namespace kgmol::nn {

/// One named parameter with its gradient buffer and Adam moments.
/// All four tensors share the parameter's shape.
struct ParamEntry {
  Tensor2 value;
  Tensor2 grad;
  Tensor2 m;
  Tensor2 v;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Named parameter map. std::map keeps iteration order stable, which the
/// determinism contract (checksums, checkpoints, update order) relies on.
class ParamStore {
 public:
  /// Registers a parameter; throws InternalError if the name exists.
  Tensor2 &add(const std::string &name, Tensor2 value);

  bool has(const std::string &name) const;
  ParamEntry &entry(const std::string &name);
  const ParamEntry &entry(const std::string &name) const;
  Tensor2 &value(const std::string &name) { return entry(name).value; }
  const Tensor2 &value(const std::string &name) const {
    return entry(name).value;
  }
  Tensor2 &grad(const std::string &name) { return entry(name).grad; }

  std::map<std::string, ParamEntry> &entries() { return entries_; }
  const std::map<std::string, ParamEntry> &entries() const { return entries_; }

  std::size_t step_count() const { return step_; }
  void set_step_count(std::size_t s) { step_ = s; }

  void zero_grad();

  /// Total number of scalar parameters.
  std::size_t num_scalars() const;

 private:
  std::map<std::string, ParamEntry> entries_;
  std::size_t step_ = 0;
};

/// Standard Adam with bias correction, applied in name order. Throws
/// InternalError naming the parameter on any non-finite gradient.
void adam_step(ParamStore &store, const AdamConfig &cfg = {});

/// FNV-1a over parameter names and value bytes, in name order. Sensitive to
/// any bit-level change of any parameter.
std::uint64_t checksum(const ParamStore &store);

/// Checkpoint JSON: {version:1, params:{name:{shape:[r,c], data:[...]}}}.
/// `meta` (may be empty) is stored under a "meta" key and returned by load.
void save_checkpoint(const ParamStore &store, const std::string &path,
                     const std::map<std::string, std::string> &meta = {});
ParamStore load_checkpoint(const std::string &path,
                           std::map<std::string, std::string> *meta = nullptr);

}  // namespace kgmol::nn

#endif  // KGMOL_NN_PARAM_STORE_HPP
