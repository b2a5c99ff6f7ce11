//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/nn/param_store.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "kgmol/errors.hpp"

namespace kgmol::nn {

Tensor2 &ParamStore::add(const std::string &name, Tensor2 value) {
  if (entries_.count(name))
    throw InternalError("ParamStore: duplicate parameter " + name);
  ParamEntry e;
  e.grad = Tensor2(value.rows(), value.cols());
  e.m = Tensor2(value.rows(), value.cols());
  e.v = Tensor2(value.rows(), value.cols());
  e.value = std::move(value);
  return entries_.emplace(name, std::move(e)).first->second.value;
}

bool ParamStore::has(const std::string &name) const {
  return entries_.count(name) != 0;
}

ParamEntry &ParamStore::entry(const std::string &name) {
  auto it = entries_.find(name);
  if (it == entries_.end())
    throw InternalError("ParamStore: unknown parameter " + name);
  return it->second;
}

const ParamEntry &ParamStore::entry(const std::string &name) const {
  auto it = entries_.find(name);
  if (it == entries_.end())
    throw InternalError("ParamStore: unknown parameter " + name);
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto &[name, e] : entries_) e.grad.fill(0.0);
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto &[name, e] : entries_) n += e.value.size();
  return n;
}

void adam_step(ParamStore &store, const AdamConfig &cfg) {
  store.set_step_count(store.step_count() + 1);
  const double t = static_cast<double>(store.step_count());
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  for (auto &[name, e] : store.entries()) {
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      double g = e.grad.data()[i];
      if (!std::isfinite(g))
        throw InternalError("adam_step: non-finite gradient in " + name);
      double &m = e.m.data()[i];
      double &v = e.v.data()[i];
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
      double mhat = m / bc1;
      double vhat = v / bc2;
      e.value.data()[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

std::uint64_t checksum(const ParamStore &store) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix_bytes = [&h](const void *p, std::size_t n) {
    const auto *bytes = static_cast<const unsigned char *>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto &[name, e] : store.entries()) {
    mix_bytes(name.data(), name.size());
    mix_bytes(e.value.data().data(), e.value.size() * sizeof(double));
  }
  return h;
}

void save_checkpoint(const ParamStore &store, const std::string &path,
                     const std::map<std::string, std::string> &meta) {
  nlohmann::ordered_json root;
  root["version"] = 1;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto &[name, e] : store.entries()) {
    nlohmann::ordered_json p;
    p["shape"] = {e.value.rows(), e.value.cols()};
    p["data"] = e.value.data();
    params[name] = std::move(p);
  }
  root["params"] = std::move(params);
  if (!meta.empty()) root["meta"] = meta;

  std::ofstream out(path);
  if (!out) throw InputError("cannot write checkpoint: " + path);
  out << root.dump(2) << "\n";
}

ParamStore load_checkpoint(const std::string &path,
                           std::map<std::string, std::string> *meta) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open checkpoint: " + path);
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception &e) {
    throw InputError("malformed checkpoint " + path + ": " + e.what());
  }
  if (!root.is_object() || root.value("version", 0) != 1)
    throw InputError("unsupported checkpoint version in " + path);

  ParamStore store;
  for (const auto &[name, p] : root.at("params").items()) {
    auto shape = p.at("shape").get<std::vector<std::size_t>>();
    auto data = p.at("data").get<std::vector<double>>();
    if (shape.size() != 2 || shape[0] * shape[1] != data.size())
      throw InputError("checkpoint shape mismatch for " + name);
    store.add(name, Tensor2(shape[0], shape[1], std::move(data)));
  }
  if (meta) {
    meta->clear();
    if (root.contains("meta"))
      *meta = root.at("meta").get<std::map<std::string, std::string>>();
  }
  return store;
}

}  // namespace kgmol::nn
