//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_SSL_SSL_HPP
#define KGMOL_SSL_SSL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kgmol/chem/molecule.hpp"
#include "kgmol/enc/kmpnn.hpp"
#include "kgmol/kg/triples.hpp"
#include "kgmol/kge/kge.hpp"
#include "kgmol/moiety/moiety.hpp"
#include "kgmol/nn/dense.hpp"
#include "kgmol/nn/param_store.hpp"
#include "kgmol/nn/tensor.hpp"

namespace kgmol::ssl {

struct SslConfig {
  double temperature = 0.5;
  std::size_t batch_size = 8;  // N pairs per contrastive batch, >= 2
  std::size_t proj_dim = 32;
  std::size_t epochs = 10;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
  std::string mode = "element_kg";  // element_kg | fg_kg
  bool duplicate_properties = false;
  enc::EncoderConfig encoder;
  enc::FeatureConfig features;
};

/// Intermediates of project() needed by project_backward().
struct ProjectCache {
  nn::DenseCache l1;
  nn::DenseCache l2;
  std::vector<double> y;  // head output before normalization
  double norm = 0.0;
};

/// Registers the two-layer projection head {prefix}/l1/{W,b},
/// {prefix}/l2/{W,b} (relu between, no activation after l2).
void init_head_params(nn::ParamStore &store, const std::string &prefix,
                      std::size_t in_dim, std::size_t proj_dim, Rng &rng);

/// Two-layer head then L2 normalization to the unit sphere. Throws
/// InternalError when the pre-normalization output has zero norm.
std::vector<double> project(const std::vector<double> &graph_vector,
                            const nn::ParamStore &params,
                            const std::string &prefix = "head",
                            ProjectCache *cache = nullptr);

/// Backward through normalization and both layers; accumulates head
/// gradients and returns the gradient with respect to the head input.
std::vector<double> project_backward(const ProjectCache &cache,
                                     nn::ParamStore &params,
                                     const std::string &prefix,
                                     const std::vector<double> &dz);

struct NtxentResult {
  double loss = 0.0;
  nn::Tensor2 dz;  // same shape as the input batch
};

/// NT-Xent over 2N row vectors with cosine similarity:
///   l_i = -log( exp(cos(z_i, z_pair(i))/tau) / sum_{k != i} exp(cos(z_i, z_k)/tau) )
/// loss = mean over all 2N anchors. pair_index must be a perfect matching.
/// Gradients are exact in the raw (unnormalized) rows. Throws InputError on
/// tau <= 0 or fewer than two pairs.
NtxentResult ntxent_loss(const nn::Tensor2 &z,
                         const std::vector<std::size_t> &pair_index,
                         double tau);

/// Augmentation inputs for pretraining. `graph` is required in element_kg
/// mode; `patterns` defaults to the built-in library; `emb` optionally
/// supplies KGE-derived features for property nodes and prop_of edges.
struct PretrainContext {
  const kg::KnowledgeGraph *graph = nullptr;
  const kge::EmbeddingTable *emb = nullptr;
  const std::vector<moiety::MoietyPattern> *patterns = nullptr;
};

struct EpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double wall_ms = 0.0;
};

/// CSV with header `epoch,mean_loss,wall_ms`.
std::string log_to_csv(const std::vector<EpochLog> &log);

struct PretrainResult {
  nn::ParamStore params;  // orig/*, kmpnn/*, head/*
  std::vector<EpochLog> log;
  std::size_t edge_dim_orig = 0;
  std::size_t edge_dim_aug = 0;
};

/// Contrastive pretraining on (original, augmented) pairs: per epoch a
/// seeded shuffle, batches of batch_size (remainder dropped), originals
/// encoded under "orig", augmented views under "kmpnn", both projected by
/// the shared head, NT-Xent loss, one Adam step per batch over all
/// parameters. Augmented views are built once up front (augmentation is
/// deterministic). Deterministic given cfg.seed; epochs = 0 returns the
/// initialization untouched.
PretrainResult pretrain(const std::vector<chem::MolecularGraph> &dataset,
                        const PretrainContext &ctx, const SslConfig &cfg);

struct ProbeMetrics {
  double accuracy = 0.0;
  std::map<std::string, double> per_class_accuracy;
  std::map<std::string, std::size_t> test_support;
  std::size_t train_size = 0;
  std::size_t test_size = 0;

  std::string to_json() const;
};

/// Trains the multinomial logistic head used by linear_probe (full-batch
/// Adam from zero initialization, fixed iteration count) and scores the
/// held-out rows. Labels are indices into class_names.
ProbeMetrics train_probe_head(const nn::Tensor2 &train_x,
                              const std::vector<int> &train_y,
                              const nn::Tensor2 &test_x,
                              const std::vector<int> &test_y,
                              const std::vector<std::string> &class_names);

/// Frozen-encoder evaluation: encodes every molecule with the plain "orig"
/// encoder in `frozen`, splits 80/20 stratified by label (seeded by
/// cfg.seed), fits a fresh linear head, reports held-out accuracy. Throws
/// InputError on a single-class dataset or an empty held-out split, and
/// InternalError if the frozen parameters' checksum changes.
ProbeMetrics linear_probe(const std::vector<chem::MolecularGraph> &mols,
                          const std::vector<std::string> &labels,
                          const nn::ParamStore &frozen, const SslConfig &cfg);

}  // namespace kgmol::ssl

#endif  // KGMOL_SSL_SSL_HPP
