//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_KGE_KGE_HPP
#define KGMOL_KGE_KGE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kgmol/kg/triples.hpp"
#include "kgmol/rng.hpp"

namespace kgmol::kge {

enum class KgeModel { TransE, RotatE, DistMult };

std::string model_name(KgeModel model);
KgeModel model_from_name(const std::string &name);

/// Learned vectors. RotatE stores entities as dim complex values
/// interleaved (re, im) in 2*dim reals and relations as dim phases, so the
/// relation entries e^{i*phase} have modulus 1 by construction.
struct EmbeddingTable {
  KgeModel model = KgeModel::TransE;
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> entity_vectors;
  std::map<std::string, std::vector<double>> relation_vectors;

  const std::vector<double> &entity(const std::string &name) const;
  const std::vector<double> &relation(const std::string &name) const;
};

struct KgeConfig {
  KgeModel model = KgeModel::RotatE;
  std::size_t dim = 32;
  double margin = 1.0;
  double learning_rate = 0.05;
  std::size_t negatives_per_positive = 1;
  std::size_t steps = 5000;
  std::uint64_t seed = 42;

  void validate() const;  // throws InputError on bad fields
};

/// Seeded initialization: uniform(-6/sqrt(dim), +6/sqrt(dim)) for real
/// coordinates, uniform(0, 2*pi) for RotatE phases.
EmbeddingTable init_embeddings(const kg::KnowledgeGraph &graph,
                               const KgeConfig &cfg);

/// Plausibility score, higher = more plausible.
/// TransE: -|h+r-t|_2; RotatE: -|h*r-t|_2 (complex rotation);
/// DistMult: sum_i h_i r_i t_i.
double score_triple(KgeModel model, const EmbeddingTable &emb,
                    const kg::KnowledgeTriple &t);

/// Analytic score gradients w.r.t. the three vectors involved.
struct ScoreGrads {
  double score = 0.0;
  std::vector<double> dh;
  std::vector<double> dr;
  std::vector<double> dt;
};
ScoreGrads score_triple_with_grad(KgeModel model, const EmbeddingTable &emb,
                                  const kg::KnowledgeTriple &t);

/// Corrupts head or tail (uniform coin) with a uniform entity, resampling
/// up to a fixed bound to avoid known triples. `clean` reports whether the
/// result is guaranteed absent from the graph.
kg::KnowledgeTriple sample_negative(const kg::KnowledgeGraph &graph,
                                    const kg::KnowledgeTriple &t, Rng &rng,
                                    bool *clean = nullptr);

/// Called after every SGD step with the step index (0-based) and the margin
/// loss of that step.
using TrainObserver =
    std::function<void(std::size_t step, double loss, const EmbeddingTable &)>;

/// Margin-ranking SGD, deterministic given cfg.seed. Visits shuffled
/// positives in epochs; TransE entity vectors are renormalized to unit L2
/// at every epoch boundary.
EmbeddingTable train_embeddings(const kg::KnowledgeGraph &graph,
                                const KgeConfig &cfg,
                                const TrainObserver &observer = {});

struct LinkMetrics {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t queries = 0;
};

/// Filtered ranking of every test triple's head and tail against all
/// entities of the table. Corruptions appearing in `test` or `known` are
/// excluded; ties get fractional rank 1 + #better + #equal/2.
LinkMetrics evaluate_link_prediction(const kg::KnowledgeGraph &test,
                                     const EmbeddingTable &emb, KgeModel model,
                                     const kg::KnowledgeGraph *known = nullptr);

/// Checkpoint JSON:
/// {version:1, model, dim, entities:{name:[...]}, relations:{name:[...]}}.
void save_embeddings(const EmbeddingTable &emb, const std::string &path);
EmbeddingTable load_embeddings(const std::string &path);

}  // namespace kgmol::kge

#endif  // KGMOL_KGE_KGE_HPP
