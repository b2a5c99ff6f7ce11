//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/kge/kge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

#include "kgmol/errors.hpp"

namespace kgmol::kge {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr int kNegativeResampleBound = 100;
}  // namespace

std::string model_name(KgeModel model) {
  switch (model) {
    case KgeModel::TransE:
      return "transe";
    case KgeModel::RotatE:
      return "rotate";
    case KgeModel::DistMult:
      return "distmult";
  }
  throw InternalError("model_name: unknown model");
}

KgeModel model_from_name(const std::string &name) {
  if (name == "transe") return KgeModel::TransE;
  if (name == "rotate") return KgeModel::RotatE;
  if (name == "distmult") return KgeModel::DistMult;
  throw InputError("unknown KGE model: " + name +
                   " (expected transe, rotate, or distmult)");
}

const std::vector<double> &EmbeddingTable::entity(
    const std::string &name) const {
  auto it = entity_vectors.find(name);
  if (it == entity_vectors.end())
    throw InputError("unknown entity in embedding table: " + name);
  return it->second;
}

const std::vector<double> &EmbeddingTable::relation(
    const std::string &name) const {
  auto it = relation_vectors.find(name);
  if (it == relation_vectors.end())
    throw InputError("unknown relation in embedding table: " + name);
  return it->second;
}

void KgeConfig::validate() const {
  if (dim == 0) throw InputError("kge: dim must be positive");
  if (margin < 0.0) throw InputError("kge: margin must be >= 0");
  if (learning_rate <= 0.0)
    throw InputError("kge: learning rate must be positive");
  if (negatives_per_positive == 0)
    throw InputError("kge: negatives_per_positive must be >= 1");
}

EmbeddingTable init_embeddings(const kg::KnowledgeGraph &graph,
                               const KgeConfig &cfg) {
  cfg.validate();
  if (graph.triples.empty()) throw InputError("kge: empty knowledge graph");

  EmbeddingTable emb;
  emb.model = cfg.model;
  emb.dim = cfg.dim;
  Rng rng(cfg.seed);
  const double limit = 6.0 / std::sqrt(static_cast<double>(cfg.dim));
  const std::size_t ent_len =
      cfg.model == KgeModel::RotatE ? 2 * cfg.dim : cfg.dim;

  for (const auto &e : graph.entities) {
    std::vector<double> v(ent_len);
    for (auto &x : v) x = rng.uniform(-limit, limit);
    emb.entity_vectors[e] = std::move(v);
  }
  for (const auto &r : graph.relations) {
    std::vector<double> v(cfg.dim);
    if (cfg.model == KgeModel::RotatE)
      for (auto &x : v) x = rng.uniform(0.0, 2.0 * kPi);
    else
      for (auto &x : v) x = rng.uniform(-limit, limit);
    emb.relation_vectors[r] = std::move(v);
  }
  return emb;
}

double score_triple(KgeModel model, const EmbeddingTable &emb,
                    const kg::KnowledgeTriple &t) {
  return score_triple_with_grad(model, emb, t).score;
}

ScoreGrads score_triple_with_grad(KgeModel model, const EmbeddingTable &emb,
                                  const kg::KnowledgeTriple &t) {
  const auto &h = emb.entity(t.head);
  const auto &r = emb.relation(t.relation);
  const auto &tl = emb.entity(t.tail);

  ScoreGrads g;
  g.dh.assign(h.size(), 0.0);
  g.dr.assign(r.size(), 0.0);
  g.dt.assign(tl.size(), 0.0);

  switch (model) {
    case KgeModel::TransE: {
      if (h.size() != r.size() || h.size() != tl.size())
        throw InternalError("transe: dimension mismatch");
      std::vector<double> d(h.size());
      double norm2 = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        d[i] = h[i] + r[i] - tl[i];
        norm2 += d[i] * d[i];
      }
      double norm = std::sqrt(norm2);
      g.score = -norm;
      if (norm > 0.0) {
        for (std::size_t i = 0; i < h.size(); ++i) {
          double u = d[i] / norm;
          g.dh[i] = -u;
          g.dr[i] = -u;
          g.dt[i] = u;
        }
      }
      break;
    }
    case KgeModel::RotatE: {
      const std::size_t dim = r.size();
      if (h.size() != 2 * dim || tl.size() != 2 * dim)
        throw InternalError("rotate: dimension mismatch");
      std::vector<double> d(2 * dim);
      double norm2 = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        double c = std::cos(r[i]), s = std::sin(r[i]);
        double hre = h[2 * i], him = h[2 * i + 1];
        d[2 * i] = hre * c - him * s - tl[2 * i];
        d[2 * i + 1] = hre * s + him * c - tl[2 * i + 1];
        norm2 += d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1];
      }
      double norm = std::sqrt(norm2);
      g.score = -norm;
      if (norm > 0.0) {
        for (std::size_t i = 0; i < dim; ++i) {
          double c = std::cos(r[i]), s = std::sin(r[i]);
          double hre = h[2 * i], him = h[2 * i + 1];
          double ure = d[2 * i] / norm, uim = d[2 * i + 1] / norm;
          g.dt[2 * i] = ure;
          g.dt[2 * i + 1] = uim;
          g.dh[2 * i] = -(ure * c + uim * s);
          g.dh[2 * i + 1] = -(-ure * s + uim * c);
          g.dr[i] = -(ure * (-hre * s - him * c) + uim * (hre * c - him * s));
        }
      }
      break;
    }
    case KgeModel::DistMult: {
      if (h.size() != r.size() || h.size() != tl.size())
        throw InternalError("distmult: dimension mismatch");
      double s = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        s += h[i] * r[i] * tl[i];
        g.dh[i] = r[i] * tl[i];
        g.dr[i] = h[i] * tl[i];
        g.dt[i] = h[i] * r[i];
      }
      g.score = s;
      break;
    }
  }
  return g;
}

kg::KnowledgeTriple sample_negative(const kg::KnowledgeGraph &graph,
                                    const kg::KnowledgeTriple &t, Rng &rng,
                                    bool *clean) {
  if (graph.entities.size() < 2)
    throw InputError("sample_negative: need at least 2 entities");

  kg::KnowledgeTriple candidate = t;
  for (int attempt = 0; attempt < kNegativeResampleBound; ++attempt) {
    candidate = t;
    bool corrupt_head = rng.coin();
    const std::string &replacement =
        graph.entities[rng.index(graph.entities.size())];
    (corrupt_head ? candidate.head : candidate.tail) = replacement;
    if (candidate != t && !graph.contains(candidate)) {
      if (clean) *clean = true;
      return candidate;
    }
  }
  if (clean) *clean = false;
  return candidate;
}

namespace {

void normalize_entities(EmbeddingTable &emb) {
  for (auto &[name, v] : emb.entity_vectors) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (auto &x : v) x /= norm;
  }
}

void sgd_apply(std::vector<double> &v, const std::vector<double> &g,
               double scale) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += scale * g[i];
}

}  // namespace

EmbeddingTable train_embeddings(const kg::KnowledgeGraph &graph,
                                const KgeConfig &cfg,
                                const TrainObserver &observer) {
  EmbeddingTable emb = init_embeddings(graph, cfg);
  Rng rng(hash_mix(cfg.seed, fnv1a("kge-train")));

  std::vector<std::size_t> order(graph.triples.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();  // forces shuffle on first step

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    if (cursor >= order.size()) {
      if (cfg.model == KgeModel::TransE && step > 0) normalize_entities(emb);
      rng.shuffle(order);
      cursor = 0;
    }
    const kg::KnowledgeTriple &pos = graph.triples[order[cursor++]];

    double step_loss = 0.0;
    for (std::size_t n = 0; n < cfg.negatives_per_positive; ++n) {
      kg::KnowledgeTriple neg = sample_negative(graph, pos, rng);
      ScoreGrads gp = score_triple_with_grad(cfg.model, emb, pos);
      ScoreGrads gn = score_triple_with_grad(cfg.model, emb, neg);
      double loss = cfg.margin - gp.score + gn.score;
      if (loss <= 0.0) continue;
      step_loss += loss;

      // dLoss/d(pos vectors) = -grad(pos score); SGD moves against it.
      const double lr = cfg.learning_rate;
      sgd_apply(emb.entity_vectors.at(pos.head), gp.dh, lr);
      sgd_apply(emb.relation_vectors.at(pos.relation), gp.dr, lr);
      sgd_apply(emb.entity_vectors.at(pos.tail), gp.dt, lr);
      sgd_apply(emb.entity_vectors.at(neg.head), gn.dh, -lr);
      sgd_apply(emb.relation_vectors.at(neg.relation), gn.dr, -lr);
      sgd_apply(emb.entity_vectors.at(neg.tail), gn.dt, -lr);
    }
    if (observer)
      observer(step,
               step_loss / static_cast<double>(cfg.negatives_per_positive),
               emb);
  }
  return emb;
}

LinkMetrics evaluate_link_prediction(const kg::KnowledgeGraph &test,
                                     const EmbeddingTable &emb, KgeModel model,
                                     const kg::KnowledgeGraph *known) {
  LinkMetrics metrics;
  auto is_true = [&](const kg::KnowledgeTriple &t) {
    return test.contains(t) || (known && known->contains(t));
  };

  double sum_rr = 0.0;
  double h1 = 0.0, h3 = 0.0, h10 = 0.0;
  for (const auto &t : test.triples) {
    for (int side = 0; side < 2; ++side) {
      double s_true = score_triple(model, emb, t);
      std::size_t better = 0, equal = 0;
      for (const auto &[name, vec] : emb.entity_vectors) {
        kg::KnowledgeTriple cand = t;
        (side == 0 ? cand.tail : cand.head) = name;
        if (cand == t || is_true(cand)) continue;
        double s = score_triple(model, emb, cand);
        if (s > s_true)
          ++better;
        else if (s == s_true)
          ++equal;
      }
      double rank = 1.0 + static_cast<double>(better) +
                    static_cast<double>(equal) / 2.0;
      sum_rr += 1.0 / rank;
      if (rank <= 1.0) h1 += 1.0;
      if (rank <= 3.0) h3 += 1.0;
      if (rank <= 10.0) h10 += 1.0;
      ++metrics.queries;
    }
  }
  if (metrics.queries > 0) {
    double q = static_cast<double>(metrics.queries);
    metrics.mrr = sum_rr / q;
    metrics.hits1 = h1 / q;
    metrics.hits3 = h3 / q;
    metrics.hits10 = h10 / q;
  }
  return metrics;
}

void save_embeddings(const EmbeddingTable &emb, const std::string &path) {
  nlohmann::ordered_json root;
  root["version"] = 1;
  root["model"] = model_name(emb.model);
  root["dim"] = emb.dim;
  root["entities"] = emb.entity_vectors;
  root["relations"] = emb.relation_vectors;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write embedding file: " + path);
  out << root.dump(2) << "\n";
}

EmbeddingTable load_embeddings(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file: " + path);
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception &e) {
    throw InputError("malformed embedding file " + path + ": " + e.what());
  }
  if (!root.is_object() || root.value("version", 0) != 1)
    throw InputError("unsupported embedding file version in " + path);

  EmbeddingTable emb;
  emb.model = model_from_name(root.at("model").get<std::string>());
  emb.dim = root.at("dim").get<std::size_t>();
  emb.entity_vectors =
      root.at("entities").get<std::map<std::string, std::vector<double>>>();
  emb.relation_vectors =
      root.at("relations").get<std::map<std::string, std::vector<double>>>();

  const std::size_t ent_len =
      emb.model == KgeModel::RotatE ? 2 * emb.dim : emb.dim;
  for (const auto &[name, v] : emb.entity_vectors)
    if (v.size() != ent_len)
      throw InputError("embedding length mismatch for entity " + name);
  for (const auto &[name, v] : emb.relation_vectors)
    if (v.size() != emb.dim)
      throw InputError("embedding length mismatch for relation " + name);
  return emb;
}

}  // namespace kgmol::kge
