//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/ssl/ssl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "kgmol/errors.hpp"
#include "kgmol/hetero/hetero.hpp"
#include "kgmol/nn/dense.hpp"

namespace kgmol::ssl {

namespace {

std::vector<double> bias_row(const nn::Tensor2 &b) {
  std::vector<double> out(b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) out[j] = b(0, j);
  return out;
}

/// One molecule's cached views and features.
struct PairItem {
  hetero::HeteroGraph original;
  hetero::HeteroGraph augmented;
  enc::FeatureAssignment feats_original;
  enc::FeatureAssignment feats_augmented;
};

void validate_config(const SslConfig &cfg) {
  if (cfg.temperature <= 0.0)
    throw InputError("ssl: temperature must be positive");
  if (cfg.batch_size < 2) throw InputError("ssl: batch_size must be >= 2");
  if (cfg.proj_dim == 0) throw InputError("ssl: projection dim must be >= 1");
  if (cfg.learning_rate <= 0.0)
    throw InputError("ssl: learning rate must be positive");
  if (cfg.mode != "element_kg" && cfg.mode != "fg_kg")
    throw InputError("ssl: augmentation mode must be element_kg or fg_kg");
  if (cfg.features.node_dim != cfg.encoder.hidden)
    throw InputError("ssl: feature node_dim must equal encoder hidden dim");
}

}  // namespace

void init_head_params(nn::ParamStore &store, const std::string &prefix,
                      std::size_t in_dim, std::size_t proj_dim, Rng &rng) {
  store.add(prefix + "/l1/W", nn::xavier_uniform(in_dim, in_dim, rng));
  store.add(prefix + "/l1/b", nn::Tensor2(1, in_dim));
  store.add(prefix + "/l2/W", nn::xavier_uniform(in_dim, proj_dim, rng));
  store.add(prefix + "/l2/b", nn::Tensor2(1, proj_dim));
}

std::vector<double> project(const std::vector<double> &graph_vector,
                            const nn::ParamStore &params,
                            const std::string &prefix, ProjectCache *cache) {
  ProjectCache local;
  ProjectCache &pc = cache ? *cache : local;

  nn::Tensor2 x(1, graph_vector.size());
  for (std::size_t j = 0; j < graph_vector.size(); ++j)
    x(0, j) = graph_vector[j];

  const nn::Tensor2 h1 =
      nn::dense_forward(x, params.value(prefix + "/l1/W"),
                        bias_row(params.value(prefix + "/l1/b")),
                        nn::Activation::Relu, &pc.l1);
  const nn::Tensor2 y =
      nn::dense_forward(h1, params.value(prefix + "/l2/W"),
                        bias_row(params.value(prefix + "/l2/b")),
                        nn::Activation::Identity, &pc.l2);

  pc.y = y.data();
  pc.norm = nn::l2_norm(pc.y);
  if (pc.norm == 0.0)
    throw InternalError("project: zero-norm projection output");

  std::vector<double> z(pc.y.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = pc.y[j] / pc.norm;
  return z;
}

std::vector<double> project_backward(const ProjectCache &cache,
                                     nn::ParamStore &params,
                                     const std::string &prefix,
                                     const std::vector<double> &dz) {
  if (dz.size() != cache.y.size())
    throw InternalError("project_backward: gradient length mismatch");

  // z = y / |y|:  dy = (dz - z (z . dz)) / |y|.
  double zdotdz = 0.0;
  for (std::size_t j = 0; j < dz.size(); ++j)
    zdotdz += (cache.y[j] / cache.norm) * dz[j];
  nn::Tensor2 dy(1, dz.size());
  for (std::size_t j = 0; j < dz.size(); ++j)
    dy(0, j) = (dz[j] - (cache.y[j] / cache.norm) * zdotdz) / cache.norm;

  nn::DenseGrads g2 =
      nn::dense_backward(cache.l2, params.value(prefix + "/l2/W"), dy);
  nn::add_inplace(params.grad(prefix + "/l2/W"), g2.dw);
  for (std::size_t j = 0; j < g2.db.size(); ++j)
    params.grad(prefix + "/l2/b")(0, j) += g2.db[j];

  nn::DenseGrads g1 =
      nn::dense_backward(cache.l1, params.value(prefix + "/l1/W"), g2.dx);
  nn::add_inplace(params.grad(prefix + "/l1/W"), g1.dw);
  for (std::size_t j = 0; j < g1.db.size(); ++j)
    params.grad(prefix + "/l1/b")(0, j) += g1.db[j];

  return g1.dx.data();
}

NtxentResult ntxent_loss(const nn::Tensor2 &z,
                         const std::vector<std::size_t> &pair_index,
                         double tau) {
  if (tau <= 0.0) throw InputError("ntxent_loss: temperature must be > 0");
  const std::size_t m = z.rows();
  if (m < 4 || m % 2 != 0)
    throw InputError("ntxent_loss: need at least two pairs (2N >= 4 rows)");
  if (pair_index.size() != m)
    throw InternalError("ntxent_loss: pair index length mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    if (pair_index[i] >= m || pair_index[i] == i ||
        pair_index[pair_index[i]] != i)
      throw InternalError("ntxent_loss: pair index is not a perfect matching");
  }

  const std::size_t d = z.cols();
  std::vector<double> norm(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += z(i, j) * z(i, j);
    norm[i] = std::sqrt(s);
    if (norm[i] == 0.0)
      throw InternalError("ntxent_loss: zero-norm embedding row");
  }

  nn::Tensor2 cosine(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i + 1; k < m; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += z(i, j) * z(k, j);
      const double c = s / (norm[i] * norm[k]);
      cosine(i, k) = c;
      cosine(k, i) = c;
    }

  // dloss/dcosine(i, k), anchors in rows.
  nn::Tensor2 dcos(m, m);
  double loss = 0.0;
  std::vector<double> p(m);
  for (std::size_t i = 0; i < m; ++i) {
    double mx = -1e300;
    for (std::size_t k = 0; k < m; ++k)
      if (k != i) mx = std::max(mx, cosine(i, k) / tau);
    double denom = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i) continue;
      p[k] = std::exp(cosine(i, k) / tau - mx);
      denom += p[k];
    }
    loss += -cosine(i, pair_index[i]) / tau + mx + std::log(denom);
    const double scale = 1.0 / (static_cast<double>(m) * tau);
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i) continue;
      dcos(i, k) =
          scale * (p[k] / denom - (k == pair_index[i] ? 1.0 : 0.0));
    }
  }
  loss /= static_cast<double>(m);

  NtxentResult result;
  result.loss = loss;
  result.dz = nn::Tensor2(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i) continue;
      const double g = dcos(i, k);
      if (g == 0.0) continue;
      const double inv = 1.0 / (norm[i] * norm[k]);
      const double c = cosine(i, k);
      for (std::size_t j = 0; j < d; ++j) {
        result.dz(i, j) += g * (z(k, j) * inv - c * z(i, j) / (norm[i] * norm[i]));
        result.dz(k, j) += g * (z(i, j) * inv - c * z(k, j) / (norm[k] * norm[k]));
      }
    }
  nn::check_finite(result.dz, "ntxent_loss");
  return result;
}

std::string log_to_csv(const std::vector<EpochLog> &log) {
  std::string out = "epoch,mean_loss,wall_ms\n";
  char buf[128];
  for (const auto &row : log) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.3f\n", row.epoch,
                  row.mean_loss, row.wall_ms);
    out += buf;
  }
  return out;
}

PretrainResult pretrain(const std::vector<chem::MolecularGraph> &dataset,
                        const PretrainContext &ctx, const SslConfig &cfg) {
  validate_config(cfg);
  if (dataset.size() < 2)
    throw InputError("pretrain: need at least two molecules");
  if (cfg.batch_size > dataset.size())
    throw InputError("pretrain: batch_size exceeds dataset size");
  if (cfg.mode == "element_kg" && ctx.graph == nullptr)
    throw InputError("pretrain: element_kg mode requires a knowledge graph");

  const std::vector<moiety::MoietyPattern> &patterns =
      ctx.patterns ? *ctx.patterns : moiety::builtin_patterns();

  hetero::AugmentOptions aug_opts;
  aug_opts.duplicate_properties = cfg.duplicate_properties;

  std::vector<PairItem> items(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    PairItem &it = items[i];
    it.original = hetero::hetero_from_molecule(dataset[i]);
    it.feats_original =
        enc::init_node_features(it.original, nullptr, cfg.features);
    if (cfg.mode == "element_kg") {
      it.augmented =
          hetero::augment_with_element_kg(dataset[i], *ctx.graph, aug_opts);
    } else {
      moiety::MoietySet set = moiety::detect_moieties(dataset[i], patterns);
      it.augmented =
          hetero::augment_with_fg_kg(dataset[i], set.moieties, set.relations);
    }
    it.feats_augmented =
        enc::init_node_features(it.augmented, ctx.emb, cfg.features);
  }

  PretrainResult result;
  result.edge_dim_orig = items.front().feats_original.edge_dim;
  result.edge_dim_aug = items.front().feats_augmented.edge_dim;

  Rng init_rng(hash_mix(cfg.seed, fnv1a("ssl-init")));
  enc::init_encoder_params(result.params, "orig", enc::kinds_for_mode("original"),
                           result.edge_dim_orig, cfg.encoder, init_rng);
  enc::init_encoder_params(result.params, "kmpnn", enc::kinds_for_mode(cfg.mode),
                           result.edge_dim_aug, cfg.encoder, init_rng);
  init_head_params(result.params, "head", cfg.encoder.out_dim, cfg.proj_dim,
                   init_rng);

  nn::AdamConfig adam;
  adam.lr = cfg.learning_rate;

  const std::size_t n = dataset.size();
  const std::size_t nb = cfg.batch_size;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  Rng order_rng(hash_mix(cfg.seed, fnv1a("ssl-order")));
  std::vector<std::size_t> pairing(2 * nb);
  for (std::size_t b = 0; b < nb; ++b) {
    pairing[b] = nb + b;
    pairing[nb + b] = b;
  }

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    order_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start + nb <= n; start += nb) {
      result.params.zero_grad();
      nn::Tensor2 zbatch(2 * nb, cfg.proj_dim);
      std::vector<enc::KmpnnCache> gcaches(2 * nb);
      std::vector<ProjectCache> pcaches(2 * nb);

      for (std::size_t b = 0; b < nb; ++b) {
        const PairItem &it = items[order[start + b]];
        const enc::EncodeResult ro =
            enc::kmpnn_forward(it.original, it.feats_original, result.params,
                               "orig", cfg.encoder, &gcaches[b]);
        const std::vector<double> zo =
            project(ro.graph_vector, result.params, "head", &pcaches[b]);
        const enc::EncodeResult ra = enc::kmpnn_forward(
            it.augmented, it.feats_augmented, result.params, "kmpnn",
            cfg.encoder, &gcaches[nb + b]);
        const std::vector<double> za =
            project(ra.graph_vector, result.params, "head", &pcaches[nb + b]);
        for (std::size_t j = 0; j < cfg.proj_dim; ++j) {
          zbatch(b, j) = zo[j];
          zbatch(nb + b, j) = za[j];
        }
      }

      const NtxentResult nt = ntxent_loss(zbatch, pairing, cfg.temperature);
      for (std::size_t row = 0; row < 2 * nb; ++row) {
        std::vector<double> dz(cfg.proj_dim);
        for (std::size_t j = 0; j < cfg.proj_dim; ++j) dz[j] = nt.dz(row, j);
        const std::vector<double> dgv =
            project_backward(pcaches[row], result.params, "head", dz);
        enc::kmpnn_backward(gcaches[row], result.params,
                            row < nb ? "orig" : "kmpnn", cfg.encoder, dgv);
      }
      nn::adam_step(result.params, adam);
      loss_sum += nt.loss;
      ++batches;
    }

    const auto t1 = std::chrono::steady_clock::now();
    EpochLog row;
    row.epoch = epoch;
    row.mean_loss = loss_sum / static_cast<double>(batches);
    row.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    result.log.push_back(row);
  }
  return result;
}

std::string ProbeMetrics::to_json() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy;
  j["per_class_accuracy"] = per_class_accuracy;
  j["test_support"] = test_support;
  j["train_size"] = train_size;
  j["test_size"] = test_size;
  return j.dump(2);
}

ProbeMetrics train_probe_head(const nn::Tensor2 &train_x,
                              const std::vector<int> &train_y,
                              const nn::Tensor2 &test_x,
                              const std::vector<int> &test_y,
                              const std::vector<std::string> &class_names) {
  const std::size_t dim = train_x.cols();
  const std::size_t classes = class_names.size();
  const std::size_t n_train = train_x.rows();
  const std::size_t n_test = test_x.rows();
  if (classes < 2) throw InputError("probe: need at least two classes");
  if (n_train == 0 || n_test == 0)
    throw InputError("probe: empty train or test split");
  if (train_y.size() != n_train || test_y.size() != n_test ||
      test_x.cols() != dim)
    throw InternalError("probe: split shape mismatch");

  nn::ParamStore head;
  head.add("probe/W", nn::Tensor2(dim, classes));
  head.add("probe/b", nn::Tensor2(1, classes));
  nn::AdamConfig adam;
  adam.lr = 0.05;

  const int kIters = 300;
  std::vector<double> logits(classes);
  for (int iter = 0; iter < kIters; ++iter) {
    head.zero_grad();
    const nn::Tensor2 &w = head.value("probe/W");
    const nn::Tensor2 &b = head.value("probe/b");
    nn::Tensor2 &gw = head.grad("probe/W");
    nn::Tensor2 &gb = head.grad("probe/b");
    for (std::size_t s = 0; s < n_train; ++s) {
      double mx = -1e300;
      for (std::size_t c = 0; c < classes; ++c) {
        double v = b(0, c);
        for (std::size_t j = 0; j < dim; ++j) v += train_x(s, j) * w(j, c);
        logits[c] = v;
        mx = std::max(mx, v);
      }
      double denom = 0.0;
      for (std::size_t c = 0; c < classes; ++c) {
        logits[c] = std::exp(logits[c] - mx);
        denom += logits[c];
      }
      for (std::size_t c = 0; c < classes; ++c) {
        const double grad =
            (logits[c] / denom -
             (static_cast<int>(c) == train_y[s] ? 1.0 : 0.0)) /
            static_cast<double>(n_train);
        gb(0, c) += grad;
        for (std::size_t j = 0; j < dim; ++j)
          gw(j, c) += train_x(s, j) * grad;
      }
    }
    nn::adam_step(head, adam);
  }

  ProbeMetrics metrics;
  metrics.train_size = n_train;
  metrics.test_size = n_test;
  std::map<std::string, std::size_t> correct;
  for (const auto &name : class_names) {
    metrics.test_support[name] = 0;
    correct[name] = 0;
  }
  const nn::Tensor2 &w = head.value("probe/W");
  const nn::Tensor2 &b = head.value("probe/b");
  std::size_t hits = 0;
  for (std::size_t s = 0; s < n_test; ++s) {
    std::size_t best = 0;
    double best_v = -1e300;
    for (std::size_t c = 0; c < classes; ++c) {
      double v = b(0, c);
      for (std::size_t j = 0; j < dim; ++j) v += test_x(s, j) * w(j, c);
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    const std::string &truth = class_names[test_y[s]];
    metrics.test_support[truth] += 1;
    if (static_cast<int>(best) == test_y[s]) {
      ++hits;
      correct[truth] += 1;
    }
  }
  metrics.accuracy = static_cast<double>(hits) / static_cast<double>(n_test);
  for (const auto &name : class_names) {
    const std::size_t sup = metrics.test_support[name];
    metrics.per_class_accuracy[name] =
        sup == 0 ? 0.0
                 : static_cast<double>(correct[name]) /
                       static_cast<double>(sup);
  }
  return metrics;
}

ProbeMetrics linear_probe(const std::vector<chem::MolecularGraph> &mols,
                          const std::vector<std::string> &labels,
                          const nn::ParamStore &frozen, const SslConfig &cfg) {
  validate_config(cfg);
  if (mols.size() != labels.size())
    throw InputError("linear_probe: molecule and label counts differ");
  if (mols.size() < 2)
    throw InputError("linear_probe: need at least two molecules");

  std::vector<std::string> class_names(labels);
  std::sort(class_names.begin(), class_names.end());
  class_names.erase(std::unique(class_names.begin(), class_names.end()),
                    class_names.end());
  if (class_names.size() < 2)
    throw InputError("linear_probe: dataset has a single class");

  const std::uint64_t sum_before = nn::checksum(frozen);

  std::vector<std::vector<double>> vectors(mols.size());
  for (std::size_t i = 0; i < mols.size(); ++i)
    vectors[i] = enc::encode_original(mols[i], frozen, "orig", cfg.encoder,
                                      cfg.features)
                     .graph_vector;

  // Stratified 80/20: per class, shuffle then hold out floor(n/5).
  Rng split_rng(hash_mix(cfg.seed, fnv1a("probe-split")));
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == class_names[c]) members.push_back(i);
    split_rng.shuffle(members);
    const std::size_t held = members.size() / 5;
    for (std::size_t k = 0; k < members.size(); ++k)
      (k < held ? test_idx : train_idx).push_back(members[k]);
  }
  if (test_idx.empty())
    throw InputError("linear_probe: held-out split is empty");

  auto class_of = [&](std::size_t i) {
    return static_cast<int>(std::lower_bound(class_names.begin(),
                                             class_names.end(), labels[i]) -
                            class_names.begin());
  };
  const std::size_t dim = vectors.front().size();
  nn::Tensor2 train_x(train_idx.size(), dim), test_x(test_idx.size(), dim);
  std::vector<int> train_y, test_y;
  for (std::size_t r = 0; r < train_idx.size(); ++r) {
    for (std::size_t j = 0; j < dim; ++j)
      train_x(r, j) = vectors[train_idx[r]][j];
    train_y.push_back(class_of(train_idx[r]));
  }
  for (std::size_t r = 0; r < test_idx.size(); ++r) {
    for (std::size_t j = 0; j < dim; ++j)
      test_x(r, j) = vectors[test_idx[r]][j];
    test_y.push_back(class_of(test_idx[r]));
  }

  ProbeMetrics metrics =
      train_probe_head(train_x, train_y, test_x, test_y, class_names);

  if (nn::checksum(frozen) != sum_before)
    throw InternalError("linear_probe: frozen parameters changed");
  return metrics;
}

}  // namespace kgmol::ssl
