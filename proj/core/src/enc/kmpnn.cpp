//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/enc/kmpnn.hpp"

#include <algorithm>
#include <cmath>

#include "kgmol/errors.hpp"

namespace kgmol::enc {

namespace {

std::string msg_name(const std::string &prefix, const std::string &kind) {
  return prefix + "/msg_" + kind + "/W";
}
std::string att_name(const std::string &prefix, const std::string &kind) {
  return prefix + "/att_" + kind;
}
std::string gru_name(const std::string &prefix, const char *part) {
  return prefix + "/gru/" + part;
}
std::string readout_name(const std::string &prefix, const char *part) {
  return prefix + "/readout/" + part;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void build_structure(const hetero::HeteroGraph &hg, KmpnnCache &cache) {
  cache.node_kinds.clear();
  cache.atom_nodes.clear();
  for (const auto &n : hg.nodes) {
    cache.node_kinds.push_back(n.kind);
    if (n.kind == hetero::NodeKind::Atom) cache.atom_nodes.push_back(n.id);
  }

  std::vector<std::pair<std::string, MsgEdge>> raw;
  for (std::size_t i = 0; i < hg.edges.size(); ++i) {
    const auto &e = hg.edges[i];
    const int fi = static_cast<int>(i);
    switch (e.kind) {
      case hetero::EdgeKind::Bond:
        raw.push_back({"a", {e.src, e.dst, 0, fi}});
        raw.push_back({"a", {e.dst, e.src, 0, fi}});
        break;
      case hetero::EdgeKind::PropOf:
        raw.push_back({"p", {e.src, e.dst, 0, fi}});
        break;
      case hetero::EdgeKind::PartOf:
        raw.push_back({"am", {e.src, e.dst, 0, fi}});
        raw.push_back({"ma", {e.dst, e.src, 0, fi}});
        break;
      default:  // moiety-moiety relation edges
        raw.push_back({"m", {e.src, e.dst, 0, fi}});
        raw.push_back({"m", {e.dst, e.src, 0, fi}});
        break;
    }
  }

  cache.kind_keys.clear();
  for (const auto &key : all_edge_kind_keys())
    for (const auto &[k, edge] : raw)
      if (k == key) {
        cache.kind_keys.push_back(key);
        break;
      }

  cache.msg_edges.clear();
  for (auto &[k, edge] : raw) {
    auto it = std::find(cache.kind_keys.begin(), cache.kind_keys.end(), k);
    edge.kind = static_cast<int>(it - cache.kind_keys.begin());
    cache.msg_edges.push_back(edge);
  }

  cache.in_edges.assign(hg.nodes.size(), {});
  for (std::size_t i = 0; i < cache.msg_edges.size(); ++i)
    cache.in_edges[cache.msg_edges[i].dst].push_back(static_cast<int>(i));
}

std::vector<double> pooled_mean(const nn::Tensor2 &states,
                                const std::vector<int> &atom_nodes) {
  if (atom_nodes.empty())
    throw InputError("readout: graph has no atom nodes");
  std::vector<double> pooled(states.cols(), 0.0);
  for (int a : atom_nodes)
    for (std::size_t j = 0; j < states.cols(); ++j) pooled[j] += states(a, j);
  for (auto &x : pooled) x /= static_cast<double>(atom_nodes.size());
  return pooled;
}

std::vector<double> project_pooled(const std::vector<double> &pooled,
                                   const nn::ParamStore &params,
                                   const std::string &prefix) {
  const nn::Tensor2 &w = params.value(readout_name(prefix, "W"));
  const nn::Tensor2 &b = params.value(readout_name(prefix, "b"));
  if (w.rows() != pooled.size() || b.cols() != w.cols())
    throw InternalError("readout: projection shape mismatch");
  std::vector<double> out(w.cols(), 0.0);
  for (std::size_t j = 0; j < w.cols(); ++j) {
    double s = b(0, j);
    for (std::size_t i = 0; i < pooled.size(); ++i) s += pooled[i] * w(i, j);
    out[j] = s;
  }
  nn::check_finite(out, "readout");
  return out;
}

}  // namespace

const std::vector<std::string> &all_edge_kind_keys() {
  static const std::vector<std::string> kKeys = {"a", "p", "m", "am", "ma"};
  return kKeys;
}

std::vector<std::string> edge_kind_keys(const hetero::HeteroGraph &hg) {
  KmpnnCache scratch;
  build_structure(hg, scratch);
  return scratch.kind_keys;
}

std::vector<std::string> kinds_for_mode(const std::string &mode) {
  if (mode == "original") return {"a"};
  if (mode == "element_kg") return {"a", "p"};
  if (mode == "fg_kg") return {"a", "m", "am", "ma"};
  if (mode == "composed") return {"a", "p", "m", "am", "ma"};
  throw InputError("unknown encoder mode: " + mode);
}

void init_encoder_params(nn::ParamStore &store, const std::string &prefix,
                         const std::vector<std::string> &kinds,
                         std::size_t edge_dim, const EncoderConfig &cfg,
                         Rng &rng) {
  const std::size_t d = cfg.hidden;
  for (const auto &k : kinds) {
    store.add(msg_name(prefix, k),
              nn::xavier_uniform(d + edge_dim, d, rng));
    store.add(att_name(prefix, k), nn::xavier_uniform(1, 2 * d, rng));
  }
  for (const char *gate : {"Wz", "Wr", "Wc", "Uz", "Ur", "Uc"})
    store.add(gru_name(prefix, gate), nn::xavier_uniform(d, d, rng));
  for (const char *bias : {"bz", "br", "bc"})
    store.add(gru_name(prefix, bias), nn::Tensor2(1, d));
  store.add(readout_name(prefix, "W"),
            nn::xavier_uniform(d, cfg.out_dim, rng));
  store.add(readout_name(prefix, "b"), nn::Tensor2(1, cfg.out_dim));
}

EncodeResult kmpnn_forward(const hetero::HeteroGraph &hg,
                           const FeatureAssignment &feats,
                           const nn::ParamStore &params,
                           const std::string &prefix, const EncoderConfig &cfg,
                           KmpnnCache *cache) {
  if (feats.node_dim != cfg.hidden)
    throw InternalError("kmpnn_forward: feature node_dim != hidden dim");
  if (feats.node_features.size() != hg.nodes.size() ||
      feats.edge_features.size() != hg.edges.size())
    throw InternalError("kmpnn_forward: feature assignment does not match graph");

  KmpnnCache local;
  KmpnnCache &cc = cache ? *cache : local;
  cc = KmpnnCache{};
  build_structure(hg, cc);
  cc.feats = feats;

  for (const auto &k : cc.kind_keys)
    if (!params.has(msg_name(prefix, k)) || !params.has(att_name(prefix, k)))
      throw InternalError("kmpnn_forward: missing edge-kind block '" + k +
                          "' under " + prefix);
  for (const char *part : {"Wz", "Uz", "bz", "Wr", "Ur", "br", "Wc", "Uc",
                           "bc"})
    if (!params.has(gru_name(prefix, part)))
      throw InternalError("kmpnn_forward: missing GRU block under " + prefix);

  const std::size_t n = hg.nodes.size();
  const std::size_t d = cfg.hidden;
  const std::size_t ne = cc.msg_edges.size();

  nn::Tensor2 h(n, d);
  for (std::size_t v = 0; v < n; ++v) {
    if (feats.node_features[v].size() != d)
      throw InternalError("kmpnn_forward: node feature length mismatch");
    for (std::size_t j = 0; j < d; ++j) h(v, j) = feats.node_features[v][j];
  }

  const nn::Tensor2 &wz = params.value(gru_name(prefix, "Wz"));
  const nn::Tensor2 &uz = params.value(gru_name(prefix, "Uz"));
  const nn::Tensor2 &bz = params.value(gru_name(prefix, "bz"));
  const nn::Tensor2 &wr = params.value(gru_name(prefix, "Wr"));
  const nn::Tensor2 &ur = params.value(gru_name(prefix, "Ur"));
  const nn::Tensor2 &br = params.value(gru_name(prefix, "br"));
  const nn::Tensor2 &wc = params.value(gru_name(prefix, "Wc"));
  const nn::Tensor2 &uc = params.value(gru_name(prefix, "Uc"));
  const nn::Tensor2 &bc = params.value(gru_name(prefix, "bc"));

  for (std::size_t layer = 0; layer < cfg.layers; ++layer) {
    LayerCache lc;
    lc.h_in = h;
    lc.messages = nn::Tensor2(ne, d);
    lc.score.assign(ne, 0.0);
    lc.alpha.assign(ne, 0.0);
    lc.s = nn::Tensor2(n, d);
    lc.z = nn::Tensor2(n, d);
    lc.r = nn::Tensor2(n, d);
    lc.c = nn::Tensor2(n, d);
    lc.updated.assign(n, 0);

    for (std::size_t e = 0; e < ne; ++e) {
      const MsgEdge &me = cc.msg_edges[e];
      const nn::Tensor2 &w =
          params.value(msg_name(prefix, cc.kind_keys[me.kind]));
      const auto &x = feats.edge_features[me.feat];
      if (w.rows() != d + x.size() || w.cols() != d)
        throw InternalError("kmpnn_forward: message block shape mismatch");
      for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < d; ++i) m += h(me.src, i) * w(i, j);
        for (std::size_t k = 0; k < x.size(); ++k)
          m += x[k] * w(d + k, j);
        lc.messages(e, j) = m;
      }
    }

    nn::Tensor2 h_next(n, d);
    for (std::size_t v = 0; v < n; ++v) {
      const auto &incoming = cc.in_edges[v];
      if (!incoming.empty()) {
        double tmax = -1e300;
        std::vector<double> act(incoming.size());
        for (std::size_t k = 0; k < incoming.size(); ++k) {
          const int e = incoming[k];
          const nn::Tensor2 &att = params.value(
              att_name(prefix, cc.kind_keys[cc.msg_edges[e].kind]));
          double q = 0.0;
          for (std::size_t i = 0; i < d; ++i) q += att(0, i) * h(v, i);
          for (std::size_t i = 0; i < d; ++i)
            q += att(0, d + i) * lc.messages(e, i);
          lc.score[e] = q;
          act[k] = q > 0.0 ? q : cfg.leaky_slope * q;
          tmax = std::max(tmax, act[k]);
        }
        double denom = 0.0;
        for (std::size_t k = 0; k < incoming.size(); ++k) {
          act[k] = std::exp(act[k] - tmax);
          denom += act[k];
        }
        for (std::size_t k = 0; k < incoming.size(); ++k) {
          const int e = incoming[k];
          lc.alpha[e] = act[k] / denom;
          for (std::size_t j = 0; j < d; ++j)
            lc.s(v, j) += lc.alpha[e] * lc.messages(e, j);
        }
      }

      bool has_signal = false;
      for (std::size_t j = 0; j < d && !has_signal; ++j)
        if (lc.s(v, j) != 0.0) has_signal = true;

      if (!has_signal) {
        for (std::size_t j = 0; j < d; ++j) h_next(v, j) = h(v, j);
        continue;
      }
      lc.updated[v] = 1;
      for (std::size_t j = 0; j < d; ++j) {
        double gz = bz(0, j), gr = br(0, j);
        for (std::size_t i = 0; i < d; ++i) {
          gz += lc.s(v, i) * wz(i, j) + h(v, i) * uz(i, j);
          gr += lc.s(v, i) * wr(i, j) + h(v, i) * ur(i, j);
        }
        lc.z(v, j) = sigmoid(gz);
        lc.r(v, j) = sigmoid(gr);
      }
      for (std::size_t j = 0; j < d; ++j) {
        double gc = bc(0, j);
        for (std::size_t i = 0; i < d; ++i)
          gc += lc.s(v, i) * wc(i, j) + lc.r(v, i) * h(v, i) * uc(i, j);
        lc.c(v, j) = std::tanh(gc);
        h_next(v, j) =
            (1.0 - lc.z(v, j)) * h(v, j) + lc.z(v, j) * lc.c(v, j);
      }
    }
    h = std::move(h_next);
    nn::check_finite(h, "kmpnn_forward layer update");
    cc.layers.push_back(std::move(lc));
  }

  cc.h_final = h;
  cc.pooled = pooled_mean(h, cc.atom_nodes);

  EncodeResult result;
  result.graph_vector = project_pooled(cc.pooled, params, prefix);
  result.node_states = cc.h_final;
  return result;
}

void kmpnn_backward(const KmpnnCache &cache, nn::ParamStore &params,
                    const std::string &prefix, const EncoderConfig &cfg,
                    const std::vector<double> &d_graph_vector) {
  const std::size_t n = cache.node_kinds.size();
  const std::size_t d = cfg.hidden;
  const std::size_t ne = cache.msg_edges.size();
  if (cache.layers.size() != cfg.layers)
    throw InternalError("kmpnn_backward: cache layer count mismatch");

  // Readout backward.
  const nn::Tensor2 &w_read = params.value(readout_name(prefix, "W"));
  nn::Tensor2 &g_wread = params.grad(readout_name(prefix, "W"));
  nn::Tensor2 &g_bread = params.grad(readout_name(prefix, "b"));
  if (d_graph_vector.size() != w_read.cols())
    throw InternalError("kmpnn_backward: gradient length mismatch");

  std::vector<double> dpooled(d, 0.0);
  for (std::size_t j = 0; j < w_read.cols(); ++j) {
    g_bread(0, j) += d_graph_vector[j];
    for (std::size_t i = 0; i < d; ++i) {
      g_wread(i, j) += cache.pooled[i] * d_graph_vector[j];
      dpooled[i] += d_graph_vector[j] * w_read(i, j);
    }
  }

  nn::Tensor2 dh(n, d);
  const double inv_atoms = 1.0 / static_cast<double>(cache.atom_nodes.size());
  for (int a : cache.atom_nodes)
    for (std::size_t i = 0; i < d; ++i) dh(a, i) += dpooled[i] * inv_atoms;

  const nn::Tensor2 &wz = params.value(gru_name(prefix, "Wz"));
  const nn::Tensor2 &uz = params.value(gru_name(prefix, "Uz"));
  const nn::Tensor2 &wr = params.value(gru_name(prefix, "Wr"));
  const nn::Tensor2 &ur = params.value(gru_name(prefix, "Ur"));
  const nn::Tensor2 &wc = params.value(gru_name(prefix, "Wc"));
  const nn::Tensor2 &uc = params.value(gru_name(prefix, "Uc"));
  nn::Tensor2 &g_wz = params.grad(gru_name(prefix, "Wz"));
  nn::Tensor2 &g_uz = params.grad(gru_name(prefix, "Uz"));
  nn::Tensor2 &g_bz = params.grad(gru_name(prefix, "bz"));
  nn::Tensor2 &g_wr = params.grad(gru_name(prefix, "Wr"));
  nn::Tensor2 &g_ur = params.grad(gru_name(prefix, "Ur"));
  nn::Tensor2 &g_br = params.grad(gru_name(prefix, "br"));
  nn::Tensor2 &g_wc = params.grad(gru_name(prefix, "Wc"));
  nn::Tensor2 &g_uc = params.grad(gru_name(prefix, "Uc"));
  nn::Tensor2 &g_bc = params.grad(gru_name(prefix, "bc"));

  for (std::size_t layer = cache.layers.size(); layer-- > 0;) {
    const LayerCache &lc = cache.layers[layer];
    nn::Tensor2 dh_in(n, d);
    nn::Tensor2 ds(n, d);
    nn::Tensor2 dm(ne, d);

    std::vector<double> dz(d), dc(d), dgc(d), drh(d), dr(d), dgz(d), dgr(d);
    for (std::size_t v = 0; v < n; ++v) {
      if (!lc.updated[v]) {
        for (std::size_t j = 0; j < d; ++j) dh_in(v, j) += dh(v, j);
        continue;
      }
      for (std::size_t j = 0; j < d; ++j) {
        const double dhp = dh(v, j);
        dz[j] = dhp * (lc.c(v, j) - lc.h_in(v, j));
        dc[j] = dhp * lc.z(v, j);
        dh_in(v, j) += dhp * (1.0 - lc.z(v, j));
        dgc[j] = dc[j] * (1.0 - lc.c(v, j) * lc.c(v, j));
        dgz[j] = dz[j] * lc.z(v, j) * (1.0 - lc.z(v, j));
      }
      for (std::size_t i = 0; i < d; ++i) {
        double acc_s = 0.0, acc_rh = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          acc_s += dgc[j] * wc(i, j);
          acc_rh += dgc[j] * uc(i, j);
        }
        ds(v, i) += acc_s;
        drh[i] = acc_rh;
        dr[i] = acc_rh * lc.h_in(v, i);
        dh_in(v, i) += acc_rh * lc.r(v, i);
      }
      for (std::size_t j = 0; j < d; ++j)
        dgr[j] = dr[j] * lc.r(v, j) * (1.0 - lc.r(v, j));
      for (std::size_t i = 0; i < d; ++i) {
        double acc_sz = 0.0, acc_hz = 0.0, acc_sr = 0.0, acc_hr = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          acc_sz += dgz[j] * wz(i, j);
          acc_hz += dgz[j] * uz(i, j);
          acc_sr += dgr[j] * wr(i, j);
          acc_hr += dgr[j] * ur(i, j);
        }
        ds(v, i) += acc_sz + acc_sr;
        dh_in(v, i) += acc_hz + acc_hr;
      }
      for (std::size_t i = 0; i < d; ++i) {
        const double s_i = lc.s(v, i);
        const double h_i = lc.h_in(v, i);
        const double rh_i = lc.r(v, i) * h_i;
        for (std::size_t j = 0; j < d; ++j) {
          g_wz(i, j) += s_i * dgz[j];
          g_uz(i, j) += h_i * dgz[j];
          g_wr(i, j) += s_i * dgr[j];
          g_ur(i, j) += h_i * dgr[j];
          g_wc(i, j) += s_i * dgc[j];
          g_uc(i, j) += rh_i * dgc[j];
        }
      }
      for (std::size_t j = 0; j < d; ++j) {
        g_bz(0, j) += dgz[j];
        g_br(0, j) += dgr[j];
        g_bc(0, j) += dgc[j];
      }
    }

    // Attention and aggregation backward.
    for (std::size_t v = 0; v < n; ++v) {
      if (!lc.updated[v]) continue;
      const auto &incoming = cache.in_edges[v];
      std::vector<double> dalpha(incoming.size(), 0.0);
      double sumterm = 0.0;
      for (std::size_t k = 0; k < incoming.size(); ++k) {
        const int e = incoming[k];
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          acc += ds(v, j) * lc.messages(e, j);
          dm(e, j) += lc.alpha[e] * ds(v, j);
        }
        dalpha[k] = acc;
        sumterm += lc.alpha[e] * acc;
      }
      for (std::size_t k = 0; k < incoming.size(); ++k) {
        const int e = incoming[k];
        const double dt = lc.alpha[e] * (dalpha[k] - sumterm);
        const double dq =
            dt * (lc.score[e] > 0.0 ? 1.0 : cfg.leaky_slope);
        if (dq == 0.0) continue;
        const std::string kind = cache.kind_keys[cache.msg_edges[e].kind];
        const nn::Tensor2 &att = params.value(att_name(prefix, kind));
        nn::Tensor2 &g_att = params.grad(att_name(prefix, kind));
        for (std::size_t i = 0; i < d; ++i) {
          g_att(0, i) += dq * lc.h_in(v, i);
          dh_in(v, i) += dq * att(0, i);
          g_att(0, d + i) += dq * lc.messages(e, i);
          dm(e, i) += dq * att(0, d + i);
        }
      }
    }

    // Message backward.
    for (std::size_t e = 0; e < ne; ++e) {
      const MsgEdge &me = cache.msg_edges[e];
      bool nonzero = false;
      for (std::size_t j = 0; j < d && !nonzero; ++j)
        if (dm(e, j) != 0.0) nonzero = true;
      if (!nonzero) continue;

      const std::string kind = cache.kind_keys[me.kind];
      const nn::Tensor2 &w = params.value(msg_name(prefix, kind));
      nn::Tensor2 &g_w = params.grad(msg_name(prefix, kind));
      const auto &x = cache.feats.edge_features[me.feat];
      for (std::size_t j = 0; j < d; ++j) {
        const double dmj = dm(e, j);
        if (dmj == 0.0) continue;
        for (std::size_t i = 0; i < d; ++i) {
          g_w(i, j) += lc.h_in(me.src, i) * dmj;
          dh_in(me.src, i) += w(i, j) * dmj;
        }
        for (std::size_t k = 0; k < x.size(); ++k)
          g_w(d + k, j) += x[k] * dmj;
      }
    }

    dh = std::move(dh_in);
  }
}

std::vector<double> readout(const nn::Tensor2 &node_states,
                            const std::vector<hetero::NodeKind> &node_kinds,
                            const nn::ParamStore &params,
                            const std::string &prefix) {
  if (node_states.rows() != node_kinds.size())
    throw InternalError("readout: states/kinds length mismatch");
  std::vector<int> atoms;
  for (std::size_t i = 0; i < node_kinds.size(); ++i)
    if (node_kinds[i] == hetero::NodeKind::Atom)
      atoms.push_back(static_cast<int>(i));
  return project_pooled(pooled_mean(node_states, atoms), params, prefix);
}

EncodeResult encode_original(const chem::MolecularGraph &g,
                             const nn::ParamStore &params,
                             const std::string &prefix,
                             const EncoderConfig &cfg,
                             const FeatureConfig &fcfg, KmpnnCache *cache) {
  hetero::HeteroGraph hg = hetero::hetero_from_molecule(g);
  FeatureAssignment feats = init_node_features(hg, nullptr, fcfg);
  return kmpnn_forward(hg, feats, params, prefix, cfg, cache);
}

}  // namespace kgmol::enc
