//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/enc/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "kgmol/errors.hpp"
#include "kgmol/moiety/pattern.hpp"
#include "kgmol/nn/tensor.hpp"
#include "kgmol/rng.hpp"

namespace kgmol::enc {

namespace {

constexpr std::size_t kDegreeSlots = 7;  // degrees 0..6, larger capped
constexpr std::size_t kBondSlots = 4;
constexpr std::size_t kFallbackRelLen = 8;

std::size_t atom_raw_dim() {
  return chem::supported_elements().size() + kDegreeSlots + 2;
}

/// Rebuilds the atom fields an atom node label encodes. Degree comes from
/// the graph structure, so it is counted over bond edges here.
std::vector<double> atom_raw_features(const hetero::HeteroGraph &hg, int node,
                                      const std::vector<int> &bond_degree) {
  const std::string &label = hg.nodes[node].label;
  std::string symbol = label;
  int charge = 0;
  auto sign = symbol.find_first_of("+-");
  if (sign != std::string::npos) {
    int magnitude = 1;
    if (sign + 1 < symbol.size()) magnitude = std::stoi(symbol.substr(sign + 1));
    charge = symbol[sign] == '+' ? magnitude : -magnitude;
    symbol = symbol.substr(0, sign);
  }
  bool aromatic = !symbol.empty() &&
                  std::islower(static_cast<unsigned char>(symbol[0]));
  if (aromatic) symbol[0] = static_cast<char>(std::toupper(symbol[0]));

  const auto &elements = chem::supported_elements();
  auto it = std::find(elements.begin(), elements.end(), symbol);
  if (it == elements.end())
    throw InputError("atom node label names unsupported element: " + label);

  std::vector<double> raw(atom_raw_dim(), 0.0);
  raw[static_cast<std::size_t>(it - elements.begin())] = 1.0;
  std::size_t degree =
      std::min<std::size_t>(bond_degree[node], kDegreeSlots - 1);
  raw[elements.size() + degree] = 1.0;
  raw[elements.size() + kDegreeSlots] = aromatic ? 1.0 : 0.0;
  raw[elements.size() + kDegreeSlots + 1] = static_cast<double>(charge);
  return raw;
}

std::vector<double> project(const std::vector<double> &raw,
                            const nn::Tensor2 &proj) {
  std::vector<double> out(proj.cols(), 0.0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == 0.0) continue;
    for (std::size_t j = 0; j < proj.cols(); ++j)
      out[j] += raw[i] * proj(i, j);
  }
  return out;
}

std::vector<double> seeded_vector(std::uint64_t seed, const std::string &tag,
                                  const std::string &label, std::size_t len) {
  Rng rng(hash_mix(hash_mix(seed, fnv1a(tag)), fnv1a(label)));
  std::vector<double> v(len);
  double scale = 1.0 / std::sqrt(static_cast<double>(len));
  for (auto &x : v) x = rng.normal() * scale;
  return v;
}

std::vector<double> relation_feature(const kge::EmbeddingTable &emb,
                                     const std::string &relation) {
  const auto &r = emb.relation(relation);
  if (emb.model == kge::KgeModel::RotatE) {
    std::vector<double> f(2 * r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      f[2 * i] = std::cos(r[i]);
      f[2 * i + 1] = std::sin(r[i]);
    }
    return f;
  }
  return r;
}

}  // namespace

std::vector<std::string> default_moiety_vocab() {
  std::vector<std::string> vocab;
  for (const auto &p : moiety::builtin_patterns()) vocab.push_back(p.name);
  vocab.push_back("aromatic");
  vocab.push_back("aliphatic");
  vocab.push_back("saturated_chain");
  vocab.push_back("unsaturated_chain");
  return vocab;
}

FeatureAssignment init_node_features(const hetero::HeteroGraph &hg,
                                     const kge::EmbeddingTable *emb,
                                     const FeatureConfig &cfg) {
  hetero::check_hetero(hg);
  const bool has_moiety_nodes =
      std::any_of(hg.nodes.begin(), hg.nodes.end(), [](const auto &n) {
        return n.kind == hetero::NodeKind::Moiety;
      });
  if (has_moiety_nodes && cfg.node_dim < cfg.moiety_vocab.size())
    throw InputError("node_dim smaller than the moiety vocabulary");

  const std::size_t rel_len =
      emb ? (emb->model == kge::KgeModel::RotatE ? 2 * emb->dim : emb->dim)
          : kFallbackRelLen;
  FeatureAssignment feats;
  feats.node_dim = cfg.node_dim;
  feats.edge_dim = std::max(kBondSlots, rel_len);

  std::vector<int> bond_degree(hg.nodes.size(), 0);
  for (const auto &e : hg.edges)
    if (e.kind == hetero::EdgeKind::Bond) {
      ++bond_degree[e.src];
      ++bond_degree[e.dst];
    }

  Rng atom_rng(hash_mix(cfg.seed, fnv1a("atom_proj")));
  nn::Tensor2 atom_proj =
      nn::xavier_uniform(atom_raw_dim(), cfg.node_dim, atom_rng);
  nn::Tensor2 prop_proj;
  if (emb) {
    const std::size_t ent_len =
        emb->model == kge::KgeModel::RotatE ? 2 * emb->dim : emb->dim;
    Rng prop_rng(hash_mix(cfg.seed, fnv1a("prop_proj")));
    prop_proj = nn::xavier_uniform(ent_len, cfg.node_dim, prop_rng);
  }

  feats.node_features.reserve(hg.nodes.size());
  for (const auto &node : hg.nodes) {
    switch (node.kind) {
      case hetero::NodeKind::Atom:
        feats.node_features.push_back(
            project(atom_raw_features(hg, node.id, bond_degree), atom_proj));
        break;
      case hetero::NodeKind::Property:
        if (emb)
          feats.node_features.push_back(project(emb->entity(node.label),
                                                prop_proj));
        else
          feats.node_features.push_back(
              seeded_vector(cfg.seed, "prop", node.label, cfg.node_dim));
        break;
      case hetero::NodeKind::Moiety: {
        auto it = std::find(cfg.moiety_vocab.begin(), cfg.moiety_vocab.end(),
                            node.label);
        if (it == cfg.moiety_vocab.end())
          throw InputError("moiety label not in vocabulary: " + node.label);
        std::vector<double> onehot(cfg.node_dim, 0.0);
        onehot[static_cast<std::size_t>(it - cfg.moiety_vocab.begin())] = 1.0;
        feats.node_features.push_back(std::move(onehot));
        break;
      }
    }
  }

  feats.edge_features.reserve(hg.edges.size());
  for (const auto &e : hg.edges) {
    std::vector<double> f(feats.edge_dim, 0.0);
    switch (e.kind) {
      case hetero::EdgeKind::Bond: {
        auto order = chem::bond_order_from_name(e.label);
        f[static_cast<std::size_t>(order)] = 1.0;
        break;
      }
      case hetero::EdgeKind::PropOf: {
        std::vector<double> rel =
            emb ? relation_feature(*emb, e.label)
                : seeded_vector(cfg.seed, "rel", e.label, kFallbackRelLen);
        std::copy(rel.begin(), rel.end(), f.begin());
        break;
      }
      case hetero::EdgeKind::PartOf:
        f[0] = 1.0;
        break;
      case hetero::EdgeKind::Fused:
        f[0] = 1.0;
        break;
      case hetero::EdgeKind::Connected:
        f[1] = 1.0;
        break;
      case hetero::EdgeKind::Saturated:
        f[2] = 1.0;
        break;
      case hetero::EdgeKind::Unsaturated:
        f[3] = 1.0;
        break;
    }
    feats.edge_features.push_back(std::move(f));
  }
  return feats;
}

}  // namespace kgmol::enc
