//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_ENC_FEATURES_HPP
#define KGMOL_ENC_FEATURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "kgmol/hetero/hetero.hpp"
#include "kgmol/kge/kge.hpp"

namespace kgmol::enc {

/// Type labels a moiety node may carry, in one-hot slot order.
std::vector<std::string> default_moiety_vocab();

struct FeatureConfig {
  std::size_t node_dim = 64;
  std::uint64_t seed = 42;
  std::vector<std::string> moiety_vocab = default_moiety_vocab();
};

/// Initial vectors for every node and every stored edge of a HeteroGraph.
struct FeatureAssignment {
  std::size_t node_dim = 0;
  std::size_t edge_dim = 0;
  std::vector<std::vector<double>> node_features;  // by node id
  std::vector<std::vector<double>> edge_features;  // by edge position
};

/// Assigns initial features:
///  - atom nodes: element one-hot + degree one-hot (capped at 6) + aromatic
///    flag + formal charge, through a fixed seeded projection to node_dim;
///  - property nodes: the KGE entity vector through a fixed seeded
///    projection, or a per-label seeded random vector when emb is null;
///  - moiety nodes: type-label one-hot over cfg.moiety_vocab;
///  - bond edges: order one-hot (slots 0-3);
///  - prop_of edges: the KGE relation vector (RotatE phases expand to
///    interleaved cos/sin), or a per-label seeded random vector;
///  - part_of edges: unit vector at slot 0;
///  - moiety-moiety edges: relation-label one-hot (slots 0-3).
/// edge_dim = max(4, relation feature length); relation length is 8 when
/// emb is null. Throws InputError when a property or relation label is
/// missing from a provided table, or a moiety label is not in the vocab.
FeatureAssignment init_node_features(const hetero::HeteroGraph &hg,
                                     const kge::EmbeddingTable *emb,
                                     const FeatureConfig &cfg);

}  // namespace kgmol::enc

#endif  // KGMOL_ENC_FEATURES_HPP
