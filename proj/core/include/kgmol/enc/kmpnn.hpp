//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_ENC_KMPNN_HPP
#define KGMOL_ENC_KMPNN_HPP

#include <string>
#include <vector>

#include "kgmol/enc/features.hpp"
#include "kgmol/hetero/hetero.hpp"
#include "kgmol/nn/param_store.hpp"
#include "kgmol/rng.hpp"

namespace kgmol::enc {

struct EncoderConfig {
  std::size_t layers = 3;
  std::size_t hidden = 64;   // must equal the feature node_dim
  std::size_t out_dim = 64;  // graph vector length
  double leaky_slope = 0.2;
};

/// Message-passing edge kinds, keyed by receiver/sender node kinds:
///   a  = atom <- atom (bonds, both directions)
///   p  = atom <- property (prop_of direction)
///   m  = moiety <- moiety (relation edges, both directions)
///   am = atom <- moiety (part_of expansion)
///   ma = moiety <- atom (part_of expansion)
const std::vector<std::string> &all_edge_kind_keys();

/// The kinds present in one graph, in canonical order.
std::vector<std::string> edge_kind_keys(const hetero::HeteroGraph &hg);

/// Kinds an encoder must own per graph family: "original" {a},
/// "element_kg" {a,p}, "fg_kg" {a,m,am,ma}, "composed" all five.
std::vector<std::string> kinds_for_mode(const std::string &mode);

/// Registers one encoder under `prefix`: per kind a message block
/// {prefix}/msg_{k}/W of shape (hidden+edge_dim) x hidden and an attention
/// vector {prefix}/att_{k} of shape 1 x 2*hidden; a shared GRU block
/// {prefix}/gru/{Wz,Uz,bz,Wr,Ur,br,Wc,Uc,bc}; and a readout projection
/// {prefix}/readout/{W,b}. Weights Xavier-uniform, biases zero.
void init_encoder_params(nn::ParamStore &store, const std::string &prefix,
                         const std::vector<std::string> &kinds,
                         std::size_t edge_dim, const EncoderConfig &cfg,
                         Rng &rng);

/// One directed message edge: node `src` sends to node `dst` through the
/// block `kind` (index into kind_keys) using stored edge `feat`.
struct MsgEdge {
  int src = 0;
  int dst = 0;
  int kind = 0;
  int feat = 0;
};

struct LayerCache {
  nn::Tensor2 h_in;
  nn::Tensor2 messages;       // per msg edge
  std::vector<double> score;  // pre-activation attention logits
  std::vector<double> alpha;  // softmax weights (sum to 1 per receiver)
  nn::Tensor2 s;              // per-node aggregates
  nn::Tensor2 z, r, c;        // GRU gates, valid where updated
  std::vector<char> updated;
};

struct KmpnnCache {
  std::vector<std::string> kind_keys;
  std::vector<MsgEdge> msg_edges;
  std::vector<std::vector<int>> in_edges;  // node -> msg edge indices
  std::vector<hetero::NodeKind> node_kinds;
  std::vector<int> atom_nodes;
  FeatureAssignment feats;
  std::vector<LayerCache> layers;
  nn::Tensor2 h_final;
  std::vector<double> pooled;  // mean over atom nodes
};

struct EncodeResult {
  std::vector<double> graph_vector;
  nn::Tensor2 node_states;
};

/// L recurrent rounds of kind-wise attention message passing with a gated
/// update, then readout. A node whose aggregate is exactly zero (no
/// in-edges, or all-zero messages) keeps its state, which makes states
/// topology-independent under all-zero message weights.
/// Throws InternalError when a needed edge-kind block is missing from the
/// store.
EncodeResult kmpnn_forward(const hetero::HeteroGraph &hg,
                           const FeatureAssignment &feats,
                           const nn::ParamStore &params,
                           const std::string &prefix, const EncoderConfig &cfg,
                           KmpnnCache *cache = nullptr);

/// Accumulates d(loss)/d(params) into the store's gradient buffers given
/// d(loss)/d(graph_vector). Must be called with the cache produced by the
/// matching forward pass.
void kmpnn_backward(const KmpnnCache &cache, nn::ParamStore &params,
                    const std::string &prefix, const EncoderConfig &cfg,
                    const std::vector<double> &d_graph_vector);

/// Mean over atom-node states followed by the readout projection.
/// Throws InputError when the graph has no atom nodes.
std::vector<double> readout(const nn::Tensor2 &node_states,
                            const std::vector<hetero::NodeKind> &node_kinds,
                            const nn::ParamStore &params,
                            const std::string &prefix);

/// Plain encoder for unaugmented molecules: bond edges only, own parameter
/// set under `prefix` (no sharing with an augmented-graph encoder).
EncodeResult encode_original(const chem::MolecularGraph &g,
                             const nn::ParamStore &params,
                             const std::string &prefix,
                             const EncoderConfig &cfg,
                             const FeatureConfig &fcfg,
                             KmpnnCache *cache = nullptr);

}  // namespace kgmol::enc

#endif  // KGMOL_ENC_KMPNN_HPP
