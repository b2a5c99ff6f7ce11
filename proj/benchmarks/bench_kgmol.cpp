//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: SMILES parsing, graph augmentation,
// moiety detection, encoder forward passes, the contrastive loss, and the
// KGE scorers. Each fixture is built once and reused across iterations.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "kgmol/chem/molecule.hpp"
#include "kgmol/chem/smiles.hpp"
#include "kgmol/enc/features.hpp"
#include "kgmol/enc/kmpnn.hpp"
#include "kgmol/hetero/hetero.hpp"
#include "kgmol/kg/triples.hpp"
#include "kgmol/kge/kge.hpp"
#include "kgmol/moiety/moiety.hpp"
#include "kgmol/moiety/pattern.hpp"
#include "kgmol/nn/param_store.hpp"
#include "kgmol/nn/tensor.hpp"
#include "kgmol/rng.hpp"
#include "kgmol/ssl/ssl.hpp"

namespace {

using namespace kgmol;

constexpr const char *kAspirin = "CC(=O)Oc1ccccc1C(=O)O";

const kg::KnowledgeGraph &element_kg() {
  static kg::KnowledgeGraph graph =
      kg::load_triples(std::string(KGMOL_DATA_DIR) + "/sample_element_kg.tsv");
  return graph;
}

struct EncoderFixture {
  hetero::HeteroGraph hg;
  enc::FeatureAssignment feats;
  enc::EncoderConfig cfg;
  nn::ParamStore store;

  EncoderFixture() {
    auto g = chem::parse_smiles(kAspirin, "aspirin");
    auto ms = moiety::detect_moieties(g, moiety::builtin_patterns());
    hg = hetero::augment_composed(g, element_kg(), ms.moieties, ms.relations);
    enc::FeatureConfig fcfg;
    fcfg.node_dim = 24;
    feats = enc::init_node_features(hg, nullptr, fcfg);
    cfg.hidden = 24;
    cfg.out_dim = 16;
    Rng rng(7);
    enc::init_encoder_params(store, "enc", enc::kinds_for_mode("composed"),
                             feats.edge_dim, cfg, rng);
  }
};

const EncoderFixture &encoder_fixture() {
  static EncoderFixture fx;
  return fx;
}

void BM_ParseSmiles(benchmark::State &state) {
  for (auto _ : state) {
    auto g = chem::parse_smiles(kAspirin, "aspirin");
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_ParseSmiles);

void BM_ElementAugment(benchmark::State &state) {
  auto g = chem::parse_smiles(kAspirin, "aspirin");
  const auto &graph = element_kg();
  for (auto _ : state) {
    auto hg = hetero::augment_with_element_kg(g, graph);
    benchmark::DoNotOptimize(hg);
  }
}
BENCHMARK(BM_ElementAugment);

void BM_DetectMoieties(benchmark::State &state) {
  auto g = chem::parse_smiles(kAspirin, "aspirin");
  const auto &lib = moiety::builtin_patterns();
  for (auto _ : state) {
    auto ms = moiety::detect_moieties(g, lib);
    benchmark::DoNotOptimize(ms);
  }
}
BENCHMARK(BM_DetectMoieties);

void BM_KmpnnForward(benchmark::State &state) {
  const auto &fx = encoder_fixture();
  for (auto _ : state) {
    auto res = enc::kmpnn_forward(fx.hg, fx.feats, fx.store, "enc", fx.cfg);
    benchmark::DoNotOptimize(res.graph_vector);
  }
}
BENCHMARK(BM_KmpnnForward);

void BM_KmpnnBackward(benchmark::State &state) {
  auto fx = encoder_fixture();
  std::vector<double> probe(fx.cfg.out_dim, 0.5);
  for (auto _ : state) {
    enc::KmpnnCache cache;
    enc::kmpnn_forward(fx.hg, fx.feats, fx.store, "enc", fx.cfg, &cache);
    fx.store.zero_grad();
    enc::kmpnn_backward(cache, fx.store, "enc", fx.cfg, probe);
    benchmark::DoNotOptimize(fx.store);
  }
}
BENCHMARK(BM_KmpnnBackward);

void BM_NtxentLoss(benchmark::State &state) {
  const std::size_t pairs = 32, d = 32;
  Rng rng(11);
  nn::Tensor2 z(2 * pairs, d);
  for (auto &v : z.data()) v = rng.normal();
  std::vector<std::size_t> pairing(2 * pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    pairing[2 * i] = 2 * i + 1;
    pairing[2 * i + 1] = 2 * i;
  }
  for (auto _ : state) {
    auto res = ssl::ntxent_loss(z, pairing, 0.5);
    benchmark::DoNotOptimize(res.loss);
  }
}
BENCHMARK(BM_NtxentLoss);

void BM_KgeScoreGrad(benchmark::State &state) {
  kge::KgeConfig cfg;
  cfg.model = kge::KgeModel::RotatE;
  cfg.dim = 64;
  cfg.seed = 3;
  auto emb = kge::init_embeddings(element_kg(), cfg);
  const auto &t = element_kg().triples.front();
  for (auto _ : state) {
    auto g = kge::score_triple_with_grad(cfg.model, emb, t);
    benchmark::DoNotOptimize(g.score);
  }
}
BENCHMARK(BM_KgeScoreGrad);

}  // namespace

BENCHMARK_MAIN();
