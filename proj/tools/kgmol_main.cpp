//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kgmol/chem/mol_io.hpp"
#include "kgmol/chem/molecule.hpp"
#include "kgmol/chem/smiles.hpp"
#include "kgmol/errors.hpp"
#include "kgmol/hetero/hetero.hpp"
#include "kgmol/kg/triples.hpp"
#include "kgmol/kge/kge.hpp"
#include "kgmol/moiety/moiety.hpp"
#include "kgmol/nn/param_store.hpp"
#include "kgmol/ssl/ssl.hpp"

namespace {

using kgmol::InputError;
using kgmol::InternalError;

/// stdout when path is empty, otherwise the named file.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string &path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file: " + path);
    }
  }
  std::ostream &stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string normalize_mode(std::string mode) {
  for (auto &c : mode)
    if (c == '-') c = '_';
  return mode;
}

std::string trim_copy(const std::string &s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

/// key=value config lines ('#' comments), merged under explicit flags:
/// a key only applies when the matching option was not given on the
/// command line.
void apply_config_file(CLI::App *sub, const std::string &path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = trim_copy(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno) +
                       ": expected key=value");
    const std::string key = trim_copy(text.substr(0, eq));
    std::string value = trim_copy(text.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    CLI::Option *opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound &) {
      throw InputError("config line " + std::to_string(lineno) +
                       ": unknown option --" + key);
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

/// Runs fn(0..n-1), fanning out to `jobs` workers when jobs > 1. Results
/// must be written to per-index slots; the first exception is rethrown.
void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)> &fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<std::size_t>(jobs, n);
  pool.reserve(count);
  for (unsigned j = 0; j < count; ++j) pool.emplace_back(worker);
  for (auto &t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<kgmol::moiety::MoietyPattern> load_pattern_library(
    const std::string &path) {
  if (path.empty()) return kgmol::moiety::builtin_patterns();
  return kgmol::moiety::load_patterns(path);
}

/// Builds the per-mode HeteroGraph view of one molecule.
kgmol::hetero::HeteroGraph build_view(
    const std::string &mode, const kgmol::chem::MolecularGraph &g,
    const kgmol::kg::KnowledgeGraph *kg,
    const std::vector<kgmol::moiety::MoietyPattern> &patterns,
    const kgmol::hetero::AugmentOptions &options) {
  if (mode == "original") return kgmol::hetero::hetero_from_molecule(g);
  if (mode == "element_kg")
    return kgmol::hetero::augment_with_element_kg(g, *kg, options);
  if (mode == "fg_kg") {
    auto set = kgmol::moiety::detect_moieties(g, patterns);
    return kgmol::hetero::augment_with_fg_kg(g, set.moieties, set.relations);
  }
  if (mode == "composed") {
    auto set = kgmol::moiety::detect_moieties(g, patterns);
    return kgmol::hetero::augment_composed(g, *kg, set.moieties,
                                           set.relations, options);
  }
  throw InputError("unknown augmentation mode: " + mode);
}

void require_triples_for(const std::string &mode, const std::string &path) {
  if ((mode == "element_kg" || mode == "composed") && path.empty())
    throw InputError("mode " + mode + " requires --triples");
}

std::string sanitize_filename(const std::string &id) {
  std::string out;
  for (char c : id)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_')
               ? c
               : '_';
  return out.empty() ? "molecule" : out;
}

std::string metric_json(const kgmol::kge::LinkMetrics &m) {
  nlohmann::ordered_json j;
  j["mrr"] = m.mrr;
  j["hits1"] = m.hits1;
  j["hits3"] = m.hits3;
  j["hits10"] = m.hits10;
  j["queries"] = m.queries;
  return j.dump(2);
}

/// Moves ~frac of the triples to a held-out set, only picking triples whose
/// entities and relation keep at least one remaining training occurrence.
std::pair<kgmol::kg::KnowledgeGraph, kgmol::kg::KnowledgeGraph> split_holdout(
    const kgmol::kg::KnowledgeGraph &kg, double frac, std::uint64_t seed) {
  std::map<std::string, int> ent_count, rel_count;
  for (const auto &t : kg.triples) {
    ent_count[t.head] += 1;
    ent_count[t.tail] += 1;
    rel_count[t.relation] += 1;
  }
  std::vector<std::size_t> order(kg.triples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  kgmol::Rng rng(kgmol::hash_mix(seed, kgmol::fnv1a("kge-holdout")));
  rng.shuffle(order);

  const std::size_t target =
      static_cast<std::size_t>(frac * static_cast<double>(kg.triples.size()));
  std::vector<bool> held(kg.triples.size(), false);
  std::size_t taken = 0;
  for (std::size_t idx : order) {
    if (taken >= target) break;
    const auto &t = kg.triples[idx];
    if (ent_count[t.head] <= 1 || ent_count[t.tail] <= 1 ||
        rel_count[t.relation] <= 1)
      continue;
    held[idx] = true;
    ent_count[t.head] -= 1;
    ent_count[t.tail] -= 1;
    rel_count[t.relation] -= 1;
    ++taken;
  }
  std::vector<kgmol::kg::KnowledgeTriple> train, test;
  for (std::size_t i = 0; i < kg.triples.size(); ++i)
    (held[i] ? test : train).push_back(kg.triples[i]);
  return {kgmol::kg::make_knowledge_graph(train),
          kgmol::kg::make_knowledge_graph(test)};
}

std::string meta_value(const std::map<std::string, std::string> &meta,
                       const std::string &key) {
  auto it = meta.find(key);
  if (it == meta.end())
    throw InputError("checkpoint lacks pretrain metadata key: " + key);
  return it->second;
}

int run_parse(const std::string &molecules, const std::string &out,
              bool summary) {
  const auto records = kgmol::chem::read_molecule_file(molecules);
  OutputTarget target(out);
  for (const auto &rec : records) {
    if (summary) {
      target.stream() << rec.graph.id << "\t" << rec.graph.atoms.size()
                      << "\t" << rec.graph.bonds.size() << "\t"
                      << kgmol::chem::component_count(rec.graph) << "\t"
                      << kgmol::chem::graph_signature(rec.graph) << "\n";
    } else {
      target.stream() << kgmol::hetero::to_json(
                             kgmol::hetero::hetero_from_molecule(rec.graph))
                      << "\n";
    }
  }
  std::cerr << "parsed " << records.size() << " molecule(s)\n";
  return 0;
}

int run_validate_kg(const std::string &triples, const std::string &out) {
  const auto kg = kgmol::kg::load_triples(triples);
  const auto report = kgmol::kg::validate_element_kg(kg);
  OutputTarget target(out);
  target.stream() << report.to_text();
  if (!report.valid()) {
    std::cerr << "validation failed: " << report.findings.size()
              << " finding(s)\n";
    return 1;
  }
  return 0;
}

int run_kge_train(const std::string &triples, const std::string &model,
                  std::size_t dim, std::size_t steps, double lr, double margin,
                  std::size_t negatives, double holdout, std::uint64_t seed,
                  const std::string &out, const std::string &report) {
  kgmol::kge::KgeConfig cfg;
  cfg.model = kgmol::kge::model_from_name(model);
  cfg.dim = dim;
  cfg.steps = steps;
  cfg.learning_rate = lr;
  cfg.margin = margin;
  cfg.negatives_per_positive = negatives;
  cfg.seed = seed;
  cfg.validate();
  if (holdout < 0.0 || holdout >= 1.0)
    throw InputError("--holdout must be in [0, 1)");

  const auto kg = kgmol::kg::load_triples(triples);
  kgmol::kg::KnowledgeGraph train = kg, test;
  if (holdout > 0.0) {
    auto split = split_holdout(kg, holdout, seed);
    train = std::move(split.first);
    test = std::move(split.second);
    std::cerr << "holdout: " << test.triples.size() << " of "
              << kg.triples.size() << " triples\n";
  }

  const auto observer = [&](std::size_t step, double loss,
                            const kgmol::kge::EmbeddingTable &) {
    if ((step + 1) % 500 == 0 || step + 1 == cfg.steps)
      std::cerr << "step " << (step + 1) << " loss " << loss << "\n";
  };
  const auto emb = kgmol::kge::train_embeddings(train, cfg, observer);
  kgmol::kge::save_embeddings(emb, out);
  std::cerr << "wrote checkpoint: " << out << "\n";

  if (!test.triples.empty()) {
    const auto metrics =
        kgmol::kge::evaluate_link_prediction(test, emb, cfg.model, &kg);
    OutputTarget target(report);
    target.stream() << metric_json(metrics) << "\n";
  }
  return 0;
}

int run_detect_moieties(const std::string &molecules,
                        const std::string &patterns, const std::string &out) {
  const auto records = kgmol::chem::read_molecule_file(molecules);
  const auto lib = load_pattern_library(patterns);
  OutputTarget target(out);
  for (const auto &rec : records) {
    const auto set = kgmol::moiety::detect_moieties(rec.graph, lib);
    for (const auto &line :
         kgmol::moiety::emit_fg_records(rec.graph.id, set.moieties,
                                        set.relations))
      target.stream() << line << "\n";
  }
  return 0;
}

int run_augment(const std::string &mode_in, const std::string &molecules,
                const std::string &triples, const std::string &patterns,
                const std::string &out, bool dup_properties, bool compose,
                unsigned jobs) {
  std::string mode = normalize_mode(mode_in);
  if (compose) mode = "composed";
  require_triples_for(mode, triples);

  const auto records = kgmol::chem::read_molecule_file(molecules);
  kgmol::kg::KnowledgeGraph kg;
  if (!triples.empty()) kg = kgmol::kg::load_triples(triples);
  const auto lib = load_pattern_library(patterns);
  kgmol::hetero::AugmentOptions options;
  options.duplicate_properties = dup_properties;

  std::vector<std::string> lines(records.size());
  parallel_for(records.size(), jobs, [&](std::size_t i) {
    lines[i] = kgmol::hetero::to_json(
        build_view(mode, records[i].graph, &kg, lib, options));
  });

  OutputTarget target(out);
  for (const auto &line : lines) target.stream() << line << "\n";
  std::cerr << "augmented " << records.size() << " molecule(s), mode " << mode
            << "\n";
  return 0;
}

int run_pretrain(const std::string &molecules, const std::string &mode_in,
                 const std::string &triples, const std::string &patterns,
                 const std::string &kge_path, const kgmol::ssl::SslConfig &base,
                 std::uint64_t seed, bool dup_properties,
                 const std::string &out, const std::string &log_path) {
  kgmol::ssl::SslConfig cfg = base;
  cfg.mode = normalize_mode(mode_in);
  cfg.seed = seed;
  cfg.duplicate_properties = dup_properties;
  cfg.features.node_dim = cfg.encoder.hidden;
  cfg.features.seed = seed;
  require_triples_for(cfg.mode, triples);

  const auto records = kgmol::chem::read_molecule_file(molecules);
  std::vector<kgmol::chem::MolecularGraph> mols;
  mols.reserve(records.size());
  for (const auto &rec : records) mols.push_back(rec.graph);

  kgmol::kg::KnowledgeGraph kg;
  kgmol::kge::EmbeddingTable emb;
  std::vector<kgmol::moiety::MoietyPattern> lib = load_pattern_library(patterns);
  kgmol::ssl::PretrainContext ctx;
  if (!triples.empty()) {
    kg = kgmol::kg::load_triples(triples);
    ctx.graph = &kg;
  }
  if (!kge_path.empty()) {
    emb = kgmol::kge::load_embeddings(kge_path);
    ctx.emb = &emb;
  }
  ctx.patterns = &lib;

  const auto result = kgmol::ssl::pretrain(mols, ctx, cfg);

  std::map<std::string, std::string> meta;
  meta["mode"] = cfg.mode;
  meta["hidden"] = std::to_string(cfg.encoder.hidden);
  meta["layers"] = std::to_string(cfg.encoder.layers);
  meta["out_dim"] = std::to_string(cfg.encoder.out_dim);
  meta["proj_dim"] = std::to_string(cfg.proj_dim);
  meta["node_dim"] = std::to_string(cfg.features.node_dim);
  meta["feature_seed"] = std::to_string(cfg.features.seed);
  meta["edge_dim_orig"] = std::to_string(result.edge_dim_orig);
  meta["edge_dim_aug"] = std::to_string(result.edge_dim_aug);
  kgmol::nn::save_checkpoint(result.params, out, meta);
  std::cerr << "wrote checkpoint: " << out << "\n";

  const std::string csv = kgmol::ssl::log_to_csv(result.log);
  if (!log_path.empty()) {
    std::ofstream log_file(log_path);
    if (!log_file) throw InputError("cannot open log file: " + log_path);
    log_file << csv;
  } else {
    std::cerr << csv;
  }
  return 0;
}

int run_probe(const std::string &molecules, const std::string &checkpoint,
              const std::string &report, std::uint64_t seed) {
  std::map<std::string, std::string> meta;
  const kgmol::nn::ParamStore params =
      kgmol::nn::load_checkpoint(checkpoint, &meta);

  kgmol::ssl::SslConfig cfg;
  cfg.mode = meta_value(meta, "mode");
  cfg.encoder.hidden = std::stoul(meta_value(meta, "hidden"));
  cfg.encoder.layers = std::stoul(meta_value(meta, "layers"));
  cfg.encoder.out_dim = std::stoul(meta_value(meta, "out_dim"));
  cfg.proj_dim = std::stoul(meta_value(meta, "proj_dim"));
  cfg.features.node_dim = std::stoul(meta_value(meta, "node_dim"));
  cfg.features.seed = std::stoull(meta_value(meta, "feature_seed"));
  cfg.seed = seed;

  const auto records = kgmol::chem::read_molecule_file(molecules);
  std::vector<kgmol::chem::MolecularGraph> mols;
  std::vector<std::string> labels;
  for (const auto &rec : records) {
    if (!rec.label)
      throw InputError("probe: molecule " + rec.graph.id + " has no label");
    mols.push_back(rec.graph);
    labels.push_back(*rec.label);
  }

  const auto metrics = kgmol::ssl::linear_probe(mols, labels, params, cfg);
  OutputTarget target(report);
  target.stream() << metrics.to_json() << "\n";
  return 0;
}

int run_export(const std::string &mode_in, const std::string &molecules,
               const std::string &triples, const std::string &patterns,
               const std::string &out_dir, const std::string &format,
               bool dup_properties) {
  const std::string mode = normalize_mode(mode_in);
  require_triples_for(mode, triples);
  if (format != "dot" && format != "json")
    throw InputError("--format must be dot or json");

  const auto records = kgmol::chem::read_molecule_file(molecules);
  kgmol::kg::KnowledgeGraph kg;
  if (!triples.empty()) kg = kgmol::kg::load_triples(triples);
  const auto lib = load_pattern_library(patterns);
  kgmol::hetero::AugmentOptions options;
  options.duplicate_properties = dup_properties;

  std::filesystem::create_directories(out_dir);
  for (const auto &rec : records) {
    const auto hg = build_view(mode, rec.graph, &kg, lib, options);
    const std::filesystem::path path =
        std::filesystem::path(out_dir) /
        (sanitize_filename(rec.graph.id) + "." + format);
    std::ofstream file(path);
    if (!file) throw InputError("cannot open output file: " + path.string());
    file << (format == "dot" ? kgmol::hetero::to_dot(hg)
                             : kgmol::hetero::to_json(hg) + "\n");
  }
  std::cerr << "exported " << records.size() << " file(s) to " << out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"kgmol: knowledge-enhanced molecular graph toolkit"};
  app.require_subcommand(1);

  const auto add_seed = [](CLI::App *sub, std::uint64_t &seed) {
    sub->add_option("--seed", seed, "RNG seed (default 42)")
        ->envname("KGMOL_SEED");
  };
  std::string config_path;
  const auto add_config = [&config_path](CLI::App *sub) {
    sub->add_option("--config", config_path,
                    "key=value config file, overridden by explicit flags");
  };

  // parse
  auto *parse_cmd = app.add_subcommand(
      "parse", "Parse a molecule file and emit graphs as JSON lines");
  std::string parse_molecules, parse_out;
  bool parse_summary = false;
  parse_cmd->add_option("--molecules", parse_molecules, "SMILES TSV file")
      ->required();
  parse_cmd->add_option("--out", parse_out, "output path (default stdout)");
  parse_cmd->add_flag("--summary", parse_summary,
                      "tab-separated summary instead of JSON");
  add_config(parse_cmd);

  // validate-kg
  auto *validate_cmd = app.add_subcommand(
      "validate-kg", "Validate an element knowledge graph TSV");
  std::string validate_triples, validate_out;
  validate_cmd->add_option("--triples", validate_triples, "triple TSV file")
      ->required();
  validate_cmd->add_option("--out", validate_out,
                           "report path (default stdout)");
  add_config(validate_cmd);

  // kge-train
  auto *kge_cmd = app.add_subcommand(
      "kge-train", "Train knowledge-graph embeddings");
  std::string kge_triples, kge_model = "rotate", kge_out = "kge.json";
  std::string kge_report;
  std::size_t kge_dim = 32, kge_steps = 5000, kge_negatives = 1;
  double kge_lr = 0.05, kge_margin = 1.0, kge_holdout = 0.0;
  std::uint64_t kge_seed = 42;
  kge_cmd->add_option("--triples", kge_triples, "triple TSV file")->required();
  kge_cmd->add_option("--model", kge_model, "transe | rotate | distmult");
  kge_cmd->add_option("--dim", kge_dim, "embedding dimension");
  kge_cmd->add_option("--steps", kge_steps, "SGD steps");
  kge_cmd->add_option("--lr", kge_lr, "learning rate");
  kge_cmd->add_option("--margin", kge_margin, "ranking margin");
  kge_cmd->add_option("--negatives", kge_negatives,
                      "negatives per positive");
  kge_cmd->add_option("--holdout", kge_holdout,
                      "held-out fraction for link-prediction metrics");
  kge_cmd->add_option("--out", kge_out, "checkpoint path");
  kge_cmd->add_option("--report", kge_report,
                      "metrics JSON path (default stdout)");
  add_seed(kge_cmd, kge_seed);
  add_config(kge_cmd);

  // detect-moieties
  auto *moiety_cmd = app.add_subcommand(
      "detect-moieties", "Emit relational moiety records per molecule");
  std::string moiety_molecules, moiety_patterns, moiety_out;
  moiety_cmd->add_option("--molecules", moiety_molecules, "SMILES TSV file")
      ->required();
  moiety_cmd->add_option("--patterns", moiety_patterns,
                         "pattern library JSON (default built-ins)");
  moiety_cmd->add_option("--out", moiety_out, "output path (default stdout)");
  add_config(moiety_cmd);

  // augment
  auto *augment_cmd = app.add_subcommand(
      "augment", "Write augmented heterogeneous graphs as JSON lines");
  std::string augment_mode, augment_molecules, augment_triples;
  std::string augment_patterns, augment_out;
  bool augment_dup = false, augment_compose = false;
  unsigned augment_jobs = 1;
  augment_cmd
      ->add_option("--mode", augment_mode,
                   "element-kg | fg-kg | composed")
      ->required();
  augment_cmd->add_option("--molecules", augment_molecules, "SMILES TSV file")
      ->required();
  augment_cmd->add_option("--triples", augment_triples, "triple TSV file");
  augment_cmd->add_option("--patterns", augment_patterns,
                          "pattern library JSON (default built-ins)");
  augment_cmd->add_option("--out", augment_out, "output path (default stdout)");
  augment_cmd->add_flag("--dup-properties", augment_dup,
                        "one property node per (atom, property)");
  augment_cmd->add_flag("--compose-augmentations", augment_compose,
                        "apply element-KG and FG augmentations together");
  augment_cmd->add_option("--jobs", augment_jobs, "parallel workers");
  add_config(augment_cmd);

  // pretrain
  auto *pretrain_cmd = app.add_subcommand(
      "pretrain", "Contrastive pretraining of the graph encoders");
  std::string pre_molecules, pre_mode = "element-kg", pre_triples;
  std::string pre_patterns, pre_kge, pre_out = "encoder.json", pre_log;
  bool pre_dup = false;
  std::uint64_t pre_seed = 42;
  kgmol::ssl::SslConfig pre_cfg;
  pretrain_cmd->add_option("--molecules", pre_molecules, "SMILES TSV file")
      ->required();
  pretrain_cmd->add_option("--mode", pre_mode, "element-kg | fg-kg");
  pretrain_cmd->add_option("--triples", pre_triples, "triple TSV file");
  pretrain_cmd->add_option("--patterns", pre_patterns,
                           "pattern library JSON (default built-ins)");
  pretrain_cmd->add_option("--kge", pre_kge,
                           "KGE checkpoint for property/relation features");
  pretrain_cmd->add_option("--epochs", pre_cfg.epochs, "training epochs");
  pretrain_cmd->add_option("--batch", pre_cfg.batch_size, "pairs per batch");
  pretrain_cmd->add_option("--tau", pre_cfg.temperature,
                           "contrastive temperature");
  pretrain_cmd->add_option("--lr", pre_cfg.learning_rate, "Adam learning rate");
  pretrain_cmd->add_option("--proj", pre_cfg.proj_dim,
                           "projection head output dim");
  pretrain_cmd->add_option("--hidden", pre_cfg.encoder.hidden,
                           "encoder hidden dim");
  pretrain_cmd->add_option("--layers", pre_cfg.encoder.layers,
                           "message-passing rounds");
  pretrain_cmd->add_option("--out-dim", pre_cfg.encoder.out_dim,
                           "graph vector dim");
  pretrain_cmd->add_flag("--dup-properties", pre_dup,
                         "one property node per (atom, property)");
  pretrain_cmd->add_option("--out", pre_out, "checkpoint path");
  pretrain_cmd->add_option("--log", pre_log, "CSV loss log path");
  add_seed(pretrain_cmd, pre_seed);
  add_config(pretrain_cmd);

  // probe
  auto *probe_cmd = app.add_subcommand(
      "probe", "Linear probe on a frozen pretrained encoder");
  std::string probe_molecules, probe_checkpoint, probe_report;
  std::uint64_t probe_seed = 42;
  probe_cmd->add_option("--molecules", probe_molecules,
                        "labeled SMILES TSV file")
      ->required();
  probe_cmd->add_option("--checkpoint", probe_checkpoint,
                        "pretrain checkpoint path")
      ->required();
  probe_cmd->add_option("--report", probe_report,
                        "metrics JSON path (default stdout)");
  add_seed(probe_cmd, probe_seed);
  add_config(probe_cmd);

  // export
  auto *export_cmd = app.add_subcommand(
      "export", "Write one DOT or JSON file per molecule");
  std::string export_mode = "original", export_molecules, export_triples;
  std::string export_patterns, export_dir = "export", export_format = "dot";
  bool export_dup = false;
  export_cmd->add_option("--mode", export_mode,
                         "original | element-kg | fg-kg | composed");
  export_cmd->add_option("--molecules", export_molecules, "SMILES TSV file")
      ->required();
  export_cmd->add_option("--triples", export_triples, "triple TSV file");
  export_cmd->add_option("--patterns", export_patterns,
                         "pattern library JSON (default built-ins)");
  export_cmd->add_option("--out-dir", export_dir, "output directory");
  export_cmd->add_option("--format", export_format, "dot | json");
  export_cmd->add_flag("--dup-properties", export_dup,
                       "one property node per (atom, property)");
  add_config(export_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    apply_config_file(app.get_subcommands().front(), config_path);
    if (*parse_cmd) return run_parse(parse_molecules, parse_out, parse_summary);
    if (*validate_cmd) return run_validate_kg(validate_triples, validate_out);
    if (*kge_cmd)
      return run_kge_train(kge_triples, kge_model, kge_dim, kge_steps, kge_lr,
                           kge_margin, kge_negatives, kge_holdout, kge_seed,
                           kge_out, kge_report);
    if (*moiety_cmd)
      return run_detect_moieties(moiety_molecules, moiety_patterns,
                                 moiety_out);
    if (*augment_cmd)
      return run_augment(augment_mode, augment_molecules, augment_triples,
                         augment_patterns, augment_out, augment_dup,
                         augment_compose, augment_jobs);
    if (*pretrain_cmd)
      return run_pretrain(pre_molecules, pre_mode, pre_triples, pre_patterns,
                          pre_kge, pre_cfg, pre_seed, pre_dup, pre_out,
                          pre_log);
    if (*probe_cmd)
      return run_probe(probe_molecules, probe_checkpoint, probe_report,
                       probe_seed);
    if (*export_cmd)
      return run_export(export_mode, export_molecules, export_triples,
                        export_patterns, export_dir, export_format,
                        export_dup);
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InternalError &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
