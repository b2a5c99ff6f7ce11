//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "kgmol/hetero/hetero.hpp"
#include "kgmol/kge/kge.hpp"
#include "kgmol/nn/param_store.hpp"
#include "test_util.hpp"

using namespace kgmol;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs the CLI with stdout/stderr captured in the scratch directory.
RunResult run_tool(const fs::path &scratch, const std::string &args,
                   const std::string &env = "") {
  static int counter = 0;
  const fs::path out = scratch / ("stdout." + std::to_string(counter));
  const fs::path err = scratch / ("stderr." + std::to_string(counter));
  ++counter;
  std::string cmd = env;
  if (!cmd.empty()) cmd += " ";
  cmd += std::string(KGMOL_TOOL_PATH) + " " + args + " > " + out.string() +
         " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = test::slurp(out);
  result.err = test::slurp(err);
  return result;
}

std::vector<std::string> lines_of(const std::string &text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void write_file(const fs::path &path, const std::string &content) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << content;
}

std::string corpus() { return test::data_path("corpus20.smi"); }
std::string families() { return test::data_path("toy_families.smi"); }
std::string sample_triples() {
  return test::data_path("sample_element_kg.tsv");
}

/// Ten molecules per family keep pretraining fast but probe-splittable.
void write_small_families(const fs::path &path) {
  std::ostringstream out;
  const char *alcohols[] = {"CO", "CCO", "CCCO", "CC(C)O", "CCCCO"};
  const char *chlorides[] = {"CCl", "CCCl", "CCCCl", "CC(C)Cl", "CCCCCl"};
  for (int i = 0; i < 5; ++i) {
    out << alcohols[i] << "\talc" << i << "\talcohol\n";
    out << chlorides[i] << "\tchl" << i << "\tchloride\n";
  }
  write_file(path, out.str());
}

const std::string kSmallPretrainFlags =
    " --epochs 2 --batch 4 --hidden 16 --out-dim 16 --proj 8 --layers 2";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("parse emits summaries and JSON lines") {
  auto scratch = test::scratch_dir();

  SUBCASE("summary table") {
    auto r = run_tool(scratch, "parse --molecules " + corpus() + " --summary");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("parsed 20 molecule(s)") != std::string::npos);
    auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 20);
    // id, atoms, bonds, components, signature.
    std::istringstream first(rows.front());
    std::string id, atoms, bonds, comps, sig;
    std::getline(first, id, '\t');
    std::getline(first, atoms, '\t');
    std::getline(first, bonds, '\t');
    std::getline(first, comps, '\t');
    std::getline(first, sig, '\t');
    CHECK(id == "methane");
    CHECK(atoms == "1");
    CHECK(bonds == "0");
    CHECK(comps == "1");
    CHECK_FALSE(sig.empty());
  }

  SUBCASE("JSON lines round-trip through the graph reader") {
    const auto out_path = scratch / "graphs.jsonl";
    auto r = run_tool(scratch, "parse --molecules " + corpus() + " --out " +
                                   out_path.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    auto rows = lines_of(test::slurp(out_path));
    REQUIRE(rows.size() == 20);
    auto corpus_records = test::load_corpus();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto hg = hetero::from_json(rows[i]);
      CHECK(hg.id == corpus_records[i].graph.id);
      CHECK(hg.nodes.size() == corpus_records[i].graph.num_atoms());
    }
  }

  SUBCASE("missing input file") {
    auto r = run_tool(scratch, "parse --molecules /nonexistent.smi");
    CHECK(r.exit_code == 1);
    CHECK(r.err.substr(0, 7) == "error: ");
  }

  SUBCASE("malformed SMILES reports the line") {
    const auto bad = scratch / "bad.smi";
    write_file(bad, "CCO\tok\nC1CC\tunclosed\n");
    auto r = run_tool(scratch, "parse --molecules " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error: ") == 0);
    CHECK(r.err.find("line 2") != std::string::npos);
  }
}

TEST_CASE("validate-kg separates clean and broken graphs") {
  auto scratch = test::scratch_dir();

  SUBCASE("clean sample") {
    const auto report = scratch / "report.txt";
    auto r = run_tool(scratch, "validate-kg --triples " + sample_triples() +
                                   " --out " + report.string());
    CHECK(r.exit_code == 0);
    CHECK(test::slurp(report).find("ok") != std::string::npos);
  }

  SUBCASE("unknown relation and element") {
    const auto bad = scratch / "bad.tsv";
    write_file(bad,
               "gas\tisStateOf\tO\n"
               "gas\thasBogus\tO\n"
               "gas\tisStateOf\tQq\n");
    auto r = run_tool(scratch, "validate-kg --triples " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("validation failed: 2 finding(s)") != std::string::npos);
    CHECK(r.out.find("hasBogus") != std::string::npos);
    CHECK(r.out.find("Qq") != std::string::npos);
  }

  SUBCASE("syntax error") {
    const auto bad = scratch / "syntax.tsv";
    write_file(bad, "only-two\tfields\n");
    auto r = run_tool(scratch, "validate-kg --triples " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("line 1") != std::string::npos);
  }
}

TEST_CASE("kge-train writes checkpoints and metrics") {
  auto scratch = test::scratch_dir();
  const auto ckpt = scratch / "kge.json";
  const auto report = scratch / "metrics.json";
  const std::string base = "kge-train --triples " + sample_triples() +
                           " --model transe --dim 8 --steps 200 --lr 0.1" +
                           " --holdout 0.2 --seed 7 --out " + ckpt.string() +
                           " --report " + report.string();

  auto r = run_tool(scratch, base);
  CHECK(r.exit_code == 0);
  auto pos = r.err.find("holdout: ");
  REQUIRE(pos != std::string::npos);
  std::size_t held = 0;
  REQUIRE(std::sscanf(r.err.c_str() + pos, "holdout: %zu of 42 triples",
                      &held) == 1);
  CHECK(held >= 1);
  CHECK(held <= 8);
  CHECK(r.err.find("wrote checkpoint") != std::string::npos);

  auto emb = kge::load_embeddings(ckpt.string());
  CHECK(emb.model == kge::KgeModel::TransE);
  CHECK(emb.dim == 8);
  CHECK(emb.entity_vectors.size() > 0);

  auto metrics = nlohmann::json::parse(test::slurp(report));
  CHECK(metrics["queries"].get<std::size_t>() == 2 * held);
  CHECK(metrics["mrr"].get<double>() > 0.0);
  CHECK(metrics["mrr"].get<double>() <= 1.0);
  CHECK(metrics["hits10"].get<double>() >= metrics["hits1"].get<double>());

  SUBCASE("same seed reproduces the checkpoint bit for bit") {
    const auto again = scratch / "kge2.json";
    auto r2 = run_tool(scratch, "kge-train --triples " + sample_triples() +
                                    " --model transe --dim 8 --steps 200" +
                                    " --lr 0.1 --holdout 0.2 --seed 7" +
                                    " --out " + again.string());
    CHECK(r2.exit_code == 0);
    CHECK(test::slurp(again) == test::slurp(ckpt));

    const auto other = scratch / "kge3.json";
    auto r3 = run_tool(scratch, "kge-train --triples " + sample_triples() +
                                    " --model transe --dim 8 --steps 200" +
                                    " --lr 0.1 --holdout 0.2 --seed 8" +
                                    " --out " + other.string());
    CHECK(r3.exit_code == 0);
    CHECK(test::slurp(other) != test::slurp(ckpt));
  }

  SUBCASE("invalid options exit with code 1") {
    auto bad1 = run_tool(scratch, "kge-train --triples " + sample_triples() +
                                      " --holdout 1.5 --out " +
                                      (scratch / "x.json").string());
    CHECK(bad1.exit_code == 1);
    CHECK(bad1.err.find("error: ") == 0);
    auto bad2 = run_tool(scratch, "kge-train --triples " + sample_triples() +
                                      " --model banana --out " +
                                      (scratch / "x.json").string());
    CHECK(bad2.exit_code == 1);
    auto bad3 = run_tool(scratch, "kge-train --triples " + sample_triples() +
                                      " --dim 0 --out " +
                                      (scratch / "x.json").string());
    CHECK(bad3.exit_code == 1);
  }
}

TEST_CASE("detect-moieties emits relational records") {
  auto scratch = test::scratch_dir();
  auto r = run_tool(scratch, "detect-moieties --molecules " + corpus());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("functional_group(ethanol, [2,1], 2, hydroxyl)") !=
        std::string::npos);
  CHECK(r.out.find("has_struc(benzene, ") != std::string::npos);
  CHECK(r.out.find("fused(naphthalene, ") != std::string::npos);
  CHECK(r.out.find("connected(biphenyl, ") != std::string::npos);

  SUBCASE("custom pattern library") {
    auto r2 = run_tool(scratch, "detect-moieties --molecules " + corpus() +
                                    " --patterns " +
                                    test::data_path("fg_patterns.json"));
    CHECK(r2.exit_code == 0);
    CHECK(r2.out == r.out);
  }
}

TEST_CASE("augment is mode-aware and parallel-safe") {
  auto scratch = test::scratch_dir();

  SUBCASE("element mode requires triples") {
    auto r = run_tool(scratch, "augment --mode element-kg --molecules " +
                                   corpus());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error: mode element_kg requires --triples") !=
          std::string::npos);
  }

  SUBCASE("jobs do not change the output") {
    const auto one = scratch / "one.jsonl";
    const auto four = scratch / "four.jsonl";
    auto r1 = run_tool(scratch, "augment --mode composed --molecules " +
                                    corpus() + " --triples " +
                                    sample_triples() + " --jobs 1 --out " +
                                    one.string());
    auto r4 = run_tool(scratch, "augment --mode composed --molecules " +
                                    corpus() + " --triples " +
                                    sample_triples() + " --jobs 4 --out " +
                                    four.string());
    CHECK(r1.exit_code == 0);
    CHECK(r4.exit_code == 0);
    const auto baseline = test::slurp(one);
    CHECK(baseline == test::slurp(four));
    auto rows = lines_of(baseline);
    REQUIRE(rows.size() == 20);
    for (const auto &row : rows) {
      auto hg = hetero::from_json(row);
      CHECK_NOTHROW(hetero::check_hetero(hg));
    }
    CHECK(r4.err.find("mode composed") != std::string::npos);
  }

  SUBCASE("compose flag overrides the mode") {
    auto r = run_tool(scratch, "augment --mode fg-kg --molecules " + corpus() +
                                   " --compose-augmentations");
    CHECK(r.exit_code == 1);  // composed now needs triples
    CHECK(r.err.find("requires --triples") != std::string::npos);
  }

  SUBCASE("fg mode needs no triples") {
    auto r = run_tool(scratch, "augment --mode fg-kg --molecules " + corpus());
    CHECK(r.exit_code == 0);
    CHECK(lines_of(r.out).size() == 20);
  }
}

TEST_CASE("export writes one file per molecule") {
  auto scratch = test::scratch_dir();

  SUBCASE("dot format") {
    const auto dir = scratch / "dot_out";
    auto r = run_tool(scratch, "export --molecules " + corpus() +
                                   " --mode fg-kg --format dot --out-dir " +
                                   dir.string());
    CHECK(r.exit_code == 0);
    std::size_t count = 0;
    for (const auto &entry : fs::directory_iterator(dir)) {
      ++count;
      CHECK(entry.path().extension() == ".dot");
    }
    CHECK(count == 20);
    const auto benzene = test::slurp(dir / "benzene.dot");
    CHECK(benzene.find("graph \"benzene\"") != std::string::npos);
    CHECK(benzene.find("part_of") != std::string::npos);
  }

  SUBCASE("json format round-trips") {
    const auto dir = scratch / "json_out";
    auto r = run_tool(scratch, "export --molecules " + corpus() +
                                   " --mode original --format json" +
                                   " --out-dir " + dir.string());
    CHECK(r.exit_code == 0);
    auto hg = hetero::from_json(test::slurp(dir / "toluene.json"));
    CHECK(hg.id == "toluene");
    CHECK(hg.nodes.size() == 7);
  }

  SUBCASE("unknown format") {
    auto r = run_tool(scratch, "export --molecules " + corpus() +
                                   " --format svg --out-dir " +
                                   (scratch / "x").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("--format must be dot or json") != std::string::npos);
  }
}

TEST_CASE("pretrain trains, logs, and honors the seed") {
  auto scratch = test::scratch_dir();
  const auto mols = scratch / "mols.smi";
  write_small_families(mols);
  const auto ckpt = scratch / "enc.json";
  const auto log = scratch / "loss.csv";
  const std::string base = "pretrain --molecules " + mols.string() +
                           " --mode element-kg --triples " + sample_triples() +
                           kSmallPretrainFlags + " --out " + ckpt.string() +
                           " --log " + log.string();

  auto r = run_tool(scratch, base + " --seed 5");
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("wrote checkpoint") != std::string::npos);

  auto rows = lines_of(test::slurp(log));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "epoch,mean_loss,wall_ms");
  CHECK(rows[1].substr(0, 2) == "0,");
  CHECK(rows[2].substr(0, 2) == "1,");

  std::map<std::string, std::string> meta;
  auto params = nn::load_checkpoint(ckpt.string(), &meta);
  CHECK(meta.at("mode") == "element_kg");
  CHECK(meta.at("hidden") == "16");
  CHECK(meta.at("edge_dim_orig") == "8");
  CHECK(meta.at("edge_dim_aug") == "8");
  CHECK(params.has("orig/msg_a/W"));
  CHECK(params.has("kmpnn/msg_p/W"));
  CHECK(params.has("head/l2/W"));

  SUBCASE("seed flag and KGMOL_SEED agree; new seeds diverge") {
    const auto env_ckpt = scratch / "enc_env.json";
    const auto env_log = scratch / "loss_env.csv";
    auto renv = run_tool(scratch,
                         "pretrain --molecules " + mols.string() +
                             " --mode element-kg --triples " +
                             sample_triples() + kSmallPretrainFlags +
                             " --out " + env_ckpt.string() + " --log " +
                             env_log.string(),
                         "KGMOL_SEED=5");
    CHECK(renv.exit_code == 0);
    CHECK(test::slurp(env_ckpt) == test::slurp(ckpt));

    // Loss columns must match exactly; wall-clock columns may not.
    auto a = lines_of(test::slurp(log));
    auto b = lines_of(test::slurp(env_log));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 1; i < a.size(); ++i) {
      CHECK(a[i].substr(0, a[i].rfind(',')) ==
            b[i].substr(0, b[i].rfind(',')));
    }

    const auto other = scratch / "enc6.json";
    auto r6 = run_tool(scratch, "pretrain --molecules " + mols.string() +
                                    " --mode element-kg --triples " +
                                    sample_triples() + kSmallPretrainFlags +
                                    " --out " + other.string() + " --seed 6");
    CHECK(r6.exit_code == 0);
    CHECK(test::slurp(other) != test::slurp(ckpt));
  }

  SUBCASE("fg mode pretrains without triples") {
    const auto fg_ckpt = scratch / "enc_fg.json";
    auto rfg = run_tool(scratch,
                        "pretrain --molecules " + mols.string() +
                            " --mode fg-kg --epochs 1 --batch 4 --hidden 24" +
                            " --out-dim 16 --proj 8 --layers 2 --out " +
                            fg_ckpt.string());
    CHECK(rfg.exit_code == 0);
    std::map<std::string, std::string> fg_meta;
    auto fg_params = nn::load_checkpoint(fg_ckpt.string(), &fg_meta);
    CHECK(fg_meta.at("mode") == "fg_kg");
    CHECK(fg_params.has("kmpnn/msg_ma/W"));
    CHECK_FALSE(fg_params.has("kmpnn/msg_p/W"));
  }
}

TEST_CASE("probe evaluates a frozen checkpoint") {
  auto scratch = test::scratch_dir();
  const auto ckpt = scratch / "enc.json";
  auto rp = run_tool(scratch, "pretrain --molecules " + families() +
                                  " --mode element-kg --triples " +
                                  sample_triples() + kSmallPretrainFlags +
                                  " --out " + ckpt.string() + " --seed 3");
  REQUIRE(rp.exit_code == 0);

  const auto report = scratch / "probe.json";
  auto r = run_tool(scratch, "probe --molecules " + families() +
                                 " --checkpoint " + ckpt.string() +
                                 " --report " + report.string() + " --seed 3");
  CHECK(r.exit_code == 0);
  auto metrics = nlohmann::json::parse(test::slurp(report));
  CHECK(metrics["train_size"].get<int>() == 32);
  CHECK(metrics["test_size"].get<int>() == 8);
  CHECK(metrics["accuracy"].get<double>() >= 0.0);
  CHECK(metrics["accuracy"].get<double>() <= 1.0);
  CHECK(metrics["test_support"]["alcohol"].get<int>() == 4);
  CHECK(metrics["test_support"]["chloride"].get<int>() == 4);

  SUBCASE("unlabeled molecules are rejected") {
    auto r2 = run_tool(scratch, "probe --molecules " + corpus() +
                                    " --checkpoint " + ckpt.string());
    CHECK(r2.exit_code == 1);
    CHECK(r2.err.find("has no label") != std::string::npos);
  }

  SUBCASE("corrupt checkpoint") {
    const auto bad = scratch / "bad.json";
    write_file(bad, "{not json");
    auto r2 = run_tool(scratch, "probe --molecules " + families() +
                                    " --checkpoint " + bad.string());
    CHECK(r2.exit_code == 1);
    CHECK(r2.err.find("error: ") == 0);
  }

  SUBCASE("checkpoint without pretrain metadata") {
    nn::ParamStore store;
    store.add("probe/W", nn::Tensor2(2, 2));
    const auto bare = scratch / "bare.json";
    nn::save_checkpoint(store, bare.string());
    auto r2 = run_tool(scratch, "probe --molecules " + families() +
                                    " --checkpoint " + bare.string());
    CHECK(r2.exit_code == 1);
    CHECK(r2.err.find("pretrain metadata") != std::string::npos);
  }

  SUBCASE("checkpoint missing encoder blocks is an internal error") {
    nn::ParamStore store;
    store.add("head/l1/W", nn::Tensor2(2, 2));
    std::map<std::string, std::string> meta = {
        {"mode", "element_kg"}, {"hidden", "16"},      {"layers", "2"},
        {"out_dim", "16"},      {"proj_dim", "8"},     {"node_dim", "16"},
        {"feature_seed", "42"}};
    const auto broken = scratch / "broken.json";
    nn::save_checkpoint(store, broken.string(), meta);
    auto r2 = run_tool(scratch, "probe --molecules " + families() +
                                    " --checkpoint " + broken.string());
    CHECK(r2.exit_code == 2);
    CHECK(r2.err.find("internal error: ") == 0);
  }
}

TEST_CASE("config files merge under explicit flags") {
  auto scratch = test::scratch_dir();
  const auto mols = scratch / "mols.smi";
  write_small_families(mols);

  SUBCASE("values apply when the flag is absent") {
    const auto cfg = scratch / "pre.cfg";
    const auto ckpt = scratch / "from_config.json";
    write_file(cfg, "# pretrain settings\n"
                    "epochs = 1\n"
                    "batch = 4\n"
                    "hidden = 16\n"
                    "out-dim = 16\n"
                    "proj = 8\n"
                    "layers = 2\n"
                    "out = \"" +
                        ckpt.string() + "\"\n");
    auto r = run_tool(scratch, "pretrain --molecules " + mols.string() +
                                   " --mode fg-kg --hidden 24 --config " +
                                   cfg.string());
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(ckpt));
    std::map<std::string, std::string> meta;
    (void)nn::load_checkpoint(ckpt.string(), &meta);
    CHECK(meta.at("hidden") == "24");  // explicit flag beat the config
    CHECK(meta.at("proj_dim") == "8");  // config value applied
  }

  SUBCASE("unknown keys are input errors") {
    const auto cfg = scratch / "bad.cfg";
    write_file(cfg, "bogus_option = 3\n");
    auto r = run_tool(scratch, "parse --molecules " + corpus() + " --config " +
                                   cfg.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("config line 1: unknown option --bogus_option") !=
          std::string::npos);
  }

  SUBCASE("malformed lines are input errors") {
    const auto cfg = scratch / "noval.cfg";
    write_file(cfg, "epochs\n");
    auto r = run_tool(scratch, "pretrain --molecules " + mols.string() +
                                   " --mode fg-kg --config " + cfg.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("expected key=value") != std::string::npos);
  }
}

TEST_CASE("top-level argument handling") {
  auto scratch = test::scratch_dir();
  auto none = run_tool(scratch, "");
  CHECK(none.exit_code == 1);
  auto unknown = run_tool(scratch, "frobnicate");
  CHECK(unknown.exit_code == 1);
  auto help = run_tool(scratch, "--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("kgmol") != std::string::npos);
  auto missing = run_tool(scratch, "parse");
  CHECK(missing.exit_code == 1);  // --molecules is required
}

}  // TEST_SUITE("cli")
