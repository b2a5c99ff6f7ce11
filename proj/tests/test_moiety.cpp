//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "kgmol/chem/molecule.hpp"
#include "kgmol/errors.hpp"
#include "kgmol/moiety/moiety.hpp"
#include "kgmol/moiety/pattern.hpp"
#include "test_util.hpp"

using namespace kgmol;
using test::mol;

namespace {

const std::vector<moiety::MoietyPattern> &lib() {
  return moiety::builtin_patterns();
}

std::optional<chem::BondOrder> bond_lookup(const chem::MolecularGraph &g,
                                           int a, int b) {
  for (const auto &bond : g.bonds)
    if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a))
      return bond.order;
  return std::nullopt;
}

int atom_degree(const chem::MolecularGraph &g, int a) {
  int d = 0;
  for (const auto &bond : g.bonds) d += (bond.a == a) + (bond.b == a);
  return d;
}

// Re-verifies a reported match against every constraint of its pattern.
// The match atom list is ordered by pattern scope, so the pattern node for
// scope[k] maps to atoms[k]; nodes outside the scope are not reported and
// cannot be re-checked here, which is fine for scope-covering patterns.
void verify_match(const chem::MolecularGraph &g, const moiety::Moiety &m,
                  const moiety::MoietyPattern &p) {
  REQUIRE(m.atoms.size() == p.scope.size());
  std::map<int, int> node_to_atom;  // pattern node -> molecule atom
  for (std::size_t k = 0; k < p.scope.size(); ++k)
    node_to_atom[p.scope[k]] = m.atoms[k];

  for (const auto &[node, atom] : node_to_atom) {
    const auto &c = p.nodes[static_cast<std::size_t>(node)];
    const auto &a = g.atoms[static_cast<std::size_t>(atom)];
    CHECK(std::find(c.elements.begin(), c.elements.end(), a.element) !=
          c.elements.end());
    if (c.aromatic) CHECK(a.aromatic == *c.aromatic);
    if (c.charge) CHECK(a.formal_charge == *c.charge);
    int deg = atom_degree(g, atom);
    CHECK(deg >= c.min_degree);
    CHECK(deg <= c.max_degree);
  }
  for (const auto &e : p.edges) {
    if (!node_to_atom.count(e.a) || !node_to_atom.count(e.b)) continue;
    auto order = bond_lookup(g, node_to_atom[e.a], node_to_atom[e.b]);
    REQUIRE(order.has_value());
    if (e.order) CHECK(*order == *e.order);
  }
}

std::multiset<std::string> fg_names(const std::vector<moiety::Moiety> &ms) {
  std::multiset<std::string> names;
  for (const auto &m : ms)
    if (m.kind == moiety::MoietyKind::FunctionalGroup)
      names.insert(m.type_label);
  return names;
}

// Brute-force relation oracle: pairwise set intersection, then bond scan,
// with chain labels copied from the endpoint chains.
std::vector<moiety::MoietyRelation> oracle_relations(
    const chem::MolecularGraph &g, const std::vector<moiety::Moiety> &ms) {
  std::vector<moiety::MoietyRelation> out;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      std::set<int> a(ms[i].atoms.begin(), ms[i].atoms.end());
      bool shared = std::any_of(ms[j].atoms.begin(), ms[j].atoms.end(),
                                [&](int x) { return a.count(x) > 0; });
      if (shared) {
        out.push_back({i, j, moiety::RelationLabel::Fused});
        continue;
      }
      bool bonded = false;
      for (int x : ms[i].atoms)
        for (int y : ms[j].atoms)
          if (bond_lookup(g, x, y)) bonded = true;
      if (!bonded) continue;

      auto chain_sat = [](const moiety::Moiety &m) {
        return m.type_label == "saturated_chain";
      };
      bool ci = ms[i].kind == moiety::MoietyKind::AliphaticChain;
      bool cj = ms[j].kind == moiety::MoietyKind::AliphaticChain;
      moiety::RelationLabel label = moiety::RelationLabel::Connected;
      if (ci || cj) {
        bool sat = (!ci || chain_sat(ms[i])) && (!cj || chain_sat(ms[j]));
        label = sat ? moiety::RelationLabel::Saturated
                    : moiety::RelationLabel::Unsaturated;
      }
      out.push_back({i, j, label});
    }
  return out;
}

}  // namespace

TEST_SUITE("moiety") {

TEST_CASE("pattern library shape and validation") {
  CHECK(lib().size() == 16);
  std::set<std::string> names;
  for (const auto &p : lib()) {
    CAPTURE(p.name);
    CHECK_NOTHROW(moiety::validate_pattern(p));
    names.insert(p.name);
  }
  CHECK(names.size() == 16);
  for (const char *required :
       {"hydroxyl", "carbonyl", "carboxyl", "ester", "ether", "primary_amine",
        "secondary_amine", "tertiary_amine", "amide", "nitro", "nitrile",
        "thiol", "halo", "sulfonyl", "alkene", "alkyne"})
    CHECK(names.count(required) == 1);
}

TEST_CASE("pattern JSON roundtrip and data file") {
  std::istringstream in(moiety::builtin_patterns_json());
  auto reloaded = moiety::load_patterns(in);
  CHECK(reloaded == lib());

  auto from_file = moiety::load_patterns(test::data_path("fg_patterns.json"));
  CHECK(from_file == lib());
}

TEST_CASE("validate_pattern rejects malformed patterns") {
  moiety::MoietyPattern p;
  p.name = "bad";
  SUBCASE("no nodes") { CHECK_THROWS_AS(moiety::validate_pattern(p), InputError); }

  p.nodes.push_back({{"C"}, std::nullopt, 0, 8, std::nullopt});
  p.nodes.push_back({{"O"}, std::nullopt, 0, 8, std::nullopt});
  p.scope = {0, 1};
  SUBCASE("disconnected pattern") {
    CHECK_THROWS_AS(moiety::validate_pattern(p), InputError);
  }
  SUBCASE("edge index out of range") {
    p.edges.push_back({0, 5, std::nullopt});
    CHECK_THROWS_AS(moiety::validate_pattern(p), InputError);
  }
  SUBCASE("empty element string") {
    p.edges.push_back({0, 1, std::nullopt});
    p.nodes[0].elements = {""};
    CHECK_THROWS_AS(moiety::validate_pattern(p), InputError);
  }
  SUBCASE("degree window inverted") {
    p.edges.push_back({0, 1, std::nullopt});
    p.nodes[0].min_degree = 4;
    p.nodes[0].max_degree = 2;
    CHECK_THROWS_AS(moiety::validate_pattern(p), InputError);
  }
}

TEST_CASE("ring count equals the cycle-space dimension") {
  for (const auto &r : test::load_corpus()) {
    CAPTURE(r.graph.id);
    auto rings = moiety::perceive_rings(r.graph);
    const int expected = static_cast<int>(r.graph.num_bonds()) -
                         static_cast<int>(r.graph.num_atoms()) +
                         chem::component_count(r.graph);
    CHECK(static_cast<int>(rings.size()) == expected);
    for (const auto &ring : rings) {
      CHECK(ring.kind == moiety::MoietyKind::Ring);
      CHECK(ring.length() >= 3);
    }
  }
}

TEST_CASE("ring perception on known molecules") {
  auto benzene = moiety::perceive_rings(mol("c1ccccc1"));
  REQUIRE(benzene.size() == 1);
  CHECK(benzene[0].length() == 6);
  CHECK(benzene[0].type_label == "aromatic");

  auto cyclohexane = moiety::perceive_rings(mol("C1CCCCC1"));
  REQUIRE(cyclohexane.size() == 1);
  CHECK(cyclohexane[0].type_label == "aliphatic");

  // The fused bicyclic has three simple cycles (6, 6, 10); a minimal basis
  // must pick the two hexagons.
  auto naphthalene = moiety::perceive_rings(mol("c1ccc2ccccc2c1"));
  REQUIRE(naphthalene.size() == 2);
  CHECK(naphthalene[0].length() == 6);
  CHECK(naphthalene[1].length() == 6);

  CHECK(moiety::perceive_rings(mol("CCC")).empty());
}

TEST_CASE("functional group matching on known molecules") {
  auto check_groups = [](const std::string &smiles,
                         const std::multiset<std::string> &expected) {
    CAPTURE(smiles);
    auto g = mol(smiles);
    auto ms = moiety::match_functional_groups(g, lib());
    CHECK(fg_names(ms) == expected);
  };
  check_groups("CCO", {"hydroxyl"});
  check_groups("CC(=O)O", {"carboxyl"});
  check_groups("COC", {"ether"});
  check_groups("CC#N", {"nitrile"});
  check_groups("C[N+](=O)[O-]", {"nitro"});
  check_groups("CS", {"thiol"});
  check_groups("ClC(Cl)Cl", {"halo", "halo", "halo"});
  check_groups("CN", {"primary_amine"});
  check_groups("CNC", {"secondary_amine"});
  check_groups("CN(C)C", {"tertiary_amine"});
  check_groups("CC(=O)N", {"amide"});
  check_groups("CC=C", {"alkene"});
  check_groups("CC#C", {"alkyne"});
  check_groups("CS(=O)(=O)C", {"sulfonyl"});
  check_groups("CC(=O)Oc1ccccc1C(=O)O", {"ester", "carboxyl"});
  check_groups("c1ccccc1", {});
  check_groups("C", {});
}

TEST_CASE("every reported match satisfies its pattern constraints") {
  std::map<std::string, const moiety::MoietyPattern *> by_name;
  for (const auto &p : lib()) by_name[p.name] = &p;
  for (const auto &r : test::load_corpus()) {
    CAPTURE(r.graph.id);
    for (const auto &m : moiety::match_functional_groups(r.graph, lib())) {
      REQUIRE(by_name.count(m.type_label) == 1);
      verify_match(r.graph, m, *by_name[m.type_label]);
    }
  }
}

TEST_CASE("only the most specific overlapping group is kept") {
  // Carboxyl subsumes the carbonyl and hydroxyl sub-patterns on its atoms.
  auto acid = moiety::match_functional_groups(mol("CC(=O)O"), lib());
  CHECK(fg_names(acid) == std::multiset<std::string>{"carboxyl"});

  // Ester subsumes carbonyl and ether on the acetyl side of aspirin.
  auto aspirin =
      moiety::match_functional_groups(mol("CC(=O)Oc1ccccc1C(=O)O"), lib());
  CHECK(fg_names(aspirin) ==
        std::multiset<std::string>({"ester", "carboxyl"}));

  // A lone ketone still reports its carbonyl.
  auto acetone = moiety::match_functional_groups(mol("CC(=O)C"), lib());
  CHECK(fg_names(acetone) == std::multiset<std::string>{"carbonyl"});
}

TEST_CASE("aliphatic chains found, labeled, and suppressed when covered") {
  auto chains_of = [](const std::string &smiles) {
    auto g = mol(smiles);
    auto found = moiety::perceive_rings(g);
    auto fgs = moiety::match_functional_groups(g, lib());
    found.insert(found.end(), fgs.begin(), fgs.end());
    return moiety::detect_aliphatic_chains(g, found);
  };

  auto propane = chains_of("CCC");
  REQUIRE(propane.size() == 1);
  CHECK(propane[0].atoms == std::vector<int>({0, 1, 2}));
  CHECK(propane[0].type_label == "saturated_chain");

  auto toluene = chains_of("Cc1ccccc1");
  REQUIRE(toluene.size() == 1);
  CHECK(toluene[0].atoms == std::vector<int>({0}));  // length-1 methyl
  CHECK(toluene[0].type_label == "saturated_chain");

  auto propenyl = chains_of("CC=Cc1ccccc1");
  REQUIRE(propenyl.size() == 1);
  CHECK(propenyl[0].atoms == std::vector<int>({0, 1, 2}));
  CHECK(propenyl[0].type_label == "unsaturated_chain");

  // Both carbons of plain ethene belong to the alkene group: no chain left.
  CHECK(chains_of("C=C").empty());
  CHECK(chains_of("c1ccccc1").empty());
}

TEST_CASE("relations match the brute-force oracle on the corpus") {
  for (const auto &r : test::load_corpus()) {
    CAPTURE(r.graph.id);
    auto set = moiety::detect_moieties(r.graph, lib());
    auto got = moiety::infer_moiety_relations(r.graph, set.moieties);
    auto want = oracle_relations(r.graph, set.moieties);
    CHECK(got == want);
    CHECK(got == set.relations);
  }
}

TEST_CASE("fused and connected are mutually exclusive per pair") {
  for (const auto &r : test::load_corpus()) {
    auto set = moiety::detect_moieties(r.graph, lib());
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto &rel : set.relations) {
      CHECK(rel.a < rel.b);
      CHECK(seen.insert({rel.a, rel.b}).second);  // at most one label per pair
    }
  }
}

TEST_CASE("landmark relations") {
  auto count_label = [](const std::string &smiles,
                        moiety::RelationLabel label) {
    auto g = mol(smiles);
    auto set = moiety::detect_moieties(g, lib());
    return std::count_if(
        set.relations.begin(), set.relations.end(),
        [&](const moiety::MoietyRelation &r) { return r.label == label; });
  };
  CHECK(count_label("c1ccc2ccccc2c1", moiety::RelationLabel::Fused) == 1);
  CHECK(count_label("c1ccccc1-c2ccccc2", moiety::RelationLabel::Connected) ==
        1);
  CHECK(count_label("Cc1ccccc1", moiety::RelationLabel::Saturated) == 1);
  CHECK(count_label("CC=Cc1ccccc1", moiety::RelationLabel::Unsaturated) == 1);
}

TEST_CASE("detect_moieties orders and ids") {
  auto set = moiety::detect_moieties(mol("CC(=O)Oc1ccccc1C(=O)O"), lib());
  std::size_t i = 0;
  // Rings first, then groups, then chains, each with its own id counter.
  for (; i < set.moieties.size() &&
         set.moieties[i].kind == moiety::MoietyKind::Ring;
       ++i)
    CHECK(set.moieties[i].id == "r" + std::to_string(i));
  std::size_t fg_start = i;
  for (; i < set.moieties.size() &&
         set.moieties[i].kind == moiety::MoietyKind::FunctionalGroup;
       ++i)
    CHECK(set.moieties[i].id == "fg" + std::to_string(i - fg_start));
  std::size_t ch_start = i;
  for (; i < set.moieties.size(); ++i) {
    CHECK(set.moieties[i].kind == moiety::MoietyKind::AliphaticChain);
    CHECK(set.moieties[i].id == "ch" + std::to_string(i - ch_start));
  }
  CHECK(i == set.moieties.size());
}

TEST_CASE("record emission") {
  auto g = mol("CCO", "ethanol");
  auto set = moiety::detect_moieties(g, lib());
  auto records = moiety::emit_fg_records("ethanol", set.moieties,
                                         set.relations);
  REQUIRE_FALSE(records.empty());

  std::string all;
  for (const auto &r : records) all += r + "\n";
  CHECK(all.find("functional_group(ethanol, [2,1], 2, hydroxyl)") !=
        std::string::npos);
  CHECK(all.find("has_struc(ethanol") != std::string::npos);
  CHECK(all.find("fused(ethanol") != std::string::npos);  // chain shares C1

  moiety::MoietyRelation bad{0, 9, moiety::RelationLabel::Fused};
  CHECK_THROWS_AS(
      (void)moiety::emit_fg_records("x", set.moieties, {bad}),
      InternalError);
}

TEST_CASE("relation label names roundtrip") {
  for (auto label :
       {moiety::RelationLabel::Fused, moiety::RelationLabel::Connected,
        moiety::RelationLabel::Saturated, moiety::RelationLabel::Unsaturated})
    CHECK(moiety::relation_label_from_name(
              moiety::relation_label_name(label)) == label);
  CHECK_THROWS_AS((void)moiety::relation_label_from_name("nope"), InputError);
}

TEST_CASE("relation inference input validation") {
  auto g = mol("CC");
  moiety::Moiety empty{"m0", moiety::MoietyKind::Ring, "aromatic", {}};
  CHECK_THROWS_AS((void)moiety::infer_moiety_relations(g, {empty}),
                  InputError);
  moiety::Moiety out_of_range{
      "m1", moiety::MoietyKind::Ring, "aromatic", {0, 9}};
  CHECK_THROWS_AS((void)moiety::infer_moiety_relations(g, {out_of_range}),
                  InputError);
}

}  // TEST_SUITE
