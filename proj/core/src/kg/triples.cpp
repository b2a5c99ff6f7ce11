//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/kg/triples.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "kgmol/errors.hpp"

namespace kgmol::kg {

bool KnowledgeGraph::contains(const KnowledgeTriple &t) const {
  return std::binary_search(triples.begin(), triples.end(), t);
}

KnowledgeGraph make_knowledge_graph(std::vector<KnowledgeTriple> triples) {
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());

  std::set<std::string> ents;
  std::set<std::string> rels;
  for (const auto &t : triples) {
    ents.insert(t.head);
    ents.insert(t.tail);
    rels.insert(t.relation);
  }
  KnowledgeGraph kg;
  kg.triples = std::move(triples);
  kg.entities.assign(ents.begin(), ents.end());
  kg.relations.assign(rels.begin(), rels.end());
  return kg;
}

namespace {

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KnowledgeGraph load_triples(std::istream &in) {
  std::vector<KnowledgeTriple> triples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(trim(line.substr(start)));
        break;
      }
      fields.push_back(trim(line.substr(start, tab - start)));
      start = tab + 1;
    }
    if (fields.size() != 3)
      throw InputError("line " + std::to_string(lineno) +
                       ": expected 3 tab-separated fields, got " +
                       std::to_string(fields.size()));
    for (const auto &f : fields)
      if (f.empty())
        throw InputError("line " + std::to_string(lineno) +
                         ": empty field in triple");
    triples.push_back({fields[0], fields[1], fields[2]});
  }
  return make_knowledge_graph(std::move(triples));
}

KnowledgeGraph load_triples(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open triple file: " + path);
  return load_triples(in);
}

const std::array<std::string, 17> &element_kg_relations() {
  static const std::array<std::string, 17> kRelations = {
      "isFamilyOf",          "isMetallicityOf",     "isPeriodOf",
      "isStateOf",           "isWeightOf",          "isElectronegativityOf",
      "isElectronAffinityOf", "isMeltingPointOf",   "isBoilingPointOf",
      "isIonizationOf",      "isRadiusOf",          "isHardnessOf",
      "isModulusOf",         "isDensityOf",         "isConductivityOf",
      "isHeatOf",            "isAbundanceOf"};
  return kRelations;
}

const std::vector<std::string> &iupac_elements() {
  static const std::vector<std::string> kElements = {
      "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
      "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
      "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
      "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
      "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
      "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
      "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
      "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
      "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
      "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};
  return kElements;
}

bool is_element_symbol(const std::string &symbol) {
  const auto &els = iupac_elements();
  return std::find(els.begin(), els.end(), symbol) != els.end();
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  out << triple_count << " triples, " << entity_count << " entities, "
      << relation_count << " relations\n";
  for (const auto &f : findings) {
    out << (f.kind == ValidationFinding::Kind::UnknownRelation
                ? "unknown relation"
                : "unknown element")
        << ": (" << f.triple.head << ", " << f.triple.relation << ", "
        << f.triple.tail << ") " << f.detail << "\n";
  }
  if (findings.empty()) out << "ok\n";
  return out.str();
}

ValidationReport validate_element_kg(const KnowledgeGraph &kg) {
  ValidationReport report;
  report.entity_count = kg.entities.size();
  report.relation_count = kg.relations.size();
  report.triple_count = kg.triples.size();

  const auto &vocab = element_kg_relations();
  for (const auto &t : kg.triples) {
    if (std::find(vocab.begin(), vocab.end(), t.relation) == vocab.end())
      report.findings.push_back({ValidationFinding::Kind::UnknownRelation, t,
                                 "relation not in vocabulary"});
    if (!is_element_symbol(t.tail))
      report.findings.push_back({ValidationFinding::Kind::UnknownElement, t,
                                 "tail is not an element symbol"});
  }
  return report;
}

std::vector<KnowledgeTriple> one_hop_properties(const KnowledgeGraph &kg,
                                                const std::string &element) {
  std::vector<KnowledgeTriple> out;
  for (const auto &t : kg.triples)
    if (t.tail == element) out.push_back(t);
  return out;
}

}  // namespace kgmol::kg
