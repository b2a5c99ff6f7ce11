//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_KG_TRIPLES_HPP
#define KGMOL_KG_TRIPLES_HPP

#include <array>
#include <compare>
#include <iosfwd>
#include <string>
#include <vector>

namespace kgmol::kg {

/// One (head, relation, tail) statement. For the Chemical Element KG the
/// head is a property category and the tail an element symbol,
/// e.g. (Gas, isStateOf, Cl).
struct KnowledgeTriple {
  std::string head;
  std::string relation;
  std::string tail;

  auto operator<=>(const KnowledgeTriple &) const = default;
};

/// Immutable triple store. Triples are kept sorted and deduplicated;
/// entity/relation indices cover exactly the strings appearing in triples.
struct KnowledgeGraph {
  std::vector<KnowledgeTriple> triples;
  std::vector<std::string> entities;   // sorted, distinct heads + tails
  std::vector<std::string> relations;  // sorted, distinct

  bool contains(const KnowledgeTriple &t) const;
};

/// Builds the sorted/deduplicated graph from an arbitrary triple list.
KnowledgeGraph make_knowledge_graph(std::vector<KnowledgeTriple> triples);

/// Reads TSV lines `head<TAB>relation<TAB>tail`; `#` comments and blank
/// lines are skipped. Throws InputError with the line number on malformed
/// or empty fields.
KnowledgeGraph load_triples(std::istream &in);
KnowledgeGraph load_triples(const std::string &path);

/// The 17 relation names of the Chemical Element KG.
const std::array<std::string, 17> &element_kg_relations();

/// The 118 IUPAC element symbols.
const std::vector<std::string> &iupac_elements();
bool is_element_symbol(const std::string &symbol);

struct ValidationFinding {
  enum class Kind { UnknownRelation, UnknownElement };
  Kind kind;
  KnowledgeTriple triple;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  std::size_t triple_count = 0;

  bool valid() const { return findings.empty(); }
  std::string to_text() const;
};

/// Structural check of an element KG: every relation must be one of the 17
/// vocabulary names and every tail a known element symbol. Findings are
/// reported, never thrown.
ValidationReport validate_element_kg(const KnowledgeGraph &kg);

/// All triples whose tail equals `element`, in sorted order. Empty when the
/// element does not occur.
std::vector<KnowledgeTriple> one_hop_properties(const KnowledgeGraph &kg,
                                                const std::string &element);

}  // namespace kgmol::kg

#endif  // KGMOL_KG_TRIPLES_HPP
