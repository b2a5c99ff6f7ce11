//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_MOIETY_PATTERN_HPP
#define KGMOL_MOIETY_PATTERN_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgmol/chem/molecule.hpp"

namespace kgmol::moiety {

/// Constraint on one pattern atom. Empty element list = any element;
/// absent optionals = unconstrained. Degrees count heavy-atom bonds.
struct PatternNode {
  std::vector<std::string> elements;
  std::optional<bool> aromatic;
  int min_degree = 0;
  int max_degree = 8;
  std::optional<int> charge;

  bool operator==(const PatternNode &) const = default;
};

/// Pattern bond between node indices a < b conceptually (any order accepted);
/// absent order matches any bond order.
struct PatternEdge {
  int a = 0;
  int b = 0;
  std::optional<chem::BondOrder> order;

  bool operator==(const PatternEdge &) const = default;
};

/// Connected constraint graph for one functional-group type. `scope` lists
/// the pattern nodes (in emission order) that form the reported match; the
/// remaining nodes are context anchors.
struct MoietyPattern {
  std::string name;
  std::vector<PatternNode> nodes;
  std::vector<PatternEdge> edges;
  std::vector<int> scope;
  std::string notes;

  bool operator==(const MoietyPattern &) const = default;
};

/// Throws InputError describing the first malformed field: empty name,
/// invalid indices, self/duplicate edges, disconnected pattern,
/// unsatisfiable degree bounds, or empty/duplicated scope.
void validate_pattern(const MoietyPattern &pattern);

/// The 16 shipped group types: hydroxyl, carbonyl, carboxyl, ester, ether,
/// primary/secondary/tertiary amine, amide, nitro, nitrile, thiol, halo,
/// sulfonyl, alkene, alkyne.
const std::vector<MoietyPattern> &builtin_patterns();

/// The shipped library as JSON text (the schema accepted by load_patterns).
std::string builtin_patterns_json();

/// Parses a pattern library JSON document:
/// {version:1, patterns:[{name, nodes:[{elements, aromatic, min_degree,
/// max_degree, charge}], edges:[{a, b, order}], scope, notes}]}.
/// Every pattern is validated; throws InputError on malformed input.
std::vector<MoietyPattern> load_patterns(std::istream &in);
std::vector<MoietyPattern> load_patterns(const std::string &path);

}  // namespace kgmol::moiety

#endif  // KGMOL_MOIETY_PATTERN_HPP
