//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_MOIETY_MOIETY_HPP
#define KGMOL_MOIETY_MOIETY_HPP

#include <string>
#include <vector>

#include "kgmol/chem/molecule.hpp"
#include "kgmol/moiety/pattern.hpp"

namespace kgmol::moiety {

enum class MoietyKind { FunctionalGroup, Ring, AliphaticChain };

const char *moiety_kind_name(MoietyKind kind);

/// One detected substructure. `atoms` order is meaningful: rings are in
/// normalized cycle order (smallest atom first, smaller neighbor second),
/// functional groups follow the pattern scope order, chains are ascending.
struct Moiety {
  std::string id;  // r0.., fg0.., ch0.. within one molecule
  MoietyKind kind = MoietyKind::FunctionalGroup;
  std::string type_label;  // ring: aromatic|aliphatic; fg: pattern name;
                           // chain: saturated_chain|unsaturated_chain
  std::vector<int> atoms;

  std::size_t length() const { return atoms.size(); }

  bool operator==(const Moiety &) const = default;
};

enum class RelationLabel { Fused, Connected, Saturated, Unsaturated };

const char *relation_label_name(RelationLabel label);
RelationLabel relation_label_from_name(const std::string &name);

/// Relation between moieties `a` and `b` (indices into one moiety list,
/// a < b).
struct MoietyRelation {
  std::size_t a = 0;
  std::size_t b = 0;
  RelationLabel label = RelationLabel::Connected;

  bool operator==(const MoietyRelation &) const = default;
};

/// Minimum-cycle-basis ring perception: candidate shortest-path cycles,
/// greedily selected smallest-first until the cycle space (E - V + C) is
/// spanned. Cycles longer than 12 are discarded. Ring type is aromatic iff
/// every cycle bond is aromatic. Ids r0, r1, ... in output order.
std::vector<Moiety> perceive_rings(const chem::MolecularGraph &g);

/// Backtracking subgraph matching of every library pattern. Matches are
/// deduplicated by (name, atom set); matches whose atom set is a proper
/// subset of another match's set are suppressed (most-specific only).
/// Ids fg0, fg1, ... in output order.
std::vector<Moiety> match_functional_groups(
    const chem::MolecularGraph &g, const std::vector<MoietyPattern> &lib);

/// Maximal connected sets of non-ring carbons, dropped when one functional
/// group match covers the whole set. Saturated iff all internal C-C bonds
/// are single. Ids ch0, ch1, ... in output order.
std::vector<Moiety> detect_aliphatic_chains(const chem::MolecularGraph &g,
                                            const std::vector<Moiety> &found);

/// Pairwise relations: fused when atom sets intersect; else, when a bond
/// joins the two sets, saturated/unsaturated (per the chain's label) if a
/// side is a chain, connected otherwise; no relation when neither holds.
/// Throws InputError when a moiety references an invalid atom.
std::vector<MoietyRelation> infer_moiety_relations(
    const chem::MolecularGraph &g, const std::vector<Moiety> &moieties);

struct MoietySet {
  std::vector<Moiety> moieties;  // rings, then groups, then chains
  std::vector<MoietyRelation> relations;
};

/// Full pipeline: rings, functional groups, chains, relations.
MoietySet detect_moieties(const chem::MolecularGraph &g,
                          const std::vector<MoietyPattern> &lib);

/// Textual relational records, one per line:
///   ring(id, rK, [atoms], length, type)
///   functional_group(id, [atoms], length, name)
///   has_struc(id, [atoms], length, type)      one per moiety
///   fused(id, m1, [atoms1], m2, [atoms2])     likewise connected/
///                                             saturated/unsaturated
/// Order: rings, groups, has_struc per moiety, relations.
std::vector<std::string> emit_fg_records(
    const std::string &compound_id, const std::vector<Moiety> &moieties,
    const std::vector<MoietyRelation> &relations);

}  // namespace kgmol::moiety

#endif  // KGMOL_MOIETY_MOIETY_HPP
