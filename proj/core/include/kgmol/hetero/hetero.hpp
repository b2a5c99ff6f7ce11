//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_HETERO_HETERO_HPP
#define KGMOL_HETERO_HETERO_HPP

#include <string>
#include <vector>

#include "kgmol/chem/molecule.hpp"
#include "kgmol/kg/triples.hpp"
#include "kgmol/moiety/moiety.hpp"

namespace kgmol::hetero {

enum class NodeKind { Atom, Property, Moiety };
enum class EdgeKind {
  Bond,
  PropOf,
  PartOf,
  Fused,
  Connected,
  Saturated,
  Unsaturated
};

const char *node_kind_name(NodeKind kind);
NodeKind node_kind_from_name(const std::string &name);
const char *edge_kind_name(EdgeKind kind);
EdgeKind edge_kind_from_name(const std::string &name);

struct HeteroNode {
  int id = 0;
  NodeKind kind = NodeKind::Atom;
  std::string label;

  bool operator==(const HeteroNode &) const = default;
};

struct HeteroEdge {
  int src = 0;
  int dst = 0;
  EdgeKind kind = EdgeKind::Bond;
  bool directed = false;
  std::string label;

  bool operator==(const HeteroEdge &) const = default;
};

/// Heterogeneous augmented graph. Atom nodes always occupy ids 0..n-1 in
/// molecule order; appended property/moiety nodes follow. Only prop_of
/// edges are directed.
struct HeteroGraph {
  std::string id;
  std::vector<HeteroNode> nodes;
  std::vector<HeteroEdge> edges;

  bool operator==(const HeteroGraph &) const = default;
};

/// Structural invariants: dense node ids, endpoint kinds per edge kind
/// (bond atom-atom, prop_of property->atom directed, part_of moiety-atom,
/// relation edges moiety-moiety). Throws InternalError on violation.
void check_hetero(const HeteroGraph &hg);

/// Atom node label: element symbol, lowercased when aromatic, with +/-/+n/-n
/// charge suffix.
std::string atom_label(const chem::Atom &atom);

struct AugmentOptions {
  /// One property node per (atom, property) instead of one shared node per
  /// distinct property.
  bool duplicate_properties = false;
};

/// The molecule alone as a HeteroGraph (atom nodes + bond edges).
HeteroGraph hetero_from_molecule(const chem::MolecularGraph &g);

/// Adds one property node per distinct 1-hop property head (shared across
/// atoms unless options.duplicate_properties) and one directed prop_of edge
/// per (triple, matching atom), labeled with the relation.
HeteroGraph augment_with_element_kg(const chem::MolecularGraph &g,
                                    const kg::KnowledgeGraph &graph,
                                    const AugmentOptions &options = {});

/// Adds one moiety node per moiety, part_of edges to every constituent
/// atom, and one labeled moiety-moiety edge per relation.
/// Throws InputError when a moiety references an atom outside g.
HeteroGraph augment_with_fg_kg(const chem::MolecularGraph &g,
                               const std::vector<moiety::Moiety> &moieties,
                               const std::vector<moiety::MoietyRelation> &rels);

/// Element-KG augmentation followed by FG augmentation on one graph.
HeteroGraph augment_composed(const chem::MolecularGraph &g,
                             const kg::KnowledgeGraph &graph,
                             const std::vector<moiety::Moiety> &moieties,
                             const std::vector<moiety::MoietyRelation> &rels,
                             const AugmentOptions &options = {});

/// JSON: {id, nodes:[{id,kind,label}], edges:[{src,dst,kind,directed,label}]}.
/// Round-trips losslessly through from_json.
std::string to_json(const HeteroGraph &hg);
HeteroGraph from_json(const std::string &text);

/// GraphViz export; node shapes by kind, edge styles by kind.
std::string to_dot(const HeteroGraph &hg);

/// Rebuilds the molecular graph from atom nodes and bond edges. Implicit
/// hydrogens are recomputed by the charge-adjusted valence rule, so
/// bracket atoms with nonstandard explicit H counts do not round-trip.
chem::MolecularGraph atom_bond_restriction(const HeteroGraph &hg);

}  // namespace kgmol::hetero

#endif  // KGMOL_HETERO_HETERO_HPP
