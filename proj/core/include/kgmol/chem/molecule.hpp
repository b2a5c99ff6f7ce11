//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_CHEM_MOLECULE_HPP
#define KGMOL_CHEM_MOLECULE_HPP

#include <string>
#include <vector>

namespace kgmol::chem {

enum class BondOrder { Single, Double, Triple, Aromatic };

/// Numeric bond order; aromatic counts as 1.5.
double bond_order_value(BondOrder order);

const char *bond_order_name(BondOrder order);
BondOrder bond_order_from_name(const std::string &name);

/// Heavy atom. Hydrogens are implicit counts, never nodes.
struct Atom {
  int index = 0;
  std::string element;
  bool aromatic = false;
  int formal_charge = 0;
  int implicit_h = 0;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
};

/// Molecular graph: atoms as nodes, bonds as edges. Atom indices are dense
/// 0..n-1 and `atoms[i].index == i`.
struct MolecularGraph {
  std::string id;
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  std::size_t num_atoms() const { return atoms.size(); }
  std::size_t num_bonds() const { return bonds.size(); }
};

/// Elements accepted by the parser: B, C, N, O, P, S, F, Cl, Br, I.
const std::vector<std::string> &supported_elements();
bool is_supported_element(const std::string &symbol);

/// Sum of incident bond orders for one atom (aromatic = 1.5).
/// Throws InputError if the index is out of range.
double bond_order_sum(const MolecularGraph &g, int atom);

/// Standard valence used for implicit-hydrogen assignment: the smallest
/// standard valence of the element that is >= the explicit bond-order sum
/// (B3, C4, N3, O2, P3/5, S2/4/6, halogens 1). Falls back to the largest
/// standard valence for over-bonded atoms.
int standard_valence(const std::string &element, double bond_sum);

/// Implicit hydrogens from the valence rule, clamped at zero.
int implicit_hydrogens(const std::string &element, double bond_sum);

/// Charge-adjusted variant: the capacity shifts by the formal charge
/// (N+ binds 4, O- binds 1); B and C lose a slot per unit of either sign.
int implicit_hydrogens(const std::string &element, double bond_sum,
                       int formal_charge);

/// Neighbor lists (atom index -> adjacent atom indices).
std::vector<std::vector<int>> adjacency(const MolecularGraph &g);

/// Connected components; 1 for a connected molecule.
int component_count(const MolecularGraph &g);

/// Validates index density, bond endpoints and duplicate bonds.
/// Throws InternalError on violation.
void check_graph(const MolecularGraph &g);

/// Applies an atom relabeling: atom i of the input becomes atom perm[i] of
/// the output. perm must be a permutation of 0..n-1.
MolecularGraph permute_atoms(const MolecularGraph &g,
                             const std::vector<int> &perm);

/// String invariant under atom relabeling (iterative degree/element
/// refinement hash). Equal graphs produce equal signatures.
std::string graph_signature(const MolecularGraph &g);

}  // namespace kgmol::chem

#endif  // KGMOL_CHEM_MOLECULE_HPP
