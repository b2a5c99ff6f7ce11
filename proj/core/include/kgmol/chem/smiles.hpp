//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_CHEM_SMILES_HPP
#define KGMOL_CHEM_SMILES_HPP

#include <string>
#include <string_view>

#include "kgmol/chem/molecule.hpp"

namespace kgmol::chem {

/// Parses the supported SMILES subset into a molecular graph.
///
/// Grammar: organic-subset atoms (B C N O P S F Cl Br I), aromatic
/// lowercase (b c n o p s), bracket atoms `[<symbol>[H<n>][+|-|+n|-n]]`,
/// branches `( )`, ring-closure digits `1`-`9` and `%nn`, bond symbols
/// `-` `=` `#`, and `.` as a fragment separator. No stereochemistry,
/// isotopes or wildcards.
///
/// Implicit hydrogens are assigned from the standard-valence rule for
/// plain atoms, and taken verbatim from the H count for bracket atoms.
/// A bond with no symbol is aromatic when both endpoints are aromatic,
/// single otherwise.
///
/// Throws ParseError (with position) on syntax errors, unsupported
/// elements, unmatched ring closures and unbalanced parentheses.
MolecularGraph parse_smiles(std::string_view text, std::string id);

}  // namespace kgmol::chem

#endif  // KGMOL_CHEM_SMILES_HPP
