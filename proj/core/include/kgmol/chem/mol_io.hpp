//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_CHEM_MOL_IO_HPP
#define KGMOL_CHEM_MOL_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgmol/chem/molecule.hpp"

namespace kgmol::chem {

/// One line of a molecule list file: `SMILES<TAB>id[<TAB>label]`.
struct MoleculeRecord {
  MolecularGraph graph;
  std::optional<std::string> label;
};

/// Reads a molecule list. `#` lines and blank lines are ignored.
/// Throws InputError with the line number on malformed records.
std::vector<MoleculeRecord> read_molecule_file(std::istream &in);
std::vector<MoleculeRecord> read_molecule_file(const std::string &path);

}  // namespace kgmol::chem

#endif  // KGMOL_CHEM_MOL_IO_HPP
