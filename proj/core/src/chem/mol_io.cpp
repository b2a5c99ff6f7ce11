//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/chem/mol_io.hpp"

#include <fstream>
#include <sstream>

#include "kgmol/chem/smiles.hpp"
#include "kgmol/errors.hpp"

namespace kgmol::chem {

std::vector<MoleculeRecord> read_molecule_file(std::istream &in) {
  std::vector<MoleculeRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 3)
      throw InputError("molecule file line " + std::to_string(lineno) +
                       ": expected SMILES<TAB>id[<TAB>label]");
    if (fields[0].empty() || fields[1].empty())
      throw InputError("molecule file line " + std::to_string(lineno) +
                       ": empty field");

    MoleculeRecord rec;
    try {
      rec.graph = parse_smiles(fields[0], fields[1]);
    } catch (const ParseError &e) {
      throw InputError("molecule file line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    if (fields.size() == 3) rec.label = fields[2];
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<MoleculeRecord> read_molecule_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open molecule file: " + path);
  return read_molecule_file(in);
}

}  // namespace kgmol::chem
