//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_TESTS_TEST_UTIL_HPP
#define KGMOL_TESTS_TEST_UTIL_HPP

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kgmol/chem/mol_io.hpp"
#include "kgmol/chem/smiles.hpp"

namespace kgmol::test {

inline std::string data_path(const std::string &name) {
  return std::string(KGMOL_DATA_DIR) + "/" + name;
}

/// Fresh scratch directory under the system temp dir; never reused.
inline std::filesystem::path scratch_dir() {
  static std::atomic<unsigned> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("kgmol-test-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::vector<chem::MoleculeRecord> load_corpus() {
  return chem::read_molecule_file(data_path("corpus20.smi"));
}

inline chem::MolecularGraph mol(const std::string &smiles,
                                const std::string &id = "m") {
  return chem::parse_smiles(smiles, id);
}

}  // namespace kgmol::test

#endif  // KGMOL_TESTS_TEST_UTIL_HPP
