//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/chem/molecule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "kgmol/errors.hpp"
#include "kgmol/rng.hpp"

namespace kgmol::chem {

double bond_order_value(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 1.0;
    case BondOrder::Double: return 2.0;
    case BondOrder::Triple: return 3.0;
    case BondOrder::Aromatic: return 1.5;
  }
  throw InternalError("bond_order_value: bad enum");
}

const char *bond_order_name(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return "single";
    case BondOrder::Double: return "double";
    case BondOrder::Triple: return "triple";
    case BondOrder::Aromatic: return "aromatic";
  }
  throw InternalError("bond_order_name: bad enum");
}

BondOrder bond_order_from_name(const std::string &name) {
  if (name == "single") return BondOrder::Single;
  if (name == "double") return BondOrder::Double;
  if (name == "triple") return BondOrder::Triple;
  if (name == "aromatic") return BondOrder::Aromatic;
  throw InputError("unknown bond order: " + name);
}

const std::vector<std::string> &supported_elements() {
  static const std::vector<std::string> table = {"B", "C",  "N",  "O", "P",
                                                 "S", "F", "Cl", "Br", "I"};
  return table;
}

bool is_supported_element(const std::string &symbol) {
  const auto &t = supported_elements();
  return std::find(t.begin(), t.end(), symbol) != t.end();
}

double bond_order_sum(const MolecularGraph &g, int atom) {
  if (atom < 0 || static_cast<std::size_t>(atom) >= g.atoms.size())
    throw InputError("bond_order_sum: atom index " + std::to_string(atom) +
                     " out of range for " + g.id);
  double sum = 0.0;
  for (const Bond &b : g.bonds)
    if (b.a == atom || b.b == atom) sum += bond_order_value(b.order);
  return sum;
}

namespace {

const std::vector<int> &valence_choices(const std::string &element) {
  static const std::vector<int> v1 = {1};
  static const std::vector<int> v2 = {2};
  static const std::vector<int> v3 = {3};
  static const std::vector<int> v4 = {4};
  static const std::vector<int> v35 = {3, 5};
  static const std::vector<int> v246 = {2, 4, 6};
  if (element == "B") return v3;
  if (element == "C") return v4;
  if (element == "N") return v3;
  if (element == "O") return v2;
  if (element == "P") return v35;
  if (element == "S") return v246;
  if (element == "F" || element == "Cl" || element == "Br" || element == "I")
    return v1;
  throw InputError("no standard valence for element " + element);
}

}  // namespace

int standard_valence(const std::string &element, double bond_sum) {
  const auto &choices = valence_choices(element);
  for (int v : choices)
    if (static_cast<double>(v) >= bond_sum - 1e-9) return v;
  return choices.back();
}

int implicit_hydrogens(const std::string &element, double bond_sum) {
  int valence = standard_valence(element, bond_sum);
  int h = static_cast<int>(std::floor(static_cast<double>(valence) -
                                      bond_sum + 1e-9));
  return std::max(0, h);
}

int implicit_hydrogens(const std::string &element, double bond_sum,
                       int formal_charge) {
  // Charge shifts the bond capacity: electron-poor B/C lose a slot per
  // unit charge of either sign, the lone-pair bearers N/O/P/S and the
  // halogens gain or lose with the sign (N+ binds 4, O- binds 1).
  int delta = formal_charge;
  if (element == "B" || element == "C") delta = -std::abs(formal_charge);
  int valence = standard_valence(element, bond_sum - delta) + delta;
  int h = static_cast<int>(std::floor(static_cast<double>(valence) -
                                      bond_sum + 1e-9));
  return std::max(0, h);
}

std::vector<std::vector<int>> adjacency(const MolecularGraph &g) {
  std::vector<std::vector<int>> adj(g.atoms.size());
  for (const Bond &b : g.bonds) {
    adj[b.a].push_back(b.b);
    adj[b.b].push_back(b.a);
  }
  return adj;
}

int component_count(const MolecularGraph &g) {
  const std::size_t n = g.atoms.size();
  if (n == 0) return 0;
  auto adj = adjacency(g);
  std::vector<bool> seen(n, false);
  int components = 0;
  std::vector<int> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++components;
    stack.push_back(static_cast<int>(start));
    seen[start] = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : adj[v])
        if (!seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
    }
  }
  return components;
}

void check_graph(const MolecularGraph &g) {
  const int n = static_cast<int>(g.atoms.size());
  for (int i = 0; i < n; ++i) {
    if (g.atoms[i].index != i)
      throw InternalError("graph " + g.id + ": atom indices not dense");
    if (g.atoms[i].implicit_h < 0)
      throw InternalError("graph " + g.id + ": negative implicit H");
  }
  std::set<std::pair<int, int>> seen;
  for (const Bond &b : g.bonds) {
    if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n)
      throw InternalError("graph " + g.id + ": bond endpoint out of range");
    if (b.a == b.b)
      throw InternalError("graph " + g.id + ": self bond");
    auto key = std::minmax(b.a, b.b);
    if (!seen.insert(key).second)
      throw InternalError("graph " + g.id + ": duplicate bond");
  }
}

MolecularGraph permute_atoms(const MolecularGraph &g,
                             const std::vector<int> &perm) {
  const std::size_t n = g.atoms.size();
  if (perm.size() != n) throw InputError("permute_atoms: size mismatch");
  std::vector<char> seen(n, 0);
  for (int v : perm) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[v])
      throw InputError("permute_atoms: not a permutation of 0..n-1");
    seen[v] = 1;
  }
  MolecularGraph out;
  out.id = g.id;
  out.atoms.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Atom a = g.atoms[i];
    a.index = perm[i];
    out.atoms[perm[i]] = std::move(a);
  }
  out.bonds.reserve(g.bonds.size());
  for (const Bond &b : g.bonds)
    out.bonds.push_back({perm[b.a], perm[b.b], b.order});
  return out;
}

std::string graph_signature(const MolecularGraph &g) {
  const std::size_t n = g.atoms.size();
  auto adj_bonds = std::vector<std::vector<std::pair<int, int>>>(n);
  for (std::size_t bi = 0; bi < g.bonds.size(); ++bi) {
    const Bond &b = g.bonds[bi];
    int order = static_cast<int>(b.order);
    adj_bonds[b.a].push_back({b.b, order});
    adj_bonds[b.b].push_back({b.a, order});
  }

  std::vector<std::uint64_t> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Atom &a = g.atoms[i];
    std::uint64_t h = fnv1a(a.element);
    h = hash_mix(h, a.aromatic ? 1u : 0u);
    h = hash_mix(h, static_cast<std::uint64_t>(a.formal_charge + 16));
    h = hash_mix(h, static_cast<std::uint64_t>(a.implicit_h));
    label[i] = h;
  }

  // Weisfeiler-Lehman style refinement: n rounds is enough to stabilize.
  std::vector<std::uint64_t> next(n);
  for (std::size_t round = 0; round < n; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::uint64_t> neigh;
      neigh.reserve(adj_bonds[i].size());
      for (auto [u, order] : adj_bonds[i])
        neigh.push_back(hash_mix(label[u], static_cast<std::uint64_t>(order)));
      std::sort(neigh.begin(), neigh.end());
      std::uint64_t h = label[i];
      for (std::uint64_t x : neigh) h = hash_mix(h, x);
      next[i] = h;
    }
    label.swap(next);
  }

  std::sort(label.begin(), label.end());
  std::uint64_t h = hash_mix(static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(g.bonds.size()));
  for (std::uint64_t x : label) h = hash_mix(h, x);

  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace kgmol::chem
