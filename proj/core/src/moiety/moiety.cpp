//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/moiety/moiety.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>

#include "kgmol/errors.hpp"

namespace kgmol::moiety {

namespace {

constexpr std::size_t kMaxRingSize = 12;

using BondMap = std::map<std::pair<int, int>, chem::BondOrder>;

BondMap bond_map(const chem::MolecularGraph &g) {
  BondMap map;
  for (const auto &b : g.bonds) map[std::minmax(b.a, b.b)] = b.order;
  return map;
}

std::optional<chem::BondOrder> bond_between(const BondMap &bonds, int a,
                                            int b) {
  auto it = bonds.find(std::minmax(a, b));
  if (it == bonds.end()) return std::nullopt;
  return it->second;
}

std::vector<int> sorted_atoms(const Moiety &m) {
  std::vector<int> s = m.atoms;
  std::sort(s.begin(), s.end());
  return s;
}

bool is_proper_subset(const std::vector<int> &a, const std::vector<int> &b) {
  return a.size() < b.size() &&
         std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// --- ring perception -------------------------------------------------------

using Bits = std::vector<std::uint64_t>;

void set_bit(Bits &bits, std::size_t i) { bits[i / 64] |= 1ull << (i % 64); }

bool any_bit(const Bits &bits) {
  for (auto w : bits)
    if (w) return true;
  return false;
}

int lowest_bit(const Bits &bits) {
  for (std::size_t w = 0; w < bits.size(); ++w)
    if (bits[w]) return static_cast<int>(w * 64 + __builtin_ctzll(bits[w]));
  return -1;
}

void xor_into(Bits &a, const Bits &b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

struct CandidateCycle {
  std::vector<int> vertices;  // cycle order
  Bits edges;
};

}  // namespace

const char *moiety_kind_name(MoietyKind kind) {
  switch (kind) {
    case MoietyKind::FunctionalGroup:
      return "functional_group";
    case MoietyKind::Ring:
      return "ring";
    case MoietyKind::AliphaticChain:
      return "aliphatic_chain";
  }
  throw InternalError("moiety_kind_name: unknown kind");
}

const char *relation_label_name(RelationLabel label) {
  switch (label) {
    case RelationLabel::Fused:
      return "fused";
    case RelationLabel::Connected:
      return "connected";
    case RelationLabel::Saturated:
      return "saturated";
    case RelationLabel::Unsaturated:
      return "unsaturated";
  }
  throw InternalError("relation_label_name: unknown label");
}

RelationLabel relation_label_from_name(const std::string &name) {
  if (name == "fused") return RelationLabel::Fused;
  if (name == "connected") return RelationLabel::Connected;
  if (name == "saturated") return RelationLabel::Saturated;
  if (name == "unsaturated") return RelationLabel::Unsaturated;
  throw InputError("unknown moiety relation label: " + name);
}

std::vector<Moiety> perceive_rings(const chem::MolecularGraph &g) {
  chem::check_graph(g);
  const int n = static_cast<int>(g.num_atoms());
  const std::size_t num_edges = g.num_bonds();
  const int needed = static_cast<int>(num_edges) - n + chem::component_count(g);
  if (needed <= 0) return {};

  std::map<std::pair<int, int>, std::size_t> edge_index;
  for (std::size_t i = 0; i < g.bonds.size(); ++i)
    edge_index[std::minmax(g.bonds[i].a, g.bonds[i].b)] = i;

  auto adj = chem::adjacency(g);
  for (auto &nbrs : adj) std::sort(nbrs.begin(), nbrs.end());

  // Shortest paths from every vertex; ascending neighbor order keeps the
  // BFS trees, and with them the candidate set, deterministic.
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  std::vector<std::vector<int>> parent(n, std::vector<int>(n, -1));
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    dist[s][s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : adj[v])
        if (dist[s][w] < 0) {
          dist[s][w] = dist[s][v] + 1;
          parent[s][w] = v;
          q.push(w);
        }
    }
  }

  auto path_from = [&](int s, int u) {
    std::vector<int> path;  // s .. u
    for (int v = u; v != -1; v = parent[s][v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
  };

  const std::size_t words = (num_edges + 63) / 64;
  std::vector<CandidateCycle> candidates;
  std::set<Bits> seen;
  for (int v = 0; v < n; ++v) {
    for (const auto &b : g.bonds) {
      int x = b.a, y = b.b;
      if (dist[v][x] < 0 || dist[v][y] < 0) continue;
      auto px = path_from(v, x);
      auto py = path_from(v, y);

      std::vector<int> cycle = px;
      for (std::size_t i = py.size(); i-- > 1;) cycle.push_back(py[i]);
      if (cycle.size() < 3) continue;
      std::set<int> distinct(cycle.begin(), cycle.end());
      if (distinct.size() != cycle.size()) continue;

      Bits edges(words, 0);
      bool ok = true;
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        int a = cycle[i], c = cycle[(i + 1) % cycle.size()];
        auto it = edge_index.find(std::minmax(a, c));
        if (it == edge_index.end()) {
          ok = false;
          break;
        }
        set_bit(edges, it->second);
      }
      if (!ok) continue;
      if (seen.insert(edges).second)
        candidates.push_back({std::move(cycle), std::move(edges)});
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const CandidateCycle &a, const CandidateCycle &b) {
              if (a.vertices.size() != b.vertices.size())
                return a.vertices.size() < b.vertices.size();
              return a.edges < b.edges;
            });

  // Greedy GF(2) selection of the smallest independent cycles.
  std::vector<std::pair<int, Bits>> basis;  // (pivot, reduced row)
  std::vector<const CandidateCycle *> selected;
  for (const auto &cand : candidates) {
    if (static_cast<int>(selected.size()) == needed) break;
    Bits row = cand.edges;
    for (const auto &[pivot, brow] : basis)
      if (row[pivot / 64] >> (pivot % 64) & 1) xor_into(row, brow);
    if (!any_bit(row)) continue;
    basis.emplace_back(lowest_bit(row), std::move(row));
    selected.push_back(&cand);
  }

  BondMap bonds = bond_map(g);
  std::vector<Moiety> rings;
  for (const auto *cand : selected) {
    if (cand->vertices.size() > kMaxRingSize) continue;
    std::vector<int> cycle = cand->vertices;

    auto min_it = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), min_it, cycle.end());
    if (cycle.back() < cycle[1])
      std::reverse(cycle.begin() + 1, cycle.end());

    bool aromatic = true;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      auto order =
          bond_between(bonds, cycle[i], cycle[(i + 1) % cycle.size()]);
      if (!order || *order != chem::BondOrder::Aromatic) {
        aromatic = false;
        break;
      }
    }

    Moiety m;
    m.kind = MoietyKind::Ring;
    m.type_label = aromatic ? "aromatic" : "aliphatic";
    m.atoms = std::move(cycle);
    rings.push_back(std::move(m));
  }

  std::sort(rings.begin(), rings.end(), [](const Moiety &a, const Moiety &b) {
    if (a.atoms.size() != b.atoms.size()) return a.atoms.size() < b.atoms.size();
    return a.atoms < b.atoms;
  });
  for (std::size_t i = 0; i < rings.size(); ++i)
    rings[i].id = "r" + std::to_string(i);
  return rings;
}

namespace {

struct GroupMatcher {
  const chem::MolecularGraph &g;
  const MoietyPattern &pattern;
  const BondMap &bonds;
  const std::vector<std::vector<int>> &adj;

  std::vector<int> order;      // pattern nodes, BFS from node 0
  std::vector<int> assign;     // pattern node -> atom (-1 unset)
  std::vector<bool> used;      // atom taken
  std::set<std::vector<int>> found_sets;        // per pattern dedup
  std::vector<std::vector<int>> found_scopes;   // scope images

  GroupMatcher(const chem::MolecularGraph &graph, const MoietyPattern &p,
               const BondMap &bond_lookup,
               const std::vector<std::vector<int>> &adjacency)
      : g(graph), pattern(p), bonds(bond_lookup), adj(adjacency) {
    const int k = static_cast<int>(p.nodes.size());
    assign.assign(k, -1);
    used.assign(g.num_atoms(), false);

    std::vector<bool> queued(k, false);
    std::queue<int> q;
    q.push(0);
    queued[0] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      order.push_back(v);
      for (const auto &e : p.edges) {
        int other = e.a == v ? e.b : e.b == v ? e.a : -1;
        if (other >= 0 && !queued[other]) {
          queued[other] = true;
          q.push(other);
        }
      }
    }
  }

  bool node_fits(int pn, int atom) const {
    const PatternNode &c = pattern.nodes[pn];
    const chem::Atom &a = g.atoms[atom];
    if (!c.elements.empty() &&
        std::find(c.elements.begin(), c.elements.end(), a.element) ==
            c.elements.end())
      return false;
    if (c.aromatic && *c.aromatic != a.aromatic) return false;
    int degree = static_cast<int>(adj[atom].size());
    if (degree < c.min_degree || degree > c.max_degree) return false;
    if (c.charge && *c.charge != a.formal_charge) return false;
    for (const auto &e : pattern.edges) {
      int other = e.a == pn ? e.b : e.b == pn ? e.a : -1;
      if (other < 0 || assign[other] < 0) continue;
      auto order = bond_between(bonds, atom, assign[other]);
      if (!order) return false;
      if (e.order && *e.order != *order) return false;
    }
    return true;
  }

  void record() {
    std::vector<int> scope_image;
    for (int s : pattern.scope) scope_image.push_back(assign[s]);
    std::vector<int> key = scope_image;
    std::sort(key.begin(), key.end());
    if (found_sets.insert(key).second)
      found_scopes.push_back(std::move(scope_image));
  }

  void extend(std::size_t depth) {
    if (depth == order.size()) {
      record();
      return;
    }
    int pn = order[depth];

    // Candidate atoms: neighbors of an already-assigned adjacent pattern
    // node when one exists (the BFS order guarantees it after depth 0).
    std::vector<int> candidates;
    if (depth == 0) {
      candidates.resize(g.num_atoms());
      for (std::size_t i = 0; i < candidates.size(); ++i)
        candidates[i] = static_cast<int>(i);
    } else {
      for (const auto &e : pattern.edges) {
        int other = e.a == pn ? e.b : e.b == pn ? e.a : -1;
        if (other >= 0 && assign[other] >= 0) {
          candidates = adj[assign[other]];
          break;
        }
      }
    }
    for (int atom : candidates) {
      if (used[atom] || !node_fits(pn, atom)) continue;
      assign[pn] = atom;
      used[atom] = true;
      extend(depth + 1);
      used[atom] = false;
      assign[pn] = -1;
    }
  }
};

}  // namespace

std::vector<Moiety> match_functional_groups(
    const chem::MolecularGraph &g, const std::vector<MoietyPattern> &lib) {
  chem::check_graph(g);
  BondMap bonds = bond_map(g);
  auto adj = chem::adjacency(g);
  for (auto &nbrs : adj) std::sort(nbrs.begin(), nbrs.end());

  struct RawMatch {
    std::string name;
    std::vector<int> scope;
    std::vector<int> sorted;
  };
  std::vector<RawMatch> raw;
  for (const auto &pattern : lib) {
    validate_pattern(pattern);
    GroupMatcher matcher(g, pattern, bonds, adj);
    matcher.extend(0);
    for (auto &scope : matcher.found_scopes) {
      RawMatch m;
      m.name = pattern.name;
      m.sorted = scope;
      std::sort(m.sorted.begin(), m.sorted.end());
      m.scope = std::move(scope);
      raw.push_back(std::move(m));
    }
  }

  // Most-specific only: drop matches strictly contained in another match.
  std::vector<Moiety> out;
  for (const auto &m : raw) {
    bool absorbed = false;
    for (const auto &other : raw)
      if (is_proper_subset(m.sorted, other.sorted)) {
        absorbed = true;
        break;
      }
    if (absorbed) continue;
    Moiety moiety;
    moiety.kind = MoietyKind::FunctionalGroup;
    moiety.type_label = m.name;
    moiety.atoms = m.scope;
    out.push_back(std::move(moiety));
  }

  std::sort(out.begin(), out.end(), [](const Moiety &a, const Moiety &b) {
    auto sa = sorted_atoms(a), sb = sorted_atoms(b);
    if (sa != sb) return sa < sb;
    return a.type_label < b.type_label;
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].id = "fg" + std::to_string(i);
  return out;
}

std::vector<Moiety> detect_aliphatic_chains(const chem::MolecularGraph &g,
                                            const std::vector<Moiety> &found) {
  chem::check_graph(g);
  std::set<int> ring_atoms;
  for (const auto &m : found)
    if (m.kind == MoietyKind::Ring)
      ring_atoms.insert(m.atoms.begin(), m.atoms.end());

  const int n = static_cast<int>(g.num_atoms());
  auto eligible = [&](int a) {
    return g.atoms[a].element == "C" && !g.atoms[a].aromatic &&
           !ring_atoms.count(a);
  };

  auto adj = chem::adjacency(g);
  std::vector<bool> visited(n, false);
  std::vector<Moiety> chains;
  BondMap bonds = bond_map(g);

  for (int start = 0; start < n; ++start) {
    if (visited[start] || !eligible(start)) continue;
    std::vector<int> comp;
    std::queue<int> q;
    q.push(start);
    visited[start] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      comp.push_back(v);
      for (int w : adj[v])
        if (!visited[w] && eligible(w)) {
          visited[w] = true;
          q.push(w);
        }
    }
    std::sort(comp.begin(), comp.end());

    bool covered = false;
    for (const auto &m : found) {
      if (m.kind != MoietyKind::FunctionalGroup) continue;
      auto fg = sorted_atoms(m);
      if (std::includes(fg.begin(), fg.end(), comp.begin(), comp.end())) {
        covered = true;
        break;
      }
    }
    if (covered) continue;

    bool saturated = true;
    for (std::size_t i = 0; i < comp.size() && saturated; ++i)
      for (std::size_t j = i + 1; j < comp.size() && saturated; ++j) {
        auto order = bond_between(bonds, comp[i], comp[j]);
        if (order && *order != chem::BondOrder::Single) saturated = false;
      }

    Moiety m;
    m.kind = MoietyKind::AliphaticChain;
    m.type_label = saturated ? "saturated_chain" : "unsaturated_chain";
    m.atoms = std::move(comp);
    chains.push_back(std::move(m));
  }

  std::sort(chains.begin(), chains.end(),
            [](const Moiety &a, const Moiety &b) { return a.atoms < b.atoms; });
  for (std::size_t i = 0; i < chains.size(); ++i)
    chains[i].id = "ch" + std::to_string(i);
  return chains;
}

std::vector<MoietyRelation> infer_moiety_relations(
    const chem::MolecularGraph &g, const std::vector<Moiety> &moieties) {
  chem::check_graph(g);
  const int n = static_cast<int>(g.num_atoms());
  for (const auto &m : moieties) {
    if (m.atoms.empty())
      throw InputError("moiety " + m.id + " has no atoms");
    for (int a : m.atoms)
      if (a < 0 || a >= n)
        throw InputError("moiety " + m.id +
                         " references an atom outside this molecule");
  }

  std::vector<std::vector<int>> sets;
  sets.reserve(moieties.size());
  for (const auto &m : moieties) sets.push_back(sorted_atoms(m));

  BondMap bonds = bond_map(g);
  std::vector<MoietyRelation> relations;
  for (std::size_t i = 0; i < moieties.size(); ++i) {
    for (std::size_t j = i + 1; j < moieties.size(); ++j) {
      std::vector<int> inter;
      std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(),
                            sets[j].end(), std::back_inserter(inter));
      if (!inter.empty()) {
        relations.push_back({i, j, RelationLabel::Fused});
        continue;
      }
      bool joined = false;
      for (int a : sets[i]) {
        for (int b : sets[j])
          if (bond_between(bonds, a, b)) {
            joined = true;
            break;
          }
        if (joined) break;
      }
      if (!joined) continue;

      auto chain_label = [](const Moiety &m) {
        return m.type_label == "saturated_chain" ? RelationLabel::Saturated
                                                 : RelationLabel::Unsaturated;
      };
      const bool ci = moieties[i].kind == MoietyKind::AliphaticChain;
      const bool cj = moieties[j].kind == MoietyKind::AliphaticChain;
      RelationLabel label = RelationLabel::Connected;
      if (ci && cj)
        label = chain_label(moieties[i]) == RelationLabel::Saturated &&
                        chain_label(moieties[j]) == RelationLabel::Saturated
                    ? RelationLabel::Saturated
                    : RelationLabel::Unsaturated;
      else if (ci)
        label = chain_label(moieties[i]);
      else if (cj)
        label = chain_label(moieties[j]);
      relations.push_back({i, j, label});
    }
  }
  return relations;
}

MoietySet detect_moieties(const chem::MolecularGraph &g,
                          const std::vector<MoietyPattern> &lib) {
  MoietySet set;
  auto rings = perceive_rings(g);
  auto groups = match_functional_groups(g, lib);
  std::vector<Moiety> context = rings;
  context.insert(context.end(), groups.begin(), groups.end());
  auto chains = detect_aliphatic_chains(g, context);

  set.moieties = std::move(rings);
  set.moieties.insert(set.moieties.end(), groups.begin(), groups.end());
  set.moieties.insert(set.moieties.end(), chains.begin(), chains.end());
  set.relations = infer_moiety_relations(g, set.moieties);
  return set;
}

namespace {

std::string atom_list(const std::vector<int> &atoms) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out << ",";
    out << atoms[i];
  }
  out << "]";
  return out.str();
}

}  // namespace

std::vector<std::string> emit_fg_records(
    const std::string &compound_id, const std::vector<Moiety> &moieties,
    const std::vector<MoietyRelation> &relations) {
  std::vector<std::string> records;
  for (const auto &m : moieties) {
    std::ostringstream out;
    if (m.kind == MoietyKind::Ring) {
      out << "ring(" << compound_id << ", " << m.id << ", "
          << atom_list(m.atoms) << ", " << m.length() << ", " << m.type_label
          << ")";
      records.push_back(out.str());
    } else if (m.kind == MoietyKind::FunctionalGroup) {
      out << "functional_group(" << compound_id << ", " << atom_list(m.atoms)
          << ", " << m.length() << ", " << m.type_label << ")";
      records.push_back(out.str());
    }
  }
  for (const auto &m : moieties) {
    std::ostringstream out;
    out << "has_struc(" << compound_id << ", " << atom_list(m.atoms) << ", "
        << m.length() << ", " << m.type_label << ")";
    records.push_back(out.str());
  }
  for (const auto &r : relations) {
    if (r.a >= moieties.size() || r.b >= moieties.size())
      throw InternalError("emit_fg_records: relation index out of range");
    const Moiety &a = moieties[r.a];
    const Moiety &b = moieties[r.b];
    std::ostringstream out;
    out << relation_label_name(r.label) << "(" << compound_id << ", " << a.id
        << ", " << atom_list(a.atoms) << ", " << b.id << ", "
        << atom_list(b.atoms) << ")";
    records.push_back(out.str());
  }
  return records;
}

}  // namespace kgmol::moiety
