//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/moiety/pattern.hpp"

#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

#include "kgmol/errors.hpp"

namespace kgmol::moiety {

void validate_pattern(const MoietyPattern &pattern) {
  auto fail = [&](const std::string &why) {
    throw InputError("malformed pattern '" + pattern.name + "': " + why);
  };
  if (pattern.name.empty()) throw InputError("malformed pattern: empty name");
  if (pattern.nodes.empty()) fail("no nodes");

  const int n = static_cast<int>(pattern.nodes.size());
  std::vector<int> degree(n, 0);
  std::set<std::pair<int, int>> seen;
  for (const auto &e : pattern.edges) {
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) fail("edge index out of range");
    if (e.a == e.b) fail("self edge");
    auto key = std::minmax(e.a, e.b);
    if (!seen.insert(key).second) fail("duplicate edge");
    ++degree[e.a];
    ++degree[e.b];
  }
  for (int i = 0; i < n; ++i) {
    const auto &node = pattern.nodes[i];
    if (node.min_degree > node.max_degree) fail("min_degree > max_degree");
    if (degree[i] > node.max_degree)
      fail("node has more pattern edges than max_degree allows");
    for (const auto &el : node.elements)
      if (el.empty()) fail("empty element constraint");
  }

  // Connectivity over the constraint graph.
  if (n > 1) {
    std::vector<std::vector<int>> adj(n);
    for (const auto &e : pattern.edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    std::vector<bool> visited(n, false);
    std::queue<int> q;
    q.push(0);
    visited[0] = true;
    int reached = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : adj[v])
        if (!visited[w]) {
          visited[w] = true;
          ++reached;
          q.push(w);
        }
    }
    if (reached != n) fail("pattern graph not connected");
  }

  if (pattern.scope.empty()) fail("empty scope");
  std::set<int> scope_seen;
  for (int s : pattern.scope) {
    if (s < 0 || s >= n) fail("scope index out of range");
    if (!scope_seen.insert(s).second) fail("duplicate scope index");
  }
}

std::string builtin_patterns_json() {
  return R"({
  "version": 1,
  "patterns": [
    {
      "name": "hydroxyl",
      "nodes": [
        {"elements": ["O"], "aromatic": false, "min_degree": 1, "max_degree": 1, "charge": 0},
        {"elements": ["C"]}
      ],
      "edges": [{"a": 0, "b": 1, "order": "single"}],
      "scope": [0, 1],
      "notes": "alcohol or phenol OH; acid hydroxyls are absorbed by carboxyl"
    },
    {
      "name": "carbonyl",
      "nodes": [
        {"elements": ["C"], "aromatic": false},
        {"elements": ["O"], "aromatic": false, "min_degree": 1, "max_degree": 1, "charge": 0}
      ],
      "edges": [{"a": 0, "b": 1, "order": "double"}],
      "scope": [0, 1],
      "notes": "bare C=O; absorbed by carboxyl, ester and amide where those apply"
    },
    {
      "name": "carboxyl",
      "nodes": [
        {"elements": ["C"], "aromatic": false},
        {"elements": ["O"], "aromatic": false, "min_degree": 1, "max_degree": 1, "charge": 0},
        {"elements": ["O"], "aromatic": false, "min_degree": 1, "max_degree": 1, "charge": 0}
      ],
      "edges": [
        {"a": 0, "b": 1, "order": "double"},
        {"a": 0, "b": 2, "order": "single"}
      ],
      "scope": [0, 1, 2],
      "notes": "COOH; the singly bonded O must be terminal, excluding esters"
    },
    {
      "name": "ester",
      "nodes": [
        {"elements": ["C"], "aromatic": false},
        {"elements": ["O"], "aromatic": false, "min_degree": 1, "max_degree": 1, "charge": 0},
        {"elements": ["O"], "aromatic": false, "min_degree": 2, "max_degree": 2, "charge": 0},
        {"elements": ["C"]}
      ],
      "edges": [
        {"a": 0, "b": 1, "order": "double"},
        {"a": 0, "b": 2, "order": "single"},
        {"a": 2, "b": 3, "order": "single"}
      ],
      "scope": [0, 1, 2, 3],
      "notes": "C(=O)O-C including the bridging O's far carbon"
    },
    {
      "name": "ether",
      "nodes": [
        {"elements": ["C"]},
        {"elements": ["O"], "aromatic": false, "min_degree": 2, "max_degree": 2, "charge": 0},
        {"elements": ["C"]}
      ],
      "edges": [
        {"a": 0, "b": 1, "order": "single"},
        {"a": 1, "b": 2, "order": "single"}
      ],
      "scope": [0, 1, 2],
      "notes": "C-O-C; ester bridges are absorbed by the ester type"
    },
    {
      "name": "primary_amine",
      "nodes": [
        {"elements": ["N"], "aromatic": false, "min_degree": 1, "max_degree": 1, "charge": 0},
        {"elements": ["C"]}
      ],
      "edges": [{"a": 0, "b": 1, "order": "single"}],
      "scope": [0, 1],
      "notes": "terminal N single-bonded to one carbon"
    },
    {
      "name": "secondary_amine",
      "nodes": [
        {"elements": ["N"], "aromatic": false, "min_degree": 2, "max_degree": 2, "charge": 0},
        {"elements": ["C"]},
        {"elements": ["C"]}
      ],
      "edges": [
        {"a": 0, "b": 1, "order": "single"},
        {"a": 0, "b": 2, "order": "single"}
      ],
      "scope": [0, 1, 2],
      "notes": "N bonded to exactly two carbons"
    },
    {
      "name": "tertiary_amine",
      "nodes": [
        {"elements": ["N"], "aromatic": false, "min_degree": 3, "max_degree": 3, "charge": 0},
        {"elements": ["C"]},
        {"elements": ["C"]},
        {"elements": ["C"]}
      ],
      "edges": [
        {"a": 0, "b": 1, "order": "single"},
        {"a": 0, "b": 2, "order": "single"},
        {"a": 0, "b": 3, "order": "single"}
      ],
      "scope": [0, 1, 2, 3],
      "notes": "N bonded to exactly three carbons"
    },
    {
      "name": "amide",
      "nodes": [
        {"elements": ["C"], "aromatic": false},
        {"elements": ["O"], "aromatic": false, "min_degree": 1, "max_degree": 1, "charge": 0},
        {"elements": ["N"], "aromatic": false, "charge": 0}
      ],
      "edges": [
        {"a": 0, "b": 1, "order": "double"},
        {"a": 0, "b": 2, "order": "single"}
      ],
      "scope": [0, 1, 2],
      "notes": "C(=O)N; overlapping amine matches on the same N are kept"
    },
    {
      "name": "nitro",
      "nodes": [
        {"elements": ["N"], "aromatic": false, "charge": 1},
        {"elements": ["O"], "min_degree": 1, "max_degree": 1, "charge": 0},
        {"elements": ["O"], "min_degree": 1, "max_degree": 1, "charge": -1}
      ],
      "edges": [
        {"a": 0, "b": 1, "order": "double"},
        {"a": 0, "b": 2, "order": "single"}
      ],
      "scope": [0, 1, 2],
      "notes": "charge-separated nitro form [N+](=O)[O-]"
    },
    {
      "name": "nitrile",
      "nodes": [
        {"elements": ["C"], "aromatic": false},
        {"elements": ["N"], "aromatic": false, "min_degree": 1, "max_degree": 1, "charge": 0}
      ],
      "edges": [{"a": 0, "b": 1, "order": "triple"}],
      "scope": [0, 1],
      "notes": "C#N"
    },
    {
      "name": "thiol",
      "nodes": [
        {"elements": ["S"], "aromatic": false, "min_degree": 1, "max_degree": 1, "charge": 0},
        {"elements": ["C"]}
      ],
      "edges": [{"a": 0, "b": 1, "order": "single"}],
      "scope": [0, 1],
      "notes": "terminal SH on carbon"
    },
    {
      "name": "halo",
      "nodes": [
        {"elements": ["F", "Cl", "Br", "I"], "min_degree": 1, "max_degree": 1, "charge": 0},
        {"elements": ["C"]}
      ],
      "edges": [{"a": 0, "b": 1, "order": "single"}],
      "scope": [0, 1],
      "notes": "halogen substituent with its anchor carbon"
    },
    {
      "name": "sulfonyl",
      "nodes": [
        {"elements": ["S"], "aromatic": false, "min_degree": 3, "max_degree": 4, "charge": 0},
        {"elements": ["O"], "min_degree": 1, "max_degree": 1, "charge": 0},
        {"elements": ["O"], "min_degree": 1, "max_degree": 1, "charge": 0}
      ],
      "edges": [
        {"a": 0, "b": 1, "order": "double"},
        {"a": 0, "b": 2, "order": "double"}
      ],
      "scope": [0, 1, 2],
      "notes": "S(=O)(=O) core of sulfones and sulfonic acids"
    },
    {
      "name": "alkene",
      "nodes": [
        {"elements": ["C"], "aromatic": false},
        {"elements": ["C"], "aromatic": false}
      ],
      "edges": [{"a": 0, "b": 1, "order": "double"}],
      "scope": [0, 1],
      "notes": "non-aromatic C=C"
    },
    {
      "name": "alkyne",
      "nodes": [
        {"elements": ["C"], "aromatic": false},
        {"elements": ["C"], "aromatic": false}
      ],
      "edges": [{"a": 0, "b": 1, "order": "triple"}],
      "scope": [0, 1],
      "notes": "C#C"
    }
  ]
}
)";
}

namespace {

std::vector<MoietyPattern> parse_patterns(const nlohmann::json &root) {
  if (!root.is_object() || root.value("version", 0) != 1)
    throw InputError("pattern library: unsupported or missing version");
  if (!root.contains("patterns") || !root.at("patterns").is_array())
    throw InputError("pattern library: missing 'patterns' array");

  std::vector<MoietyPattern> out;
  for (const auto &jp : root.at("patterns")) {
    MoietyPattern p;
    p.name = jp.value("name", "");
    for (const auto &jn : jp.value("nodes", nlohmann::json::array())) {
      PatternNode n;
      if (jn.contains("elements"))
        n.elements = jn.at("elements").get<std::vector<std::string>>();
      if (jn.contains("aromatic")) n.aromatic = jn.at("aromatic").get<bool>();
      n.min_degree = jn.value("min_degree", 0);
      n.max_degree = jn.value("max_degree", 8);
      if (jn.contains("charge")) n.charge = jn.at("charge").get<int>();
      p.nodes.push_back(std::move(n));
    }
    for (const auto &je : jp.value("edges", nlohmann::json::array())) {
      PatternEdge e;
      e.a = je.at("a").get<int>();
      e.b = je.at("b").get<int>();
      if (je.contains("order"))
        e.order = chem::bond_order_from_name(je.at("order").get<std::string>());
      p.edges.push_back(e);
    }
    if (jp.contains("scope")) p.scope = jp.at("scope").get<std::vector<int>>();
    p.notes = jp.value("notes", "");
    validate_pattern(p);
    out.push_back(std::move(p));
  }
  if (out.empty()) throw InputError("pattern library: no patterns");
  return out;
}

}  // namespace

const std::vector<MoietyPattern> &builtin_patterns() {
  static const std::vector<MoietyPattern> kPatterns = [] {
    std::istringstream in(builtin_patterns_json());
    return load_patterns(in);
  }();
  return kPatterns;
}

std::vector<MoietyPattern> load_patterns(std::istream &in) {
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception &e) {
    throw InputError(std::string("pattern library: invalid JSON: ") +
                     e.what());
  }
  return parse_patterns(root);
}

std::vector<MoietyPattern> load_patterns(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open pattern library: " + path);
  return load_patterns(in);
}

}  // namespace kgmol::moiety
