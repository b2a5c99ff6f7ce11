//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/hetero/hetero.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "json.hpp"

#include "kgmol/errors.hpp"

namespace kgmol::hetero {

const char *node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Atom:
      return "atom";
    case NodeKind::Property:
      return "property";
    case NodeKind::Moiety:
      return "moiety";
  }
  throw InternalError("node_kind_name: unknown kind");
}

NodeKind node_kind_from_name(const std::string &name) {
  if (name == "atom") return NodeKind::Atom;
  if (name == "property") return NodeKind::Property;
  if (name == "moiety") return NodeKind::Moiety;
  throw InputError("unknown node kind: " + name);
}

const char *edge_kind_name(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Bond:
      return "bond";
    case EdgeKind::PropOf:
      return "prop_of";
    case EdgeKind::PartOf:
      return "part_of";
    case EdgeKind::Fused:
      return "fused";
    case EdgeKind::Connected:
      return "connected";
    case EdgeKind::Saturated:
      return "saturated";
    case EdgeKind::Unsaturated:
      return "unsaturated";
  }
  throw InternalError("edge_kind_name: unknown kind");
}

EdgeKind edge_kind_from_name(const std::string &name) {
  if (name == "bond") return EdgeKind::Bond;
  if (name == "prop_of") return EdgeKind::PropOf;
  if (name == "part_of") return EdgeKind::PartOf;
  if (name == "fused") return EdgeKind::Fused;
  if (name == "connected") return EdgeKind::Connected;
  if (name == "saturated") return EdgeKind::Saturated;
  if (name == "unsaturated") return EdgeKind::Unsaturated;
  throw InputError("unknown edge kind: " + name);
}

void check_hetero(const HeteroGraph &hg) {
  const int n = static_cast<int>(hg.nodes.size());
  for (int i = 0; i < n; ++i)
    if (hg.nodes[i].id != i)
      throw InternalError("check_hetero: node ids not dense");

  auto kind_of = [&](int id) {
    if (id < 0 || id >= n)
      throw InternalError("check_hetero: edge endpoint out of range");
    return hg.nodes[id].kind;
  };

  for (const auto &e : hg.edges) {
    NodeKind src = kind_of(e.src);
    NodeKind dst = kind_of(e.dst);
    switch (e.kind) {
      case EdgeKind::Bond:
        if (src != NodeKind::Atom || dst != NodeKind::Atom || e.directed)
          throw InternalError("check_hetero: malformed bond edge");
        break;
      case EdgeKind::PropOf:
        if (src != NodeKind::Property || dst != NodeKind::Atom || !e.directed)
          throw InternalError("check_hetero: malformed prop_of edge");
        break;
      case EdgeKind::PartOf:
        if (src != NodeKind::Moiety || dst != NodeKind::Atom || e.directed)
          throw InternalError("check_hetero: malformed part_of edge");
        break;
      default:
        if (src != NodeKind::Moiety || dst != NodeKind::Moiety || e.directed)
          throw InternalError("check_hetero: malformed moiety relation edge");
        break;
    }
  }
}

std::string atom_label(const chem::Atom &atom) {
  std::string label = atom.element;
  if (atom.aromatic)
    for (auto &c : label) c = static_cast<char>(std::tolower(c));
  if (atom.formal_charge > 0) {
    label += "+";
    if (atom.formal_charge > 1) label += std::to_string(atom.formal_charge);
  } else if (atom.formal_charge < 0) {
    label += "-";
    if (atom.formal_charge < -1) label += std::to_string(-atom.formal_charge);
  }
  return label;
}

namespace {

chem::Atom atom_from_label(int index, const std::string &label) {
  chem::Atom atom;
  atom.index = index;

  std::size_t end = label.size();
  std::size_t sign = label.find_first_of("+-");
  if (sign != std::string::npos) {
    int magnitude = 1;
    if (sign + 1 < label.size())
      magnitude = std::stoi(label.substr(sign + 1));
    atom.formal_charge = label[sign] == '+' ? magnitude : -magnitude;
    end = sign;
  }
  std::string symbol = label.substr(0, end);
  if (symbol.empty()) throw InputError("empty atom label");
  if (std::islower(static_cast<unsigned char>(symbol[0]))) {
    atom.aromatic = true;
    symbol[0] = static_cast<char>(std::toupper(symbol[0]));
  }
  atom.element = symbol;
  if (!chem::is_supported_element(atom.element))
    throw InputError("atom label names unsupported element: " + label);
  return atom;
}

}  // namespace

HeteroGraph hetero_from_molecule(const chem::MolecularGraph &g) {
  chem::check_graph(g);
  HeteroGraph hg;
  hg.id = g.id;
  for (const auto &atom : g.atoms)
    hg.nodes.push_back({atom.index, NodeKind::Atom, atom_label(atom)});
  for (const auto &bond : g.bonds)
    hg.edges.push_back({bond.a, bond.b, EdgeKind::Bond, false,
                        chem::bond_order_name(bond.order)});
  return hg;
}

HeteroGraph augment_with_element_kg(const chem::MolecularGraph &g,
                                    const kg::KnowledgeGraph &graph,
                                    const AugmentOptions &options) {
  HeteroGraph hg = hetero_from_molecule(g);
  std::map<std::string, int> shared_nodes;  // property head -> node id

  for (const auto &atom : g.atoms) {
    auto triples = kg::one_hop_properties(graph, atom.element);
    for (const auto &t : triples) {
      int prop_node;
      if (options.duplicate_properties) {
        prop_node = static_cast<int>(hg.nodes.size());
        hg.nodes.push_back({prop_node, NodeKind::Property, t.head});
      } else {
        auto it = shared_nodes.find(t.head);
        if (it == shared_nodes.end()) {
          prop_node = static_cast<int>(hg.nodes.size());
          hg.nodes.push_back({prop_node, NodeKind::Property, t.head});
          shared_nodes.emplace(t.head, prop_node);
        } else {
          prop_node = it->second;
        }
      }
      hg.edges.push_back(
          {prop_node, atom.index, EdgeKind::PropOf, true, t.relation});
    }
  }
  check_hetero(hg);
  return hg;
}

namespace {

void append_fg_augmentation(HeteroGraph &hg, const chem::MolecularGraph &g,
                            const std::vector<moiety::Moiety> &moieties,
                            const std::vector<moiety::MoietyRelation> &rels) {
  const int n = static_cast<int>(g.num_atoms());
  std::vector<int> moiety_node(moieties.size());
  for (std::size_t i = 0; i < moieties.size(); ++i) {
    const auto &m = moieties[i];
    for (int a : m.atoms)
      if (a < 0 || a >= n)
        throw InputError("moiety " + m.id +
                         " references an atom outside this molecule");
    moiety_node[i] = static_cast<int>(hg.nodes.size());
    hg.nodes.push_back(
        {moiety_node[i], NodeKind::Moiety, m.type_label});
  }
  for (std::size_t i = 0; i < moieties.size(); ++i)
    for (int a : moieties[i].atoms)
      hg.edges.push_back(
          {moiety_node[i], a, EdgeKind::PartOf, false, "part_of"});

  for (const auto &r : rels) {
    if (r.a >= moieties.size() || r.b >= moieties.size())
      throw InputError("moiety relation references a missing moiety");
    EdgeKind kind;
    switch (r.label) {
      case moiety::RelationLabel::Fused:
        kind = EdgeKind::Fused;
        break;
      case moiety::RelationLabel::Connected:
        kind = EdgeKind::Connected;
        break;
      case moiety::RelationLabel::Saturated:
        kind = EdgeKind::Saturated;
        break;
      case moiety::RelationLabel::Unsaturated:
        kind = EdgeKind::Unsaturated;
        break;
    }
    hg.edges.push_back({moiety_node[r.a], moiety_node[r.b], kind, false,
                        moiety::relation_label_name(r.label)});
  }
}

}  // namespace

HeteroGraph augment_with_fg_kg(
    const chem::MolecularGraph &g, const std::vector<moiety::Moiety> &moieties,
    const std::vector<moiety::MoietyRelation> &rels) {
  HeteroGraph hg = hetero_from_molecule(g);
  append_fg_augmentation(hg, g, moieties, rels);
  check_hetero(hg);
  return hg;
}

HeteroGraph augment_composed(const chem::MolecularGraph &g,
                             const kg::KnowledgeGraph &graph,
                             const std::vector<moiety::Moiety> &moieties,
                             const std::vector<moiety::MoietyRelation> &rels,
                             const AugmentOptions &options) {
  HeteroGraph hg = augment_with_element_kg(g, graph, options);
  append_fg_augmentation(hg, g, moieties, rels);
  check_hetero(hg);
  return hg;
}

std::string to_json(const HeteroGraph &hg) {
  nlohmann::ordered_json root;
  root["id"] = hg.id;
  root["nodes"] = nlohmann::ordered_json::array();
  for (const auto &n : hg.nodes)
    root["nodes"].push_back({{"id", n.id},
                             {"kind", node_kind_name(n.kind)},
                             {"label", n.label}});
  root["edges"] = nlohmann::ordered_json::array();
  for (const auto &e : hg.edges)
    root["edges"].push_back({{"src", e.src},
                             {"dst", e.dst},
                             {"kind", edge_kind_name(e.kind)},
                             {"directed", e.directed},
                             {"label", e.label}});
  return root.dump();
}

HeteroGraph from_json(const std::string &text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw InputError(std::string("invalid HeteroGraph JSON: ") + e.what());
  }
  HeteroGraph hg;
  try {
    hg.id = root.at("id").get<std::string>();
    for (const auto &jn : root.at("nodes"))
      hg.nodes.push_back({jn.at("id").get<int>(),
                          node_kind_from_name(jn.at("kind").get<std::string>()),
                          jn.at("label").get<std::string>()});
    for (const auto &je : root.at("edges"))
      hg.edges.push_back({je.at("src").get<int>(), je.at("dst").get<int>(),
                          edge_kind_from_name(je.at("kind").get<std::string>()),
                          je.at("directed").get<bool>(),
                          je.at("label").get<std::string>()});
  } catch (const nlohmann::json::exception &e) {
    throw InputError(std::string("invalid HeteroGraph JSON: ") + e.what());
  }
  check_hetero(hg);
  return hg;
}

std::string to_dot(const HeteroGraph &hg) {
  std::ostringstream out;
  out << "graph \"" << hg.id << "\" {\n";
  for (const auto &n : hg.nodes) {
    const char *shape = n.kind == NodeKind::Atom     ? "circle"
                        : n.kind == NodeKind::Property ? "box"
                                                       : "hexagon";
    out << "  n" << n.id << " [label=\"" << n.label << "\", shape=" << shape
        << "];\n";
  }
  for (const auto &e : hg.edges) {
    const char *style = e.kind == EdgeKind::Bond     ? "solid"
                        : e.kind == EdgeKind::PropOf ? "dashed"
                        : e.kind == EdgeKind::PartOf ? "dotted"
                                                     : "bold";
    out << "  n" << e.src << " -- n" << e.dst << " [label=\""
        << edge_kind_name(e.kind) << "\", style=" << style;
    if (e.directed) out << ", dir=forward";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

chem::MolecularGraph atom_bond_restriction(const HeteroGraph &hg) {
  check_hetero(hg);
  chem::MolecularGraph g;
  g.id = hg.id;
  for (const auto &n : hg.nodes) {
    if (n.kind != NodeKind::Atom) continue;
    if (n.id != static_cast<int>(g.atoms.size()))
      throw InternalError(
          "atom_bond_restriction: atom nodes must precede other kinds");
    g.atoms.push_back(atom_from_label(n.id, n.label));
  }
  for (const auto &e : hg.edges)
    if (e.kind == EdgeKind::Bond)
      g.bonds.push_back({e.src, e.dst, chem::bond_order_from_name(e.label)});

  for (auto &atom : g.atoms)
    atom.implicit_h = chem::implicit_hydrogens(
        atom.element, chem::bond_order_sum(g, atom.index),
        atom.formal_charge);
  chem::check_graph(g);
  return g;
}

}  // namespace kgmol::hetero
