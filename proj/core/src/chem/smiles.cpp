//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kgmol/chem/smiles.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "kgmol/errors.hpp"

namespace kgmol::chem {

namespace {

struct RingOpen {
  int atom;
  std::optional<BondOrder> order;
  std::size_t position;
};

class Parser {
 public:
  Parser(std::string_view text, std::string id)
      : text_(text), id_(std::move(id)) {}

  MolecularGraph run() {
    graph_.id = id_;
    if (text_.empty()) throw ParseError("empty SMILES", 0);
    while (pos_ < text_.size()) step();
    if (pending_)
      throw ParseError("dangling bond symbol", text_.size());
    if (!rings_.empty())
      throw ParseError("unmatched ring-closure digit " +
                           std::to_string(rings_.begin()->first),
                       rings_.begin()->second.position);
    if (!branch_stack_.empty())
      throw ParseError("unbalanced parenthesis", text_.size());
    if (graph_.atoms.empty()) throw ParseError("no atoms", 0);
    assign_hydrogens();
    return std::move(graph_);
  }

 private:
  void step() {
    const char c = text_[pos_];
    switch (c) {
      case '(':
        if (prev_ < 0) throw ParseError("branch before any atom", pos_);
        if (pending_) throw ParseError("bond symbol before '('", pos_);
        branch_stack_.push_back(prev_);
        ++pos_;
        return;
      case ')':
        if (branch_stack_.empty())
          throw ParseError("unbalanced parenthesis", pos_);
        if (pending_) throw ParseError("bond symbol before ')'", pos_);
        prev_ = branch_stack_.back();
        branch_stack_.pop_back();
        ++pos_;
        return;
      case '-': set_pending(BondOrder::Single); return;
      case '=': set_pending(BondOrder::Double); return;
      case '#': set_pending(BondOrder::Triple); return;
      case '.':
        if (pending_) throw ParseError("bond symbol before '.'", pos_);
        prev_ = -1;
        ++pos_;
        return;
      case '%': {
        if (pos_ + 2 >= text_.size() || !std::isdigit(uc(text_[pos_ + 1])) ||
            !std::isdigit(uc(text_[pos_ + 2])))
          throw ParseError("'%' requires two digits", pos_);
        int num = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
        ring_closure(num);
        pos_ += 3;
        return;
      }
      default:
        if (std::isdigit(uc(c))) {
          ring_closure(c - '0');
          ++pos_;
          return;
        }
        if (c == '[') {
          parse_bracket_atom();
          return;
        }
        if (parse_organic_atom()) return;
        throw ParseError(std::string("unexpected character '") + c + "'",
                         pos_);
    }
  }

  static unsigned char uc(char c) { return static_cast<unsigned char>(c); }

  void set_pending(BondOrder order) {
    if (pending_) throw ParseError("duplicate bond symbol", pos_);
    pending_ = order;
    ++pos_;
  }

  bool parse_organic_atom() {
    const std::size_t at = pos_;
    const char c = text_[pos_];
    // two-letter symbols first
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      pos_ += 2;
      add_atom("Cl", false, 0, -1, at);
      return true;
    }
    if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      pos_ += 2;
      add_atom("Br", false, 0, -1, at);
      return true;
    }
    static const std::string plain = "BCNOPSFI";
    static const std::string arom = "bcnops";
    if (plain.find(c) != std::string::npos) {
      ++pos_;
      add_atom(std::string(1, c), false, 0, -1, at);
      return true;
    }
    if (arom.find(c) != std::string::npos) {
      ++pos_;
      add_atom(std::string(1, static_cast<char>(std::toupper(uc(c)))), true, 0,
               -1, at);
      return true;
    }
    return false;
  }

  void parse_bracket_atom() {
    const std::size_t open = pos_;
    ++pos_;  // '['
    if (pos_ >= text_.size()) throw ParseError("unterminated bracket", open);

    std::string symbol;
    bool aromatic = false;
    char c = text_[pos_];
    if (std::isupper(uc(c))) {
      symbol += c;
      ++pos_;
      if (pos_ < text_.size() && std::islower(uc(text_[pos_])) &&
          text_[pos_] != 'h') {
        // two-letter element; 'h' would be an H count
        char d = text_[pos_];
        std::string two = symbol + d;
        symbol = two;
        ++pos_;
      }
    } else if (std::islower(uc(c)) &&
               std::string("bcnops").find(c) != std::string::npos) {
      symbol = std::string(1, static_cast<char>(std::toupper(uc(c))));
      aromatic = true;
      ++pos_;
    } else {
      throw ParseError("expected element symbol in bracket", pos_);
    }

    int hcount = 0;
    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      hcount = 1;
      if (pos_ < text_.size() && std::isdigit(uc(text_[pos_]))) {
        hcount = text_[pos_] - '0';
        ++pos_;
      }
    }

    int charge = 0;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign_char = text_[pos_];
      const int sign = sign_char == '+' ? 1 : -1;
      ++pos_;
      if (pos_ < text_.size() && std::isdigit(uc(text_[pos_]))) {
        charge = sign * (text_[pos_] - '0');
        ++pos_;
      } else {
        charge = sign;
        while (pos_ < text_.size() && text_[pos_] == sign_char) {
          charge += sign;
          ++pos_;
        }
      }
    }

    if (pos_ >= text_.size() || text_[pos_] != ']')
      throw ParseError("unterminated bracket", open);
    ++pos_;

    add_atom(symbol, aromatic, charge, hcount, open);
  }

  void add_atom(const std::string &symbol, bool aromatic, int charge,
                int bracket_h, std::size_t at) {
    if (!is_supported_element(symbol))
      throw ParseError("unsupported element '" + symbol + "'", at);
    Atom a;
    a.index = static_cast<int>(graph_.atoms.size());
    a.element = symbol;
    a.aromatic = aromatic;
    a.formal_charge = charge;
    a.implicit_h = 0;
    graph_.atoms.push_back(a);
    bracket_h_.push_back(bracket_h);

    const int self = a.index;
    if (prev_ >= 0) {
      BondOrder order = pending_ ? *pending_ : default_order(prev_, self);
      add_bond(prev_, self, order, at);
    } else if (pending_) {
      throw ParseError("bond symbol with no preceding atom", at);
    }
    pending_.reset();
    prev_ = self;
    last_atom_ = self;
  }

  BondOrder default_order(int a, int b) const {
    return (graph_.atoms[a].aromatic && graph_.atoms[b].aromatic)
               ? BondOrder::Aromatic
               : BondOrder::Single;
  }

  void add_bond(int a, int b, BondOrder order, std::size_t at) {
    if (a == b) throw ParseError("bond from atom to itself", at);
    auto key = std::minmax(a, b);
    if (!bond_set_.insert(key).second)
      throw ParseError("duplicate bond", at);
    graph_.bonds.push_back({a, b, order});
  }

  void ring_closure(int number) {
    if (last_atom_ < 0)
      throw ParseError("ring closure before any atom", pos_);
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_[number] = {last_atom_, pending_, pos_};
      pending_.reset();
      return;
    }
    RingOpen open = it->second;
    rings_.erase(it);
    if (open.order && pending_ && *open.order != *pending_)
      throw ParseError("conflicting ring-bond orders", pos_);
    BondOrder order = pending_   ? *pending_
                      : open.order ? *open.order
                                   : default_order(open.atom, last_atom_);
    add_bond(open.atom, last_atom_, order, pos_);
    pending_.reset();
  }

  void assign_hydrogens() {
    std::vector<double> sums(graph_.atoms.size(), 0.0);
    for (const Bond &b : graph_.bonds) {
      sums[b.a] += bond_order_value(b.order);
      sums[b.b] += bond_order_value(b.order);
    }
    for (std::size_t i = 0; i < graph_.atoms.size(); ++i) {
      Atom &a = graph_.atoms[i];
      a.implicit_h = bracket_h_[i] >= 0
                         ? bracket_h_[i]
                         : implicit_hydrogens(a.element, sums[i]);
    }
  }

  std::string_view text_;
  std::string id_;
  std::size_t pos_ = 0;
  MolecularGraph graph_;
  std::vector<int> bracket_h_;  // -1 = plain atom, valence rule applies
  int prev_ = -1;
  int last_atom_ = -1;
  std::optional<BondOrder> pending_;
  std::vector<int> branch_stack_;
  std::map<int, RingOpen> rings_;
  std::set<std::pair<int, int>> bond_set_;
};

}  // namespace

MolecularGraph parse_smiles(std::string_view text, std::string id) {
  Parser parser(text, std::move(id));
  MolecularGraph g = parser.run();
  g.id = g.id.empty() ? std::string(text) : g.id;
  check_graph(g);
  return g;
}

}  // namespace kgmol::chem
