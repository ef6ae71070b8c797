#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace modliar {

enum class Op : std::uint8_t { Atom, Not, And, Or, Implies, Iff, Box, Diamond };

inline bool is_unary(Op op) { return op == Op::Not || op == Op::Box || op == Op::Diamond; }
inline bool is_binary(Op op) {
  return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Iff;
}

/// Checks the atom naming rule: lowercase first letter, then letters, digits or '_'.
inline bool is_valid_atom_name(std::string_view name) {
  if (name.empty() || name.front() < 'a' || name.front() > 'z') return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

/// Immutable modal formula. Copies share structure; equality is structural.
class Formula {
 public:
  static Formula atom(std::string name);
  static Formula negation(Formula f) { return unary(Op::Not, std::move(f)); }
  static Formula box(Formula f) { return unary(Op::Box, std::move(f)); }
  static Formula diamond(Formula f) { return unary(Op::Diamond, std::move(f)); }
  static Formula conjunction(Formula a, Formula b) { return binary(Op::And, std::move(a), std::move(b)); }
  static Formula disjunction(Formula a, Formula b) { return binary(Op::Or, std::move(a), std::move(b)); }
  static Formula implication(Formula a, Formula b) { return binary(Op::Implies, std::move(a), std::move(b)); }
  static Formula biconditional(Formula a, Formula b) { return binary(Op::Iff, std::move(a), std::move(b)); }
  static Formula unary(Op op, Formula operand);
  static Formula binary(Op op, Formula lhs, Formula rhs);

  Op op() const;
  bool is(Op op) const { return this->op() == op; }
  const std::string& name() const;
  /// Sole operand of a unary connective, left operand of a binary one.
  const Formula& lhs() const;
  const Formula& rhs() const;
  const Formula& operand() const { return lhs(); }

  std::size_t hash() const;
  std::size_t size() const;
  int modal_depth() const;
  bool same_node(const Formula& other) const { return node_ == other.node_; }

  friend bool operator==(const Formula& a, const Formula& b);
  /// Total structural order: connective, then atom name, then operands left to right.
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node;

  Formula() = default;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Formula::Node {
  Node(Op o, std::string n, Formula l, Formula r) : op(o), name(std::move(n)), lhs(std::move(l)), rhs(std::move(r)) {
    std::size_t h = std::hash<int>{}(static_cast<int>(op)) * 0x9e3779b97f4a7c15ULL;
    if (op == Op::Atom) {
      h ^= std::hash<std::string>{}(name);
      size = 1;
      modal_depth = 0;
    } else {
      h ^= lhs.hash() + 0x9e3779b9 + (h << 6) + (h >> 2);
      size = 1 + lhs.size();
      modal_depth = lhs.modal_depth() + ((op == Op::Box || op == Op::Diamond) ? 1 : 0);
      if (is_binary(op)) {
        h ^= rhs.hash() * 31 + 0x7f4a7c15 + (h << 6) + (h >> 2);
        size += rhs.size();
        modal_depth = std::max(modal_depth, rhs.modal_depth());
      }
    }
    hash = h;
  }
  Op op;
  std::string name;
  Formula lhs;
  Formula rhs;
  std::size_t hash = 0;
  std::size_t size = 0;
  int modal_depth = 0;
};

inline Formula Formula::atom(std::string name) {
  if (!is_valid_atom_name(name)) throw std::invalid_argument("invalid atom name '" + name + "'");
  return Formula(std::make_shared<const Node>(Op::Atom, std::move(name), Formula(), Formula()));
}
inline Formula Formula::unary(Op op, Formula operand) {
  if (!is_unary(op)) throw std::invalid_argument("not a unary connective");
  return Formula(std::make_shared<const Node>(op, std::string(), std::move(operand), Formula()));
}
inline Formula Formula::binary(Op op, Formula lhs, Formula rhs) {
  if (!is_binary(op)) throw std::invalid_argument("not a binary connective");
  return Formula(std::make_shared<const Node>(op, std::string(), std::move(lhs), std::move(rhs)));
}

inline Op Formula::op() const { return node_->op; }
inline const std::string& Formula::name() const { return node_->name; }
inline const Formula& Formula::lhs() const { return node_->lhs; }
inline const Formula& Formula::rhs() const { return node_->rhs; }
inline std::size_t Formula::hash() const { return node_->hash; }
inline std::size_t Formula::size() const { return node_->size; }
inline int Formula::modal_depth() const { return node_->modal_depth; }

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash || a.node_->size != b.node_->size || a.node_->op != b.node_->op) return false;
  if (a.is(Op::Atom)) return a.node_->name == b.node_->name;
  if (!(a.lhs() == b.lhs())) return false;
  return !is_binary(a.op()) || a.rhs() == b.rhs();
}

inline std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.op() <=> b.op(); c != 0) return c;
  if (a.is(Op::Atom)) return a.name().compare(b.name()) <=> 0;
  if (auto c = a.lhs() <=> b.lhs(); c != 0) return c;
  if (is_binary(a.op())) return a.rhs() <=> b.rhs();
  return std::strong_ordering::equal;
}

inline Formula operator!(const Formula& f) { return Formula::negation(f); }

/// Collects atom names occurring in `f` into `out`.
inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.is(Op::Atom)) {
    out.insert(f.name());
    return;
  }
  collect_atoms(f.lhs(), out);
  if (is_binary(f.op())) collect_atoms(f.rhs(), out);
}

inline std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

/// `lhs := rhs`. The defined atom may occur in its own body.
struct Definition {
  std::string lhs;
  Formula rhs;

  /// The constraint a model must satisfy at every world: lhs <-> rhs.
  Formula as_constraint() const { return Formula::biconditional(Formula::atom(lhs), rhs); }

  friend bool operator==(const Definition&, const Definition&) = default;
};

/// Ordered definitions with pairwise distinct left-hand sides.
class DefinitionSet {
 public:
  DefinitionSet() = default;
  explicit DefinitionSet(std::vector<Definition> defs) {
    for (auto& d : defs) add(std::move(d));
  }

  /// Throws std::invalid_argument on a duplicate left-hand side.
  void add(Definition def) {
    if (find(def.lhs) != nullptr) throw std::invalid_argument("duplicate definition of '" + def.lhs + "'");
    if (!is_valid_atom_name(def.lhs)) throw std::invalid_argument("invalid atom name '" + def.lhs + "'");
    defs_.push_back(std::move(def));
  }

  const Definition* find(std::string_view name) const {
    for (const auto& d : defs_)
      if (d.lhs == name) return &d;
    return nullptr;
  }

  bool empty() const { return defs_.empty(); }
  std::size_t size() const { return defs_.size(); }
  auto begin() const { return defs_.begin(); }
  auto end() const { return defs_.end(); }
  const Definition& operator[](std::size_t i) const { return defs_[i]; }

  std::set<std::string> atoms() const {
    std::set<std::string> out;
    for (const auto& d : defs_) {
      out.insert(d.lhs);
      collect_atoms(d.rhs, out);
    }
    return out;
  }

  friend bool operator==(const DefinitionSet&, const DefinitionSet&) = default;

 private:
  std::vector<Definition> defs_;
};

}  // namespace modliar

template <>
struct std::hash<modliar::Formula> {
  std::size_t operator()(const modliar::Formula& f) const noexcept { return f.hash(); }
};
