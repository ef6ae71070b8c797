#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modliar/formula.hpp"

namespace modliar {

using World = std::size_t;
using Edge = std::pair<World, World>;

/// Finite Kripke model over worlds 0..size()-1.
class KripkeModel {
 public:
  KripkeModel(std::size_t n_worlds, std::set<Edge> access, std::vector<std::set<std::string>> valuation)
      : access_(std::move(access)), valuation_(std::move(valuation)) {
    if (n_worlds == 0) throw std::invalid_argument("a Kripke model needs at least one world");
    if (valuation_.size() < n_worlds) valuation_.resize(n_worlds);
    if (valuation_.size() != n_worlds) throw std::invalid_argument("valuation names a world out of range");
    for (const auto& [from, to] : access_)
      if (from >= n_worlds || to >= n_worlds)
        throw std::invalid_argument("access pair (" + std::to_string(from) + "," + std::to_string(to) +
                                    ") out of range");
    successors_.resize(n_worlds);
    for (const auto& [from, to] : access_) successors_[from].push_back(to);
  }

  std::size_t size() const { return valuation_.size(); }
  const std::set<Edge>& access() const { return access_; }
  const std::vector<std::set<std::string>>& valuation() const { return valuation_; }
  const std::vector<World>& successors(World w) const { return successors_.at(w); }
  bool accesses(World from, World to) const { return access_.contains({from, to}); }
  bool true_at(World w, const std::string& atom) const { return valuation_.at(w).contains(atom); }

  friend bool operator==(const KripkeModel& a, const KripkeModel& b) {
    return a.access_ == b.access_ && a.valuation_ == b.valuation_;
  }

 private:
  std::set<Edge> access_;
  std::vector<std::set<std::string>> valuation_;
  std::vector<std::vector<World>> successors_;
};

enum class FrameProperty : std::uint8_t { Reflexive = 1, Serial = 2, Transitive = 4, Symmetric = 8 };

/// Subset of {reflexive, serial, transitive, symmetric}.
class PropertySet {
 public:
  constexpr PropertySet() = default;
  constexpr PropertySet(std::initializer_list<FrameProperty> props) {
    for (auto p : props) bits_ |= static_cast<std::uint8_t>(p);
  }

  constexpr bool contains(FrameProperty p) const { return (bits_ & static_cast<std::uint8_t>(p)) != 0; }
  constexpr void insert(FrameProperty p) { bits_ |= static_cast<std::uint8_t>(p); }
  constexpr bool subset_of(PropertySet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  friend constexpr bool operator==(PropertySet, PropertySet) = default;

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    if (contains(FrameProperty::Reflexive)) out.emplace_back("reflexive");
    if (contains(FrameProperty::Serial)) out.emplace_back("serial");
    if (contains(FrameProperty::Transitive)) out.emplace_back("transitive");
    if (contains(FrameProperty::Symmetric)) out.emplace_back("symmetric");
    return out;
  }

 private:
  std::uint8_t bits_ = 0;
};

enum class System : std::uint8_t { K, D, T, B, K4, S4, S5 };

inline constexpr std::array<System, 7> kAllSystems{System::K, System::D,  System::T, System::B,
                                                   System::K4, System::S4, System::S5};

struct FrameClass {
  System system;
  PropertySet properties;

  bool reflexive() const { return properties.contains(FrameProperty::Reflexive); }
  bool serial() const { return properties.contains(FrameProperty::Serial); }
  bool transitive() const { return properties.contains(FrameProperty::Transitive); }
  bool symmetric() const { return properties.contains(FrameProperty::Symmetric); }

  friend bool operator==(const FrameClass&, const FrameClass&) = default;
};

inline FrameClass frame_class(System s) {
  using P = FrameProperty;
  switch (s) {
    case System::K: return {s, {}};
    case System::D: return {s, {P::Serial}};
    case System::T: return {s, {P::Reflexive}};
    case System::B: return {s, {P::Reflexive, P::Symmetric}};
    case System::K4: return {s, {P::Transitive}};
    case System::S4: return {s, {P::Reflexive, P::Transitive}};
    case System::S5: return {s, {P::Reflexive, P::Transitive, P::Symmetric}};
  }
  throw std::invalid_argument("unknown system");
}

inline std::string system_name(System s) {
  switch (s) {
    case System::K: return "K";
    case System::D: return "D";
    case System::T: return "T";
    case System::B: return "B";
    case System::K4: return "K4";
    case System::S4: return "S4";
    case System::S5: return "S5";
  }
  return "?";
}

inline std::optional<System> parse_system(std::string_view name) {
  for (System s : kAllSystems)
    if (system_name(s) == name) return s;
  return std::nullopt;
}

inline std::string to_string(const FrameClass& c) { return system_name(c.system); }

/// Kripke forcing. Throws std::out_of_range for a world outside the model.
inline bool holds_at(const KripkeModel& m, World w, const Formula& f) {
  if (w >= m.size())
    throw std::out_of_range("world " + std::to_string(w) + " not in model of " + std::to_string(m.size()) +
                            " worlds");
  switch (f.op()) {
    case Op::Atom: return m.true_at(w, f.name());
    case Op::Not: return !holds_at(m, w, f.operand());
    case Op::And: return holds_at(m, w, f.lhs()) && holds_at(m, w, f.rhs());
    case Op::Or: return holds_at(m, w, f.lhs()) || holds_at(m, w, f.rhs());
    case Op::Implies: return !holds_at(m, w, f.lhs()) || holds_at(m, w, f.rhs());
    case Op::Iff: return holds_at(m, w, f.lhs()) == holds_at(m, w, f.rhs());
    case Op::Box:
      return std::all_of(m.successors(w).begin(), m.successors(w).end(),
                         [&](World v) { return holds_at(m, v, f.operand()); });
    case Op::Diamond:
      return std::any_of(m.successors(w).begin(), m.successors(w).end(),
                         [&](World v) { return holds_at(m, v, f.operand()); });
  }
  return false;
}

/// True iff every definition `q := B` has q <-> B true at every world.
inline bool respects_definitions(const KripkeModel& m, const DefinitionSet& defs) {
  for (const auto& d : defs) {
    Formula constraint = d.as_constraint();
    for (World w = 0; w < m.size(); ++w)
      if (!holds_at(m, w, constraint)) return false;
  }
  return true;
}

inline PropertySet frame_properties(const KripkeModel& m) {
  const std::size_t n = m.size();
  bool reflexive = true, serial = true, transitive = true, symmetric = true;
  for (World w = 0; w < n; ++w) {
    if (!m.accesses(w, w)) reflexive = false;
    if (m.successors(w).empty()) serial = false;
  }
  for (const auto& [a, b] : m.access()) {
    if (!m.accesses(b, a)) symmetric = false;
    for (World c : m.successors(b))
      if (!m.accesses(a, c)) transitive = false;
  }
  PropertySet out;
  if (reflexive) out.insert(FrameProperty::Reflexive);
  if (serial) out.insert(FrameProperty::Serial);
  if (transitive) out.insert(FrameProperty::Transitive);
  if (symmetric) out.insert(FrameProperty::Symmetric);
  return out;
}

inline bool in_frame_class(const KripkeModel& m, const FrameClass& c) {
  return c.properties.subset_of(frame_properties(m));
}

}  // namespace modliar
