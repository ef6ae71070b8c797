#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "modliar/formula.hpp"
#include "modliar/kripke.hpp"
#include "modliar/model_io.hpp"

namespace modliar {

struct TableauStats {
  std::size_t prefixes_created = 0;
  std::size_t branches_closed = 0;
  std::size_t rule_applications = 0;
};

enum class Outcome { Sat, Unsat, Indeterminate };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Sat: return "SAT";
    case Outcome::Unsat: return "UNSAT";
    case Outcome::Indeterminate: return "INDETERMINATE";
  }
  return "?";
}

/// Result of a satisfiability query. A SAT verdict carries a model in the
/// queried class that respects the definitions everywhere and satisfies the
/// query at `designated`.
struct Verdict {
  Outcome outcome = Outcome::Indeterminate;
  std::optional<KripkeModel> model;
  std::optional<World> designated;
  TableauStats stats;

  bool sat() const { return outcome == Outcome::Sat; }
  bool unsat() const { return outcome == Outcome::Unsat; }
};

struct TableauOptions {
  /// Total prefixes the search may create, summed over all branches.
  std::size_t max_prefixes = 10'000;
};

namespace detail {

/// Hash-consed formulas for one tableau run; ids are stable for the run.
class FormulaTable {
 public:
  struct Entry {
    Formula formula;
    Op op;
    int a = -1;
    int b = -1;
  };

  enum class RuleKind { None, Alpha, Beta, Necessity, Possibility };
  struct Rule {
    RuleKind kind = RuleKind::None;
    int first = -1;
    int second = -1;
  };

  int intern(const Formula& f) {
    if (auto it = ids_.find(f); it != ids_.end()) return it->second;
    Entry e{f, f.op()};
    if (!f.is(Op::Atom)) e.a = intern(f.lhs());
    if (is_binary(f.op())) e.b = intern(f.rhs());
    int id = static_cast<int>(entries_.size());
    entries_.push_back(std::move(e));
    ids_.emplace(f, id);
    return id;
  }

  const Entry& at(int id) const { return entries_[static_cast<std::size_t>(id)]; }

  int make(Op op, int a, int b = -1) {
    auto key = std::make_tuple(op, a, b);
    if (auto it = derived_.find(key); it != derived_.end()) return it->second;
    Formula f = is_binary(op) ? Formula::binary(op, at(a).formula, at(b).formula)
                              : Formula::unary(op, at(a).formula);
    int id = intern(f);
    derived_.emplace(key, id);
    return id;
  }

  int negate(int id) { return make(Op::Not, id); }

  /// The formula whose presence next to `id` closes a branch.
  int complement(int id) { return at(id).op == Op::Not ? at(id).a : negate(id); }

  const Rule& rule(int id) {
    if (rules_.size() <= static_cast<std::size_t>(id)) rules_.resize(static_cast<std::size_t>(id) + 1);
    auto& slot = rules_[static_cast<std::size_t>(id)];
    if (!slot) slot = classify(id);
    return *slot;
  }

 private:
  Rule classify(int id) {
    using K = RuleKind;
    const Entry e = at(id);
    switch (e.op) {
      case Op::Atom: return {};
      case Op::And: return {K::Alpha, e.a, e.b};
      case Op::Or: return {K::Beta, e.a, e.b};
      case Op::Implies: return {K::Beta, negate(e.a), e.b};
      case Op::Iff: return {K::Alpha, make(Op::Implies, e.a, e.b), make(Op::Implies, e.b, e.a)};
      case Op::Box: return {K::Necessity, e.a};
      case Op::Diamond: return {K::Possibility, e.a};
      case Op::Not: break;
    }
    const Entry inner = at(e.a);
    switch (inner.op) {
      case Op::Atom: return {};
      case Op::Not: return {K::Alpha, inner.a};
      case Op::And: return {K::Beta, negate(inner.a), negate(inner.b)};
      case Op::Or: return {K::Alpha, negate(inner.a), negate(inner.b)};
      case Op::Implies: return {K::Alpha, inner.a, negate(inner.b)};
      case Op::Iff:
        return {K::Beta, negate(make(Op::Implies, inner.a, inner.b)), negate(make(Op::Implies, inner.b, inner.a))};
      case Op::Box: return {K::Possibility, negate(inner.a)};
      case Op::Diamond: return {K::Necessity, negate(inner.a)};
    }
    return {};
  }

  std::vector<Entry> entries_;
  std::unordered_map<Formula, int> ids_;
  std::map<std::tuple<Op, int, int>, int> derived_;
  std::vector<std::optional<Rule>> rules_;
};

struct PrefixNode {
  int parent = -1;
  std::vector<int> order;     // formulas in insertion order
  std::set<int> members;
  std::set<int> witnessed;    // possibility formulas that already have a successor
  std::vector<int> successors;
};

struct Branch {
  std::vector<PrefixNode> prefixes;
  std::vector<int> blocked_by;  // -1 when unblocked; valid after compute_blocking
};

struct CapExceeded {};

class Prover {
 public:
  Prover(const DefinitionSet& defs, const FrameClass& cls, TableauOptions opts)
      : cls_(cls), opts_(opts) {
    for (const auto& d : defs) globals_.push_back(table_.intern(d.as_constraint()));
  }

  /// Returns the saturated open branch, or nullopt when every branch closes.
  std::optional<Branch> run(const Formula& query) {
    Branch b;
    Queue q;
    int root = new_prefix(b, -1);
    // definitions are expanded before the query is added, so their branch
    // points come first in the root's formula order
    bool ok = seed(b, root, q) && saturate(b, q) && add(b, root, table_.intern(query), q);
    if (!ok) {
      ++stats_.branches_closed;
      return std::nullopt;
    }
    return expand(std::move(b), std::move(q));
  }

  KripkeModel extract(const Branch& b) {
    std::vector<int> world_of(b.prefixes.size(), -1);
    std::size_t n = 0;
    for (std::size_t p = 0; p < b.prefixes.size(); ++p)
      if (b.blocked_by[p] < 0) world_of[p] = static_cast<int>(n++);

    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t p = 0; p < b.prefixes.size(); ++p) {
      if (world_of[p] < 0) continue;
      for (int s : b.prefixes[p].successors) {
        int target = b.blocked_by[static_cast<std::size_t>(s)] < 0 ? s : b.blocked_by[static_cast<std::size_t>(s)];
        adj[static_cast<std::size_t>(world_of[p])][static_cast<std::size_t>(world_of[static_cast<std::size_t>(target)])] = true;
      }
    }
    if (cls_.symmetric())
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (adj[i][j]) adj[j][i] = true;
    if (cls_.transitive())
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          if (adj[i][k])
            for (std::size_t j = 0; j < n; ++j)
              if (adj[k][j]) adj[i][j] = true;
    if (cls_.reflexive())
      for (std::size_t i = 0; i < n; ++i) adj[i][i] = true;

    std::set<Edge> access;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (adj[i][j]) access.insert({i, j});

    std::vector<std::set<std::string>> valuation(n);
    for (std::size_t p = 0; p < b.prefixes.size(); ++p) {
      if (world_of[p] < 0) continue;
      for (int f : b.prefixes[p].members)
        if (table_.at(f).op == Op::Atom) valuation[static_cast<std::size_t>(world_of[p])].insert(table_.at(f).formula.name());
    }
    return KripkeModel(n, std::move(access), std::move(valuation));
  }

  const TableauStats& stats() const { return stats_; }

 private:
  using Queue = std::deque<std::pair<int, int>>;
  using RuleKind = FormulaTable::RuleKind;

  int new_prefix(Branch& b, int parent) {
    if (++stats_.prefixes_created > opts_.max_prefixes) throw CapExceeded{};
    PrefixNode node;
    node.parent = parent;
    b.prefixes.push_back(std::move(node));
    return static_cast<int>(b.prefixes.size()) - 1;
  }

  bool seed(Branch& b, int p, Queue& q) {
    for (int g : globals_)
      if (!add(b, p, g, q)) return false;
    return true;
  }

  bool add(Branch& b, int p, int f, Queue& q) {
    auto& node = b.prefixes[static_cast<std::size_t>(p)];
    if (node.members.contains(f)) return true;
    if (node.members.contains(table_.complement(f))) return false;
    node.members.insert(f);
    node.order.push_back(f);
    q.emplace_back(p, f);
    return true;
  }

  bool add_edge(Branch& b, int from, int to, Queue& q) {
    auto& succ = b.prefixes[static_cast<std::size_t>(from)].successors;
    if (from == to || std::find(succ.begin(), succ.end(), to) != succ.end()) return true;
    succ.push_back(to);
    const auto& order = b.prefixes[static_cast<std::size_t>(from)].order;
    for (std::size_t i = 0; i < order.size(); ++i) {
      int f = order[i];
      const auto r = table_.rule(f);
      if (r.kind != RuleKind::Necessity) continue;
      ++stats_.rule_applications;
      if (!add(b, to, r.first, q)) return false;
      if (cls_.transitive() && !add(b, to, f, q)) return false;
    }
    if (cls_.symmetric()) return add_edge(b, to, from, q);
    return true;
  }

  /// Non-branching closure: alpha rules and necessity propagation.
  bool saturate(Branch& b, Queue& q) {
    while (!q.empty()) {
      auto [p, f] = q.front();
      q.pop_front();
      const auto r = table_.rule(f);
      if (r.kind == RuleKind::Alpha) {
        ++stats_.rule_applications;
        if (!add(b, p, r.first, q)) return false;
        if (r.second >= 0 && !add(b, p, r.second, q)) return false;
      } else if (r.kind == RuleKind::Necessity) {
        ++stats_.rule_applications;
        if (cls_.reflexive() && !add(b, p, r.first, q)) return false;
        // index loop: successors may grow through symmetric edges
        for (std::size_t i = 0; i < b.prefixes[static_cast<std::size_t>(p)].successors.size(); ++i) {
          int s = b.prefixes[static_cast<std::size_t>(p)].successors[i];
          if (!add(b, s, r.first, q)) return false;
          if (cls_.transitive() && !add(b, s, f, q)) return false;
        }
      }
    }
    return true;
  }

  std::optional<std::pair<int, int>> pending_beta(const Branch& b) {
    for (std::size_t p = 0; p < b.prefixes.size(); ++p) {
      const auto& node = b.prefixes[p];
      for (int f : node.order) {
        const auto& r = table_.rule(f);
        if (r.kind == RuleKind::Beta && !node.members.contains(r.first) && !node.members.contains(r.second))
          return std::make_pair(static_cast<int>(p), f);
      }
    }
    return std::nullopt;
  }

  /// Subset blocking for classes without symmetry, equality blocking otherwise.
  void compute_blocking(Branch& b) const {
    b.blocked_by.assign(b.prefixes.size(), -1);
    for (std::size_t p = 1; p < b.prefixes.size(); ++p) {
      const auto& mine = b.prefixes[p].members;
      for (std::size_t e = 0; e < p; ++e) {
        if (b.blocked_by[e] >= 0) continue;
        const auto& theirs = b.prefixes[e].members;
        bool covers = cls_.symmetric()
                          ? mine == theirs
                          : std::includes(theirs.begin(), theirs.end(), mine.begin(), mine.end());
        if (covers) {
          b.blocked_by[p] = static_cast<int>(e);
          break;
        }
      }
    }
  }

  /// Creates at most one successor. Returns false if the branch closed while
  /// seeding it, nullopt if nothing was left to create.
  std::optional<bool> generate_successor(Branch& b, Queue& q) {
    for (std::size_t p = 0; p < b.prefixes.size(); ++p) {
      if (b.blocked_by[p] >= 0) continue;
      for (std::size_t i = 0; i < b.prefixes[p].order.size(); ++i) {
        int f = b.prefixes[p].order[i];
        const auto r = table_.rule(f);
        if (r.kind != RuleKind::Possibility || b.prefixes[p].witnessed.contains(f)) continue;
        ++stats_.rule_applications;
        b.prefixes[p].witnessed.insert(f);
        int content = r.first;
        int child = new_prefix(b, static_cast<int>(p));
        return seed(b, child, q) && add(b, child, content, q) && add_edge(b, static_cast<int>(p), child, q);
      }
    }
    if (cls_.serial() && !cls_.reflexive()) {
      for (std::size_t p = 0; p < b.prefixes.size(); ++p) {
        if (b.blocked_by[p] >= 0 || !b.prefixes[p].successors.empty()) continue;
        ++stats_.rule_applications;
        int child = new_prefix(b, static_cast<int>(p));
        return seed(b, child, q) && add_edge(b, static_cast<int>(p), child, q);
      }
    }
    return std::nullopt;
  }

  std::optional<Branch> expand(Branch b, Queue q) {
    for (;;) {
      if (!saturate(b, q)) {
        ++stats_.branches_closed;
        return std::nullopt;
      }
      if (auto beta = pending_beta(b)) {
        auto [p, f] = *beta;
        const auto r = table_.rule(f);
        ++stats_.rule_applications;
        Branch left = b;
        Queue lq;
        if (add(left, p, r.first, lq)) {
          if (auto open = expand(std::move(left), std::move(lq))) return open;
        } else {
          ++stats_.branches_closed;
        }
        if (!add(b, p, r.second, q)) {
          ++stats_.branches_closed;
          return std::nullopt;
        }
        continue;
      }
      compute_blocking(b);
      auto created = generate_successor(b, q);
      if (!created) return b;
      if (!*created) {
        ++stats_.branches_closed;
        return std::nullopt;
      }
    }
  }

  FormulaTable table_;
  std::vector<int> globals_;
  FrameClass cls_;
  TableauOptions opts_;
  TableauStats stats_;
};

}  // namespace detail

/// Decides whether some model in `cls` makes every definition hold at every
/// world and `query` hold at the root world. SAT models are re-checked
/// against the forcing relation before being returned.
inline Verdict decide(const DefinitionSet& defs, const Formula& query, const FrameClass& cls,
                      TableauOptions opts = {}) {
  detail::Prover prover(defs, cls, opts);
  Verdict v;
  try {
    auto open = prover.run(query);
    v.stats = prover.stats();
    if (!open) {
      v.outcome = Outcome::Unsat;
      return v;
    }
    KripkeModel model = prover.extract(*open);
    if (!holds_at(model, 0, query) || !respects_definitions(model, defs) || !in_frame_class(model, cls))
      throw std::logic_error("tableau extracted a model that fails the semantic check");
    v.outcome = Outcome::Sat;
    v.model = std::move(model);
    v.designated = 0;
  } catch (const detail::CapExceeded&) {
    v.outcome = Outcome::Indeterminate;
    v.stats = prover.stats();
  }
  return v;
}

enum class Validity { Valid, Invalid, Indeterminate };

struct ValidityResult {
  Validity status = Validity::Indeterminate;
  std::optional<KripkeModel> countermodel;
  std::optional<World> designated;  // world where the formula fails
  TableauStats stats;

  bool valid() const { return status == Validity::Valid; }
};

/// Global consequence: `f` holds at every world of every model in `cls`
/// that respects `defs`.
inline ValidityResult valid(const Formula& f, const FrameClass& cls, const DefinitionSet& defs = {},
                            TableauOptions opts = {}) {
  Verdict v = decide(defs, Formula::negation(f), cls, opts);
  ValidityResult r;
  r.stats = v.stats;
  switch (v.outcome) {
    case Outcome::Unsat: r.status = Validity::Valid; break;
    case Outcome::Sat:
      r.status = Validity::Invalid;
      r.countermodel = std::move(v.model);
      r.designated = v.designated;
      break;
    case Outcome::Indeterminate: r.status = Validity::Indeterminate; break;
  }
  return r;
}

inline nlohmann::json stats_to_json(const TableauStats& s) {
  return {{"prefixes_created", s.prefixes_created},
          {"branches_closed", s.branches_closed},
          {"rule_applications", s.rule_applications}};
}

inline nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json j;
  j["verdict"] = to_string(v.outcome);
  j["model"] = v.model ? model_to_json(*v.model) : nlohmann::json(nullptr);
  j["designated"] = v.designated ? nlohmann::json(*v.designated) : nlohmann::json(nullptr);
  j["stats"] = stats_to_json(v.stats);
  return j;
}

}  // namespace modliar
