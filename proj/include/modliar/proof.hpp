#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "modliar/formula.hpp"
#include "modliar/kripke.hpp"
#include "modliar/syntax.hpp"

namespace modliar {

// Labeled natural deduction. Every line is a formula at a world label; world
// labels other than the root are introduced only by dia_e, which also records
// the access fact from the premise's world to the new label.

enum class RuleId {
  Assume,
  Cp,
  Raa,
  Dne,
  Dni,
  Subeq,
  TAxiom,
  Dual,
  DiaE,
  BoxE,
  Mp,
  IffIntro,
  AndIntro,
  Nec,
};

inline constexpr std::array<RuleId, 14> kAllRules{
    RuleId::Assume, RuleId::Cp,   RuleId::Raa, RuleId::Dne, RuleId::Dni,      RuleId::Subeq,    RuleId::TAxiom,
    RuleId::Dual,   RuleId::DiaE, RuleId::BoxE, RuleId::Mp, RuleId::IffIntro, RuleId::AndIntro, RuleId::Nec};

inline std::string rule_name(RuleId r) {
  switch (r) {
    case RuleId::Assume: return "assume";
    case RuleId::Cp: return "cp";
    case RuleId::Raa: return "raa";
    case RuleId::Dne: return "dne";
    case RuleId::Dni: return "dni";
    case RuleId::Subeq: return "subeq";
    case RuleId::TAxiom: return "t_axiom";
    case RuleId::Dual: return "dual";
    case RuleId::DiaE: return "dia_e";
    case RuleId::BoxE: return "box_e";
    case RuleId::Mp: return "mp";
    case RuleId::IffIntro: return "iff_intro";
    case RuleId::AndIntro: return "and_intro";
    case RuleId::Nec: return "nec";
  }
  return "?";
}

inline std::optional<RuleId> parse_rule_id(std::string_view name) {
  for (RuleId r : kAllRules)
    if (rule_name(r) == name) return r;
  return std::nullopt;
}

/// Root world label; always declared.
inline const std::string kRootWorld = "w0";

struct ProofLine {
  int number = 0;
  Formula formula;
  std::string world;
  RuleId rule = RuleId::Assume;
  std::vector<int> cited;                     // ordinary rules
  std::optional<std::pair<int, int>> range;   // cp and raa: first-last of the subproof
  std::size_t source_line = 0;                // 1-based line in the script text
};

struct ProofScript {
  std::optional<System> system;
  std::optional<std::string> definitions_path;
  std::vector<ProofLine> lines;
};

namespace detail {

inline bool is_label(std::string_view s) {
  if (s.empty() || !((s[0] >= 'a' && s[0] <= 'z') || (s[0] >= 'A' && s[0] <= 'Z'))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty() || s.size() > 9) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace detail

/// Parses the line-oriented proof format:
///
///     system T
///     use liar.mod
///     1. assume ~q @ w0
///     2. ~~[]q @ w0 by subeq(1)
///     5. ~q -> q @ w0 by cp(1-4)
///
/// Steps must be numbered 1, 2, 3, ... in order. Errors carry the byte offset
/// into `text`.
inline ProofScript parse_proof_script(std::string_view text) {
  ProofScript script;
  std::size_t start = 0;
  std::size_t source_line = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++source_line;
    std::string_view raw = text.substr(start, end - start);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string_view line = detail::trim(raw);
    const std::size_t base = start + static_cast<std::size_t>(line.data() - raw.data());

    if (line.empty()) {
      // nothing
    } else if (line.starts_with("system ")) {
      auto name = detail::trim(line.substr(7));
      auto sys = parse_system(name);
      if (!sys) throw ParseError(base + 7, "a system name (K, D, T, B, K4, S4, S5)");
      script.system = *sys;
    } else if (line.starts_with("use ")) {
      auto path = detail::trim(line.substr(4));
      if (path.empty()) throw ParseError(base + 4, "a definitions file path");
      script.definitions_path = std::string(path);
    } else {
      auto dot = line.find('.');
      auto number = dot == std::string_view::npos ? std::nullopt : detail::parse_int(line.substr(0, dot));
      if (!number) throw ParseError(base, "a step number followed by '.'");
      int expected = static_cast<int>(script.lines.size()) + 1;
      if (*number != expected) throw ParseError(base, "step number " + std::to_string(expected));

      std::size_t pos = dot + 1;
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;

      bool assume = line.substr(pos).starts_with("assume ") || line.substr(pos).starts_with("assume\t");
      if (assume) pos += 7;

      auto at = line.find('@', pos);
      if (at == std::string_view::npos) throw ParseError(base + line.size(), "'@ <world label>'");
      Formula formula = parse_formula(line.substr(pos, at - pos), base + pos);

      std::string_view rest = line.substr(at + 1);
      std::size_t rest_base = base + at + 1;
      std::size_t lstart = 0;
      while (lstart < rest.size() && (rest[lstart] == ' ' || rest[lstart] == '\t')) ++lstart;
      std::size_t lend = lstart;
      while (lend < rest.size() && rest[lend] != ' ' && rest[lend] != '\t') ++lend;
      std::string label(rest.substr(lstart, lend - lstart));
      if (!detail::is_label(label)) throw ParseError(rest_base + lstart, "a world label");
      std::string_view tail = detail::trim(rest.substr(lend));
      std::size_t tail_base = rest_base + static_cast<std::size_t>(tail.data() - rest.data());

      ProofLine step{.number = *number, .formula = std::move(formula), .world = std::move(label),
                     .rule = RuleId::Assume, .cited = {}, .range = {}, .source_line = source_line};
      if (assume) {
        if (!tail.empty()) throw ParseError(tail_base, "end of line after an assumption");
      } else {
        if (!tail.starts_with("by ")) throw ParseError(tail_base, "'by <rule>(<lines>)'");
        std::string_view call = detail::trim(tail.substr(3));
        std::size_t call_base = tail_base + static_cast<std::size_t>(call.data() - tail.data());
        auto open = call.find('(');
        if (open == std::string_view::npos || call.back() != ')') throw ParseError(call_base, "'<rule>(<lines>)'");
        auto rule = parse_rule_id(detail::trim(call.substr(0, open)));
        if (!rule || *rule == RuleId::Assume) throw ParseError(call_base, "a rule name");
        step.rule = *rule;
        std::string_view args = detail::trim(call.substr(open + 1, call.size() - open - 2));
        std::size_t args_base = call_base + open + 1;
        if (*rule == RuleId::Cp || *rule == RuleId::Raa) {
          auto dash = args.find('-');
          auto first = dash == std::string_view::npos ? std::nullopt : detail::parse_int(args.substr(0, dash));
          auto last = dash == std::string_view::npos ? std::nullopt : detail::parse_int(args.substr(dash + 1));
          if (!first || !last) throw ParseError(args_base, "a line range '<first>-<last>'");
          step.range = std::make_pair(*first, *last);
        } else if (!args.empty()) {
          std::size_t s = 0;
          while (s <= args.size()) {
            std::size_t comma = args.find(',', s);
            if (comma == std::string_view::npos) comma = args.size();
            auto n = detail::parse_int(args.substr(s, comma - s));
            if (!n) throw ParseError(args_base + s, "a line number");
            step.cited.push_back(*n);
            s = comma + 1;
          }
        }
      }
      script.lines.push_back(std::move(step));
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return script;
}

inline std::string print_proof_line(const ProofLine& l) {
  std::string out = std::to_string(l.number) + ". ";
  if (l.rule == RuleId::Assume) return out + "assume " + print_formula(l.formula) + " @ " + l.world;
  out += print_formula(l.formula) + " @ " + l.world + " by " + rule_name(l.rule) + "(";
  if (l.range) {
    out += std::to_string(l.range->first) + "-" + std::to_string(l.range->second);
  } else {
    for (std::size_t i = 0; i < l.cited.size(); ++i) out += (i ? ", " : "") + std::to_string(l.cited[i]);
  }
  return out + ")";
}

inline std::string print_proof_script(const ProofScript& s) {
  std::string out;
  if (s.system) out += "system " + system_name(*s.system) + "\n";
  if (s.definitions_path) out += "use " + *s.definitions_path + "\n";
  for (const auto& l : s.lines) out += print_proof_line(l) + "\n";
  return out;
}

struct LabeledFormula {
  Formula formula;
  std::string world;
};

struct ProofFailure {
  int line = 0;
  std::string reason;
};

struct ProofReport {
  bool valid = false;
  std::optional<ProofFailure> first_failure;
  /// Every rule except assume, including the ones never used.
  std::map<RuleId, std::size_t> rules_used;
  std::optional<LabeledFormula> conclusion;

  std::size_t uses(RuleId r) const {
    auto it = rules_used.find(r);
    return it == rules_used.end() ? 0 : it->second;
  }
};

namespace detail {

class ProofChecker {
 public:
  ProofChecker(const ProofScript& script, const DefinitionSet& defs, const FrameClass& cls)
      : script_(script), defs_(defs), cls_(cls) {}

  ProofReport run() {
    ProofReport report;
    for (RuleId r : kAllRules)
      if (r != RuleId::Assume) report.rules_used[r] = 0;
    for (const auto& l : script_.lines)
      if (l.rule != RuleId::Assume) ++report.rules_used[l.rule];

    if (script_.lines.empty()) {
      report.first_failure = ProofFailure{0, "empty proof"};
      return report;
    }
    for (const auto& line : script_.lines) {
      if (auto why = check(line)) {
        report.first_failure = ProofFailure{line.number, *why};
        return report;
      }
    }
    if (!open_.empty()) {
      report.first_failure = ProofFailure{script_.lines.back().number,
                                          "assumption at line " + std::to_string(open_.back()) +
                                              " is never discharged"};
      return report;
    }
    const auto& last = script_.lines.back();
    report.valid = true;
    report.conclusion = LabeledFormula{last.formula, last.world};
    return report;
  }

 private:
  struct Info {
    const ProofLine* line;
    std::vector<int> scope;  // assumptions open when the line was written
    std::set<int> deps;      // dia_e lines whose witness label this line relies on
  };

  using Failure = std::optional<std::string>;

  const Info& info(int n) const { return infos_[static_cast<std::size_t>(n - 1)]; }
  const Formula& formula(int n) const { return info(n).line->formula; }
  const std::string& world(int n) const { return info(n).line->world; }

  bool accessible(int n) const {
    const auto& scope = info(n).scope;
    return scope.size() <= open_.size() && std::equal(scope.begin(), scope.end(), open_.begin());
  }

  std::optional<int> declaration_of(const std::string& label) const {
    auto it = declared_.find(label);
    if (it == declared_.end() || !accessible(it->second)) return std::nullopt;
    return it->second;
  }

  std::set<int> label_deps(const std::string& label) const {
    if (label == kRootWorld) return {};
    if (auto d = declaration_of(label)) return {*d};
    return {};
  }

  static std::string show(const Formula& f) { return "'" + print_formula(f) + "'"; }

  Failure expect_formula(const ProofLine& l, const Formula& derived) const {
    if (l.formula == derived) return std::nullopt;
    return rule_name(l.rule) + " yields " + show(derived) + ", not " + show(l.formula);
  }

  Failure expect_same_world(const ProofLine& l, int cited) const {
    if (world(cited) == l.world) return std::nullopt;
    return rule_name(l.rule) + " works at one world, but line " + std::to_string(cited) + " is at " +
           world(cited) + " and this line at " + l.world;
  }

  Failure check(const ProofLine& l) {
    infos_.push_back(Info{&l, open_, {}});
    if (Failure f = check_rule(l)) return f;
    script_labels_.insert(l.world);
    return std::nullopt;
  }

  Info& current() { return infos_.back(); }

  Failure check_citations(const ProofLine& l, std::size_t arity) {
    if (l.cited.size() != arity)
      return rule_name(l.rule) + " cites " + std::to_string(arity) + " line(s), got " + std::to_string(l.cited.size());
    for (int c : l.cited) {
      if (c < 1 || c >= l.number) return "cited line " + std::to_string(c) + " does not precede line " + std::to_string(l.number);
      if (!accessible(c)) return "cited line " + std::to_string(c) + " lies in a closed subproof";
      current().deps.insert(info(c).deps.begin(), info(c).deps.end());
    }
    return std::nullopt;
  }

  Failure check_rule(const ProofLine& l) {
    const int n = l.number;
    if (l.rule != RuleId::DiaE) {
      if (l.world != kRootWorld && !declaration_of(l.world))
        return "world label '" + l.world + "' is not declared";
      auto d = label_deps(l.world);
      current().deps.insert(d.begin(), d.end());
    }

    switch (l.rule) {
      case RuleId::Assume:
        open_.push_back(n);
        current().scope = open_;
        return std::nullopt;

      case RuleId::Dne: {
        if (auto e = check_citations(l, 1)) return e;
        int c = l.cited[0];
        if (auto e = expect_same_world(l, c)) return e;
        const Formula& p = formula(c);
        if (!p.is(Op::Not) || !p.operand().is(Op::Not)) return "dne needs a double negation at line " + std::to_string(c);
        return expect_formula(l, p.operand().operand());
      }

      case RuleId::Dni: {
        if (auto e = check_citations(l, 1)) return e;
        int c = l.cited[0];
        if (auto e = expect_same_world(l, c)) return e;
        return expect_formula(l, !!formula(c));
      }

      case RuleId::Subeq: {
        if (auto e = check_citations(l, 1)) return e;
        int c = l.cited[0];
        if (auto e = expect_same_world(l, c)) return e;
        const Formula& host = formula(c);
        for (const auto& d : defs_) {
          Formula atom = Formula::atom(d.lhs);
          for (const auto& [target, replacement] : {std::pair{atom, d.rhs}, std::pair{d.rhs, atom}}) {
            Formula rewritten = substitute(host, target, replacement);
            if (!(rewritten == host) && rewritten == l.formula) return std::nullopt;
          }
        }
        return "no definition rewrites line " + std::to_string(c) + " into " + show(l.formula);
      }

      case RuleId::TAxiom: {
        if (!cls_.reflexive())
          return "t_axiom needs a reflexive frame class, " + to_string(cls_) + " is not reflexive";
        if (auto e = check_citations(l, 1)) return e;
        int c = l.cited[0];
        if (auto e = expect_same_world(l, c)) return e;
        if (!formula(c).is(Op::Box)) return "t_axiom needs a boxed formula at line " + std::to_string(c);
        return expect_formula(l, formula(c).operand());
      }

      case RuleId::Dual: {
        if (auto e = check_citations(l, 1)) return e;
        int c = l.cited[0];
        if (auto e = expect_same_world(l, c)) return e;
        const Formula& p = formula(c);
        if (p.is(Op::Not) && p.operand().is(Op::Box))
          return expect_formula(l, Formula::diamond(!p.operand().operand()));
        if (p.is(Op::Diamond) && p.operand().is(Op::Not))
          return expect_formula(l, !Formula::box(p.operand().operand()));
        return "dual needs '~[]A' or '<>~A' at line " + std::to_string(c);
      }

      case RuleId::DiaE: {
        if (auto e = check_citations(l, 1)) return e;
        int c = l.cited[0];
        if (l.world == kRootWorld || script_labels_.contains(l.world) || declared_.contains(l.world))
          return "world label '" + l.world + "' is not fresh";
        if (!formula(c).is(Op::Diamond)) return "dia_e needs a '<>' formula at line " + std::to_string(c);
        if (auto e = expect_formula(l, formula(c).operand())) return e;
        declared_[l.world] = n;
        access_.push_back({world(c), l.world, n});
        current().deps.insert(n);
        return std::nullopt;
      }

      case RuleId::BoxE: {
        if (auto e = check_citations(l, 1)) return e;
        int c = l.cited[0];
        if (!formula(c).is(Op::Box)) return "box_e needs a boxed formula at line " + std::to_string(c);
        const AccessFact* fact = nullptr;
        for (const auto& a : access_)
          if (a.from == world(c) && a.to == l.world && accessible(a.line)) fact = &a;
        if (fact == nullptr) return "no recorded access " + world(c) + " -> " + l.world;
        current().deps.insert(fact->line);
        return expect_formula(l, formula(c).operand());
      }

      case RuleId::Mp: {
        if (auto e = check_citations(l, 2)) return e;
        for (auto [major, minor] : {std::pair{l.cited[0], l.cited[1]}, std::pair{l.cited[1], l.cited[0]}}) {
          if (world(major) != l.world || world(minor) != l.world) continue;
          const Formula& m = formula(major);
          if (m.is(Op::Implies) && m.lhs() == formula(minor) && m.rhs() == l.formula) return std::nullopt;
          if (m.is(Op::Iff) && ((m.lhs() == formula(minor) && m.rhs() == l.formula) ||
                                (m.rhs() == formula(minor) && m.lhs() == l.formula)))
            return std::nullopt;
        }
        return "mp needs 'A -> B' (or 'A <-> B') and 'A' at this line's world yielding " + show(l.formula);
      }

      case RuleId::IffIntro: {
        if (auto e = check_citations(l, 2)) return e;
        int a = l.cited[0], b = l.cited[1];
        if (auto e = expect_same_world(l, a)) return e;
        if (auto e = expect_same_world(l, b)) return e;
        const Formula& fa = formula(a);
        const Formula& fb = formula(b);
        if (!fa.is(Op::Implies) || !fb.is(Op::Implies) || !(fa.lhs() == fb.rhs()) || !(fa.rhs() == fb.lhs()))
          return "iff_intro needs 'A -> B' and 'B -> A'";
        return expect_formula(l, Formula::biconditional(fa.lhs(), fa.rhs()));
      }

      case RuleId::AndIntro: {
        if (auto e = check_citations(l, 2)) return e;
        if (auto e = expect_same_world(l, l.cited[0])) return e;
        if (auto e = expect_same_world(l, l.cited[1])) return e;
        return expect_formula(l, Formula::conjunction(formula(l.cited[0]), formula(l.cited[1])));
      }

      case RuleId::Nec: {
        // Universal generalization on worlds: the premise must be proved at
        // the root from no open assumptions and no facts about witnesses.
        if (l.cited.size() != 1) return "nec cites 1 line";
        int c = l.cited[0];
        if (c < 1 || c >= n) return "cited line " + std::to_string(c) + " does not precede line " + std::to_string(n);
        if (!accessible(c)) return "cited line " + std::to_string(c) + " lies in a closed subproof";
        if (!info(c).scope.empty()) return "nec premise at line " + std::to_string(c) + " depends on open assumptions";
        if (!info(c).deps.empty() || world(c) != kRootWorld)
          return "nec premise at line " + std::to_string(c) + " depends on facts about particular worlds";
        return expect_formula(l, Formula::box(formula(c)));
      }

      case RuleId::Cp:
      case RuleId::Raa: return check_discharge(l);
    }
    return "unknown rule";
  }

  Failure check_discharge(const ProofLine& l) {
    const int n = l.number;
    if (!l.range) return rule_name(l.rule) + " needs a line range";
    auto [first, last] = *l.range;
    if (first < 1 || last < first || last >= n)
      return "range " + std::to_string(first) + "-" + std::to_string(last) + " is not a subproof before line " +
             std::to_string(n);
    if (last != n - 1) return "range must end at the line just before " + std::to_string(n);
    if (info(first).line->rule != RuleId::Assume) return "line " + std::to_string(first) + " is not an assumption";
    const Formula& assumption = formula(first);
    const std::string& at = world(first);
    if (l.world != at)
      return rule_name(l.rule) + " concludes at the assumption's world " + at + ", not " + l.world;

    if (l.rule == RuleId::Cp && info(last).line->rule == RuleId::Raa && info(last).line->range &&
        info(last).line->range->first == first && (open_.empty() || open_.back() != first)) {
      // The reductio at `last` already discharged `first`; its conclusion
      // doubles as the consequent of the conditional.
      current().deps.insert(info(last).deps.begin(), info(last).deps.end());
      return expect_formula(l, Formula::implication(assumption, formula(last)));
    }

    if (open_.empty() || open_.back() != first)
      return "line " + std::to_string(first) + " is not the innermost open assumption";

    std::set<int> deps;
    for (int k = first; k <= last; ++k)
      if (accessible(k)) deps.insert(info(k).deps.begin(), info(k).deps.end());
    for (auto it = deps.begin(); it != deps.end();) it = (*it >= first) ? deps.erase(it) : std::next(it);

    Failure result;
    if (l.rule == RuleId::Cp) {
      if (world(last) != at) return "cp needs the subproof to end at world " + at;
      result = expect_formula(l, Formula::implication(assumption, formula(last)));
    } else {
      bool found = false;
      for (int a = first; a <= last && !found; ++a) {
        if (!accessible(a)) continue;
        for (int b = first; b <= last && !found; ++b) {
          if (!accessible(b) || world(a) != world(b)) continue;
          const Formula& fb = formula(b);
          found = fb.is(Op::Not) && fb.operand() == formula(a);
        }
      }
      if (!found) return "no contradictory pair X, ~X at one world in lines " + std::to_string(first) + "-" +
                         std::to_string(last);
      result = expect_formula(l, !assumption);
    }
    if (result) return result;
    open_.pop_back();
    current().scope = open_;
    current().deps.insert(deps.begin(), deps.end());
    return std::nullopt;
  }

  struct AccessFact {
    std::string from;
    std::string to;
    int line;
  };

  const ProofScript& script_;
  const DefinitionSet& defs_;
  FrameClass cls_;
  std::vector<Info> infos_;
  std::vector<int> open_;
  std::map<std::string, int> declared_;
  std::set<std::string> script_labels_;
  std::vector<AccessFact> access_;
};

}  // namespace detail

/// Checks every line in order and stops at the first inadmissible one.
inline ProofReport check_proof(const ProofScript& script, const DefinitionSet& defs, const FrameClass& cls) {
  return detail::ProofChecker(script, defs, cls).run();
}

inline std::string report_to_text(const ProofReport& r) {
  std::ostringstream os;
  if (r.valid) {
    os << "valid; necessitation uses: " << r.uses(RuleId::Nec) << "\n";
    os << "conclusion: " << print_formula(r.conclusion->formula) << " @ " << r.conclusion->world << "\n";
  } else {
    os << "invalid at line " << r.first_failure->line << ": " << r.first_failure->reason << "\n";
  }
  os << "rules used:";
  for (const auto& [rule, count] : r.rules_used)
    if (count > 0) os << " " << rule_name(rule) << "=" << count;
  os << "\n";
  return os.str();
}

inline nlohmann::json report_to_json(const ProofReport& r) {
  nlohmann::json rules = nlohmann::json::object();
  for (const auto& [rule, count] : r.rules_used) rules[rule_name(rule)] = count;
  nlohmann::json j{{"valid", r.valid}, {"rules_used", rules}};
  j["first_failure"] = r.first_failure ? nlohmann::json{{"line", r.first_failure->line}, {"reason", r.first_failure->reason}}
                                       : nlohmann::json(nullptr);
  j["conclusion"] = r.conclusion ? nlohmann::json{{"formula", print_formula(r.conclusion->formula)},
                                                  {"world", r.conclusion->world}}
                                 : nlohmann::json(nullptr);
  return j;
}

}  // namespace modliar
