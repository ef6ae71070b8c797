#pragma once

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "modliar/formula.hpp"

namespace modliar {

/// Raised for malformed formula, definition or proof text. `offset` is a byte
/// offset into the text handed to the parser.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string expected)
      : std::runtime_error("syntax error at byte " + std::to_string(offset) + ": expected " + expected),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class DefinitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

enum class Tok { Not, Box, Diamond, And, Or, Implies, Iff, LParen, RParen, Atom, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
};

inline std::string describe(Tok t) {
  switch (t) {
    case Tok::Not: return "'~'";
    case Tok::Box: return "'[]'";
    case Tok::Diamond: return "'<>'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Implies: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Atom: return "atom";
    case Tok::End: return "end of input";
  }
  return "?";
}

inline std::vector<Token> tokenize(std::string_view text, std::size_t base = 0) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto starts = [&](std::string_view lit) { return text.substr(i, lit.size()) == lit; };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    std::size_t at = base + i;
    if (c >= 'a' && c <= 'z') {
      std::size_t j = i + 1;
      while (j < text.size() && ((text[j] >= 'a' && text[j] <= 'z') || (text[j] >= 'A' && text[j] <= 'Z') ||
                                 (text[j] >= '0' && text[j] <= '9') || text[j] == '_'))
        ++j;
      out.push_back({Tok::Atom, at, std::string(text.substr(i, j - i))});
      i = j;
    } else if (starts("<->")) {
      out.push_back({Tok::Iff, at, "<->"});
      i += 3;
    } else if (starts("<>")) {
      out.push_back({Tok::Diamond, at, "<>"});
      i += 2;
    } else if (starts("[]")) {
      out.push_back({Tok::Box, at, "[]"});
      i += 2;
    } else if (starts("->")) {
      out.push_back({Tok::Implies, at, "->"});
      i += 2;
    } else if (c == '~') {
      out.push_back({Tok::Not, at, "~"});
      ++i;
    } else if (c == '&') {
      out.push_back({Tok::And, at, "&"});
      ++i;
    } else if (c == '|') {
      out.push_back({Tok::Or, at, "|"});
      ++i;
    } else if (c == '(') {
      out.push_back({Tok::LParen, at, "("});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RParen, at, ")"});
      ++i;
    } else {
      throw ParseError(at, "a connective, '(' or an atom");
    }
  }
  out.push_back({Tok::End, base + text.size(), ""});
  return out;
}

/// Recursive descent over the token stream, one function per grammar level.
class FormulaParser {
 public:
  explicit FormulaParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse_all() {
    Formula f = parse_iff();
    if (peek().kind != Tok::End) throw ParseError(peek().offset, "a binary connective or end of input");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool accept(Tok t) {
    if (peek().kind != t) return false;
    ++pos_;
    return true;
  }

  Formula parse_iff() {
    Formula lhs = parse_imp();
    if (accept(Tok::Iff)) {
      Formula rhs = parse_imp();
      if (peek().kind == Tok::Iff) throw ParseError(peek().offset, "parentheses around a nested '<->'");
      return Formula::biconditional(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula parse_imp() {
    Formula lhs = parse_or();
    if (accept(Tok::Implies)) return Formula::implication(std::move(lhs), parse_imp());
    return lhs;
  }

  Formula parse_or() {
    Formula acc = parse_and();
    while (accept(Tok::Or)) acc = Formula::disjunction(std::move(acc), parse_and());
    return acc;
  }

  Formula parse_and() {
    Formula acc = parse_unary();
    while (accept(Tok::And)) acc = Formula::conjunction(std::move(acc), parse_unary());
    return acc;
  }

  Formula parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not: ++pos_; return Formula::negation(parse_unary());
      case Tok::Box: ++pos_; return Formula::box(parse_unary());
      case Tok::Diamond: ++pos_; return Formula::diamond(parse_unary());
      case Tok::Atom: ++pos_; return Formula::atom(t.text);
      case Tok::LParen: {
        ++pos_;
        Formula inner = parse_iff();
        if (!accept(Tok::RParen)) throw ParseError(peek().offset, "')'");
        return inner;
      }
      default: throw ParseError(t.offset, "a formula ('~', '[]', '<>', '(' or an atom), found " + describe(t.kind));
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

/// Binding strength used by the printer; higher binds tighter.
inline int precedence(Op op) {
  switch (op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    default: return 5;
  }
}

inline void print_into(const Formula& f, int min_prec, std::string& out) {
  int prec = precedence(f.op());
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (f.op()) {
    case Op::Atom: out += f.name(); break;
    case Op::Not: out += '~'; print_into(f.operand(), 5, out); break;
    case Op::Box: out += "[]"; print_into(f.operand(), 5, out); break;
    case Op::Diamond: out += "<>"; print_into(f.operand(), 5, out); break;
    case Op::And:
      print_into(f.lhs(), 4, out);
      out += " & ";
      print_into(f.rhs(), 5, out);
      break;
    case Op::Or:
      print_into(f.lhs(), 3, out);
      out += " | ";
      print_into(f.rhs(), 4, out);
      break;
    case Op::Implies:
      print_into(f.lhs(), 3, out);
      out += " -> ";
      print_into(f.rhs(), 2, out);
      break;
    case Op::Iff:
      print_into(f.lhs(), 2, out);
      out += " <-> ";
      print_into(f.rhs(), 2, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace detail

/// Parses one formula. `base_offset` shifts reported error offsets when the
/// text is a slice of a larger document.
inline Formula parse_formula(std::string_view text, std::size_t base_offset = 0) {
  detail::FormulaParser parser(detail::tokenize(text, base_offset));
  return parser.parse_all();
}

/// Renders with the fewest parentheses that still parse back to `f`.
inline std::string print_formula(const Formula& f) {
  std::string out;
  detail::print_into(f, 0, out);
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << print_formula(f); }

/// Parses `def <atom> := <formula>` lines; `#` starts a comment.
inline DefinitionSet parse_definitions(std::string_view text) {
  DefinitionSet defs;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    };
    skip_ws();
    if (i < line.size()) {
      if (line.substr(i, 3) != "def" || i + 3 >= line.size() || (line[i + 3] != ' ' && line[i + 3] != '\t'))
        throw ParseError(line_start + i, "'def'");
      i += 3;
      skip_ws();
      std::size_t name_start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != ':') ++i;
      std::string name(line.substr(name_start, i - name_start));
      if (!is_valid_atom_name(name)) throw ParseError(line_start + name_start, "an atom name");
      skip_ws();
      if (line.substr(i, 2) != ":=") throw ParseError(line_start + i, "':='");
      i += 2;
      Formula body = parse_formula(line.substr(i), line_start + i);
      if (defs.find(name) != nullptr) throw DefinitionError("duplicate definition of '" + name + "'");
      defs.add(Definition{name, std::move(body)});
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  return defs;
}

inline std::string print_definitions(const DefinitionSet& defs) {
  std::string out;
  for (const auto& d : defs) out += "def " + d.lhs + " := " + print_formula(d.rhs) + "\n";
  return out;
}

/// Replaces every subtree of `host` equal to `target` by `replacement`.
/// Matching is outermost first; inserted material is not rescanned.
inline Formula substitute(const Formula& host, const Formula& target, const Formula& replacement) {
  if (host == target) return replacement;
  switch (host.op()) {
    case Op::Atom: return host;
    case Op::Not:
    case Op::Box:
    case Op::Diamond: {
      Formula inner = substitute(host.operand(), target, replacement);
      if (inner.same_node(host.operand())) return host;
      return Formula::unary(host.op(), std::move(inner));
    }
    default: {
      Formula l = substitute(host.lhs(), target, replacement);
      Formula r = substitute(host.rhs(), target, replacement);
      if (l.same_node(host.lhs()) && r.same_node(host.rhs())) return host;
      return Formula::binary(host.op(), std::move(l), std::move(r));
    }
  }
}

}  // namespace modliar
