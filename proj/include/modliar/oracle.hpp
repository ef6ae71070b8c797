#pragma once

#include <bit>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "modliar/formula.hpp"
#include "modliar/kripke.hpp"
#include "modliar/model_io.hpp"
#include "modliar/syntax.hpp"

namespace modliar {

/// Largest model size the brute-force search accepts (2^25 frames at the top).
inline constexpr std::size_t kMaxOracleWorlds = 5;

struct SearchResult {
  std::optional<KripkeModel> model;
  std::optional<World> designated;
  std::uint64_t models_checked = 0;  // (frame, valuation) pairs evaluated
  std::uint64_t frames_checked = 0;  // frames that passed the class filter

  bool found() const { return model.has_value(); }
};

namespace detail {

/// Evaluates a formula at all worlds of a small model at once; world w is bit w.
class MaskEvaluator {
 public:
  MaskEvaluator(const std::vector<std::string>& atoms) {
    for (std::size_t i = 0; i < atoms.size(); ++i) atom_index_[atoms[i]] = static_cast<int>(i);
  }

  int compile(const Formula& f) {
    Instr in{f.op(), -1, -1, -1};
    if (f.is(Op::Atom)) {
      in.atom = atom_index_.at(f.name());
    } else {
      in.a = compile(f.lhs());
      if (is_binary(f.op())) in.b = compile(f.rhs());
    }
    code_.push_back(in);
    return static_cast<int>(code_.size()) - 1;
  }

  /// Runs every compiled instruction; results readable through result().
  void run(std::size_t n, const std::uint32_t* succ, const std::uint32_t* atom_masks) {
    const std::uint32_t full = (n >= 32) ? ~0u : ((1u << n) - 1);
    values_.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
      const Instr& in = code_[i];
      std::uint32_t a = in.a >= 0 ? values_[static_cast<std::size_t>(in.a)] : 0;
      std::uint32_t b = in.b >= 0 ? values_[static_cast<std::size_t>(in.b)] : 0;
      std::uint32_t out = 0;
      switch (in.op) {
        case Op::Atom: out = atom_masks[in.atom]; break;
        case Op::Not: out = full & ~a; break;
        case Op::And: out = a & b; break;
        case Op::Or: out = a | b; break;
        case Op::Implies: out = (full & ~a) | b; break;
        case Op::Iff: out = full & ~(a ^ b); break;
        case Op::Box:
          for (std::size_t w = 0; w < n; ++w)
            if ((succ[w] & ~a) == 0) out |= 1u << w;
          break;
        case Op::Diamond:
          for (std::size_t w = 0; w < n; ++w)
            if ((succ[w] & a) != 0) out |= 1u << w;
          break;
      }
      values_[i] = out;
    }
  }

  std::uint32_t result(int index) const { return values_[static_cast<std::size_t>(index)]; }

 private:
  struct Instr {
    Op op;
    int a;
    int b;
    int atom;
  };
  std::map<std::string, int> atom_index_;
  std::vector<Instr> code_;
  std::vector<std::uint32_t> values_;
};

inline bool frame_in_class(std::size_t n, const std::uint32_t* succ, const FrameClass& cls) {
  for (std::size_t w = 0; w < n; ++w) {
    if (cls.reflexive() && !(succ[w] & (1u << w))) return false;
    if (cls.serial() && succ[w] == 0) return false;
    for (std::uint32_t rest = succ[w]; rest != 0; rest &= rest - 1) {
      auto v = static_cast<std::size_t>(std::countr_zero(rest));
      if (cls.symmetric() && !(succ[v] & (1u << w))) return false;
      if (cls.transitive() && (succ[v] & ~succ[w]) != 0) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Exhaustive search for a model in `cls` with at most `max_worlds` worlds
/// that respects `defs` at every world and satisfies `query` somewhere.
///
/// Order is part of the contract: world count ascending, then the access
/// bitmask (bit i*n+j is the pair (i,j)), then the valuation bitmask (bit
/// w*k+a means atom a, in sorted order, is true at w). Frames outside the
/// class are skipped before valuations are enumerated. The first hit is
/// returned with its lowest satisfying world.
inline SearchResult enumerate_models(const DefinitionSet& defs, const Formula& query, const FrameClass& cls,
                                     std::size_t max_worlds) {
  if (max_worlds < 1 || max_worlds > kMaxOracleWorlds)
    throw std::invalid_argument("max_worlds must be between 1 and " + std::to_string(kMaxOracleWorlds));

  std::set<std::string> atom_set = defs.atoms();
  collect_atoms(query, atom_set);
  const std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  const std::size_t k = atoms.size();

  detail::MaskEvaluator eval(atoms);
  std::vector<int> constraint_ids;
  for (const auto& d : defs) constraint_ids.push_back(eval.compile(d.as_constraint()));
  const int query_id = eval.compile(query);

  SearchResult result;
  std::uint32_t succ[kMaxOracleWorlds];
  std::vector<std::uint32_t> atom_masks(k == 0 ? 1 : k);

  for (std::size_t n = 1; n <= max_worlds; ++n) {
    const std::uint32_t full = (1u << n) - 1;
    const std::uint64_t n_frames = std::uint64_t{1} << (n * n);
    const std::uint64_t n_vals = std::uint64_t{1} << (n * k);
    for (std::uint64_t access = 0; access < n_frames; ++access) {
      for (std::size_t w = 0; w < n; ++w) succ[w] = static_cast<std::uint32_t>((access >> (w * n)) & full);
      if (!detail::frame_in_class(n, succ, cls)) continue;
      ++result.frames_checked;
      for (std::uint64_t val = 0; val < n_vals; ++val) {
        ++result.models_checked;
        for (std::size_t a = 0; a < k; ++a) {
          std::uint32_t m = 0;
          for (std::size_t w = 0; w < n; ++w)
            if ((val >> (w * k + a)) & 1u) m |= 1u << w;
          atom_masks[a] = m;
        }
        eval.run(n, succ, atom_masks.data());
        bool respects = true;
        for (int id : constraint_ids)
          if (eval.result(id) != full) {
            respects = false;
            break;
          }
        if (!respects || eval.result(query_id) == 0) continue;

        std::set<Edge> edges;
        std::vector<std::set<std::string>> valuation(n);
        for (std::size_t w = 0; w < n; ++w) {
          for (std::size_t v = 0; v < n; ++v)
            if (succ[w] & (1u << v)) edges.insert({w, v});
          for (std::size_t a = 0; a < k; ++a)
            if (atom_masks[a] & (1u << w)) valuation[w].insert(atoms[a]);
        }
        KripkeModel model(n, std::move(edges), std::move(valuation));
        World designated = static_cast<World>(std::countr_zero(eval.result(query_id)));
        if (!respects_definitions(model, defs) || !in_frame_class(model, cls) ||
            !holds_at(model, designated, query))
          throw std::logic_error("oracle witness failed the semantic check");
        result.model = std::move(model);
        result.designated = designated;
        return result;
      }
    }
  }
  return result;
}

struct CensusRow {
  FrameClass cls;
  bool satisfiable = false;
  std::optional<KripkeModel> witness;
  std::optional<World> designated;
  std::uint64_t models_checked = 0;
};

/// `a | ~a` over the first defined atom, or `p | ~p` without definitions.
inline Formula census_query(const DefinitionSet& defs) {
  Formula a = Formula::atom(defs.empty() ? std::string("p") : defs[0].lhs);
  return Formula::disjunction(a, Formula::negation(a));
}

inline std::vector<CensusRow> census(const DefinitionSet& defs, const std::vector<FrameClass>& classes,
                                     std::size_t max_worlds) {
  const Formula query = census_query(defs);
  std::vector<CensusRow> rows;
  for (const auto& c : classes) {
    SearchResult r = enumerate_models(defs, query, c, max_worlds);
    CensusRow row{c, r.found(), std::move(r.model), r.designated, r.models_checked};
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string census_to_text(const std::vector<CensusRow>& rows, std::size_t max_worlds) {
  std::ostringstream os;
  os << std::left << std::setw(7) << "class" << std::setw(16) << "satisfiable" << std::setw(9) << "worlds"
     << "models checked\n";
  for (const auto& r : rows) {
    os << std::setw(7) << to_string(r.cls)
       << std::setw(16) << (r.satisfiable ? "yes" : "no (<= " + std::to_string(max_worlds) + ")")
       << std::setw(9) << (r.witness ? std::to_string(r.witness->size()) : "-") << r.models_checked << "\n";
  }
  return os.str();
}

inline nlohmann::json census_to_json(const std::vector<CensusRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"class", to_string(r.cls)},
                   {"satisfiable", r.satisfiable},
                   {"witness", r.witness ? model_to_json(*r.witness) : nlohmann::json(nullptr)},
                   {"designated", r.designated ? nlohmann::json(*r.designated) : nlohmann::json(nullptr)},
                   {"models_checked", r.models_checked}});
  }
  return out;
}

}  // namespace modliar
