#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "modliar/formula.hpp"

namespace modliar::testing {

/// Deterministic random formulas: the same seed gives the same corpus.
class FormulaGenerator {
 public:
  FormulaGenerator(std::uint32_t seed, std::vector<std::string> atoms, int max_modal_depth, int max_height)
      : rng_(seed), atoms_(std::move(atoms)), max_modal_depth_(max_modal_depth), max_height_(max_height) {}

  Formula next() { return generate(max_modal_depth_, max_height_); }

 private:
  std::uint32_t pick(std::uint32_t n) { return rng_() % n; }

  Formula generate(int modal_budget, int height) {
    if (height == 0 || pick(5) == 0) return Formula::atom(atoms_[pick(static_cast<std::uint32_t>(atoms_.size()))]);
    const std::uint32_t choices = modal_budget > 0 ? 7 : 5;
    const std::uint32_t choice = pick(choices);
    if (choice == 0) return Formula::negation(generate(modal_budget, height - 1));
    if (choice == 5) return Formula::box(generate(modal_budget - 1, height - 1));
    if (choice == 6) return Formula::diamond(generate(modal_budget - 1, height - 1));
    Formula lhs = generate(modal_budget, height - 1);
    Formula rhs = generate(modal_budget, height - 1);
    static constexpr Op kBinary[] = {Op::And, Op::Or, Op::Implies, Op::Iff};
    return Formula::binary(kBinary[choice - 1], std::move(lhs), std::move(rhs));
  }

  std::mt19937 rng_;
  std::vector<std::string> atoms_;
  int max_modal_depth_;
  int max_height_;
};

}  // namespace modliar::testing
