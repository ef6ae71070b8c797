#include <gtest/gtest.h>

#include <algorithm>

#include "modliar/bundled.hpp"
#include "modliar/proof.hpp"
#include "modliar/tableau.hpp"
#include "support/mutations.hpp"

namespace modliar {
namespace {

const DefinitionSet kLiar = parse_definitions(bundled::kLiarDefinitions);

FrameClass cls(System s) { return frame_class(s); }

ProofReport check(std::string_view text, System s = System::T, const DefinitionSet& defs = kLiar) {
  return check_proof(parse_proof_script(text), defs, cls(s));
}

void expect_failure_at(const ProofReport& r, int line, std::string_view reason_part) {
  ASSERT_FALSE(r.valid);
  ASSERT_TRUE(r.first_failure);
  EXPECT_EQ(r.first_failure->line, line) << r.first_failure->reason;
  EXPECT_NE(r.first_failure->reason.find(reason_part), std::string::npos) << r.first_failure->reason;
}

TEST(LiarDerivation, ValidInTWithoutNecessitation) {
  ProofScript script = parse_proof_script(bundled::kLiarDerivation);
  EXPECT_EQ(script.system, System::T);
  EXPECT_EQ(script.definitions_path, "liar.mod");
  ASSERT_EQ(script.lines.size(), 15u);

  ProofReport r = check_proof(script, kLiar, cls(System::T));
  ASSERT_TRUE(r.valid) << r.first_failure->line << ": " << r.first_failure->reason;
  EXPECT_FALSE(r.first_failure.has_value());
  EXPECT_EQ(r.uses(RuleId::Nec), 0u);
  ASSERT_TRUE(r.conclusion);
  EXPECT_EQ(r.conclusion->formula, parse_formula("q <-> ~q"));
  EXPECT_EQ(r.conclusion->world, kRootWorld);
  EXPECT_EQ(r.uses(RuleId::TAxiom), 2u);
  EXPECT_EQ(r.uses(RuleId::DiaE), 1u);
}

TEST(LiarDerivation, ValidInEveryReflexiveClass) {
  for (System s : {System::T, System::B, System::S4, System::S5}) EXPECT_TRUE(check(bundled::kLiarDerivation, s).valid);
}

TEST(LiarDerivation, FailsAtTheFirstTAxiomWithoutReflexivity) {
  for (System s : {System::K, System::D, System::K4}) expect_failure_at(check(bundled::kLiarDerivation, s), 4, "reflexive");
}

TEST(LiarDerivation, RulesUsedSumsToNonAssumeLines) {
  ProofScript script = parse_proof_script(bundled::kLiarDerivation);
  for (System s : kAllSystems) {
    ProofReport r = check_proof(script, kLiar, cls(s));
    std::size_t total = 0;
    for (const auto& [rule, count] : r.rules_used) total += count;
    auto non_assume = std::count_if(script.lines.begin(), script.lines.end(),
                                    [](const ProofLine& l) { return l.rule != RuleId::Assume; });
    EXPECT_EQ(total, static_cast<std::size_t>(non_assume));
    EXPECT_EQ(r.rules_used.size(), kAllRules.size() - 1);
  }
}

TEST(LiarDerivation, NeedsTheDefinition) {
  expect_failure_at(check(bundled::kLiarDerivation, System::T, DefinitionSet{}), 2, "no definition");
}

TEST(ViaNecessitation, ValidAndCountsOneNecessitation) {
  ProofReport r = check(bundled::kLiarViaNecessitation);
  ASSERT_TRUE(r.valid) << r.first_failure->line << ": " << r.first_failure->reason;
  EXPECT_EQ(r.uses(RuleId::Nec), 1u);
  EXPECT_EQ(r.conclusion->formula, parse_formula("q <-> ~q"));
  expect_failure_at(check(bundled::kLiarViaNecessitation, System::K), 12, "reflexive");
}

TEST(Soundness, ValidConclusionsWithoutNecAreGlobalConsequences) {
  for (std::string_view text : {bundled::kLiarDerivation, bundled::kLiarViaNecessitation}) {
    ProofScript script = parse_proof_script(text);
    for (System s : kAllSystems) {
      ProofReport r = check_proof(script, kLiar, cls(s));
      if (!r.valid || r.uses(RuleId::Nec) > 0 || r.conclusion->world != kRootWorld) continue;
      EXPECT_TRUE(decide(kLiar, !r.conclusion->formula, cls(s)).unsat()) << system_name(s);
    }
  }
}

TEST(DiaE, ReusedLabelIsNotFresh) {
  expect_failure_at(check("1. assume q @ w0\n"
                          "2. ~[]q @ w0 by subeq(1)\n"
                          "3. <>~q @ w0 by dual(2)\n"
                          "4. ~q @ w0 by dia_e(3)\n"
                          "5. ~q @ w0 by raa(1-4)\n"),
                    4, "not fresh");
}

TEST(DiaE, LabelUsedEarlierIsNotFresh) {
  expect_failure_at(check("1. assume <>p @ w0\n"
                          "2. p @ v by dia_e(1)\n"
                          "3. p @ v by dia_e(1)\n"),
                    3, "not fresh");
}

TEST(DiaE, LabelIsScopedToItsSubproof) {
  expect_failure_at(check("1. assume <>p @ w0\n"
                          "2. p @ v by dia_e(1)\n"
                          "3. <>p -> p @ w0 by cp(1-2)\n"
                          "4. ~~p @ v by dni(2)\n"),
                    3, "cp needs the subproof to end at world w0");
}

TEST(BoxE, NeedsRecordedAccess) {
  const char* with_access =
      "1. assume []p @ w0\n"
      "2. assume <>q @ w0\n"
      "3. q @ v by dia_e(2)\n"
      "4. p @ v by box_e(1)\n"
      "5. p & q @ v by and_intro(4, 3)\n";
  expect_failure_at(check(with_access, System::K), 5, "never discharged");

  expect_failure_at(check("1. assume []p @ w0\n"
                          "2. assume <>q @ w0\n"
                          "3. q @ v by dia_e(2)\n"
                          "4. []p @ v by box_e(1)\n"
                          "5. p @ w0 by box_e(4)\n",
                          System::K),
                    4, "box_e yields");
  expect_failure_at(check("1. assume <>q @ w0\n"
                          "2. q @ v by dia_e(1)\n"
                          "3. assume []p @ v\n"
                          "4. p @ w0 by box_e(3)\n",
                          System::K),
                    4, "no recorded access v -> w0");
}

TEST(Raa, CrossWorldPairIsNotAContradiction) {
  expect_failure_at(check("1. assume q @ w0\n"
                          "2. ~[]q @ w0 by subeq(1)\n"
                          "3. <>~q @ w0 by dual(2)\n"
                          "4. ~q @ W by dia_e(3)\n"
                          "5. ~q @ w0 by raa(1-4)\n"),
                    5, "no contradictory pair");
}

TEST(Cp, RangeMustCloseTheInnermostSubproof) {
  expect_failure_at(check("1. assume p @ w0\n"
                          "2. ~~p @ w0 by dni(1)\n"
                          "3. p -> p @ w0 by cp(1-1)\n"),
                    3, "range must end");
  expect_failure_at(check("1. assume p @ w0\n"
                          "2. assume q @ w0\n"
                          "3. p -> q @ w0 by cp(1-2)\n"),
                    3, "innermost");
  expect_failure_at(check("1. ~~p @ w0 by dni(1)\n"), 1, "does not precede");
  EXPECT_TRUE(check("1. assume p @ w0\n2. p -> p @ w0 by cp(1-1)\n").valid);
}

TEST(Cp, DischargedLinesCannotBeCited) {
  expect_failure_at(check("1. assume p @ w0\n"
                          "2. ~~p @ w0 by dni(1)\n"
                          "3. p -> ~~p @ w0 by cp(1-2)\n"
                          "4. p @ w0 by dne(2)\n"),
                    4, "closed subproof");
}

TEST(Nec, RequiresAClosedRootPremise) {
  EXPECT_TRUE(check("1. assume p @ w0\n2. p -> p @ w0 by cp(1-1)\n3. [](p -> p) @ w0 by nec(2)\n").valid);
  expect_failure_at(check("1. assume p @ w0\n2. []p @ w0 by nec(1)\n"), 2, "open assumptions");
  expect_failure_at(check("1. assume <>p @ w0\n"
                          "2. p @ v by dia_e(1)\n"
                          "3. []p @ w0 by nec(2)\n"),
                    3, "open assumptions");
}

TEST(Mp, ImplicationAndBiconditional) {
  const char* base =
      "1. assume p -> q @ w0\n"
      "2. assume p @ w0\n";
  expect_failure_at(check(std::string(base) + "3. q @ w0 by mp(1, 2)\n"), 3, "never discharged");
  expect_failure_at(check(std::string(base) + "3. p @ w0 by mp(1, 2)\n"), 3, "mp needs");
  expect_failure_at(check("1. assume q <-> p @ w0\n2. assume p @ w0\n3. q @ w0 by mp(1, 2)\n"), 3,
                    "never discharged");
}

TEST(Subeq, RewritesInEitherDirectionAtAnyWorld) {
  expect_failure_at(check("1. assume ~[]q @ w0\n2. q @ w0 by subeq(1)\n"), 2, "never discharged");
  expect_failure_at(check("1. assume q @ w0\n2. q @ w0 by subeq(1)\n"), 2, "no definition");
}

TEST(Discharge, UndischargedAssumptionIsReported) {
  expect_failure_at(check("1. assume p @ w0\n"), 1, "never discharged");
}

TEST(Mutation, EverySingleLineMutationIsRejectedOrChangesTheConclusion) {
  ProofScript original = parse_proof_script(bundled::kLiarDerivation);
  ProofReport baseline = check_proof(original, kLiar, cls(System::T));
  ASSERT_TRUE(baseline.valid);
  auto mutants = testing::single_line_mutations(original);
  EXPECT_GE(mutants.size(), 20u);
  for (const auto& m : mutants) {
    ProofReport r = check_proof(m.script, kLiar, cls(System::T));
    bool rejected = !r.valid || !(r.conclusion->formula == baseline.conclusion->formula) ||
                    r.conclusion->world != baseline.conclusion->world;
    EXPECT_TRUE(rejected) << m.description;
  }
}

// Checking is line-local: a prefix of the valid script fails, if at all, only
// because an assumption is still open at its end.
TEST(LineLocal, PrefixesOnlyFailOnOpenAssumptions) {
  ProofScript full = parse_proof_script(bundled::kLiarDerivation);
  for (std::size_t k = 1; k <= full.lines.size(); ++k) {
    ProofScript prefix = full;
    prefix.lines.resize(k, full.lines.front());
    ProofReport r = check_proof(prefix, kLiar, cls(System::T));
    if (!r.valid) {
      EXPECT_EQ(r.first_failure->line, static_cast<int>(k));
      EXPECT_NE(r.first_failure->reason.find("never discharged"), std::string::npos);
    }
  }
}

TEST(ParseProofScript, Errors) {
  auto offset_of = [](std::string_view text) -> std::size_t {
    try {
      parse_proof_script(text);
    } catch (const ParseError& e) {
      return e.offset();
    }
    return std::string_view::npos;
  };
  EXPECT_EQ(offset_of("2. assume p @ w0\n"), 0u);
  EXPECT_EQ(offset_of("1. assume p @ w0\n1. assume p @ w0\n"), 17u);
  EXPECT_EQ(offset_of("1. assume p w0\n"), 14u);
  EXPECT_EQ(offset_of("1. p @ w0 by magic(1)\n"), 13u);
  EXPECT_EQ(offset_of("1. p @ w0 by cp(1)\n"), 16u);
  EXPECT_EQ(offset_of("system X\n"), 7u);
  EXPECT_EQ(offset_of("1. p @ 0w by dne(1)\n"), 7u);
  EXPECT_EQ(offset_of("1. p & @ w0 by dne(1)\n"), 7u);
  EXPECT_EQ(offset_of("1. assume p @ w0 extra\n"), 17u);
}

TEST(ParseProofScript, RoundTrip) {
  for (std::string_view text : {bundled::kLiarDerivation, bundled::kLiarViaNecessitation}) {
    ProofScript a = parse_proof_script(text);
    ProofScript b = parse_proof_script(print_proof_script(a));
    ASSERT_EQ(a.lines.size(), b.lines.size());
    EXPECT_EQ(a.system, b.system);
    EXPECT_EQ(a.definitions_path, b.definitions_path);
    for (std::size_t i = 0; i < a.lines.size(); ++i) EXPECT_EQ(print_proof_line(a.lines[i]), print_proof_line(b.lines[i]));
  }
}

TEST(RuleIds, NamesRoundTrip) {
  for (RuleId r : kAllRules) EXPECT_EQ(parse_rule_id(rule_name(r)), r);
  EXPECT_FALSE(parse_rule_id("modus_ponens").has_value());
}

TEST(Report, TextAndJson) {
  ProofReport ok = check(bundled::kLiarDerivation);
  std::string text = report_to_text(ok);
  EXPECT_EQ(text.rfind("valid; necessitation uses: 0\n", 0), 0u) << text;
  EXPECT_NE(text.find("conclusion: q <-> ~q @ w0"), std::string::npos);

  nlohmann::json j = report_to_json(ok);
  EXPECT_EQ(j["valid"], true);
  EXPECT_EQ(j["rules_used"]["nec"], 0);
  EXPECT_EQ(j["conclusion"]["formula"], "q <-> ~q");
  EXPECT_TRUE(j["first_failure"].is_null());

  ProofReport bad = check(bundled::kLiarDerivation, System::K);
  EXPECT_EQ(report_to_text(bad).rfind("invalid at line 4:", 0), 0u);
  EXPECT_EQ(report_to_json(bad)["first_failure"]["line"], 4);
}

}  // namespace
}  // namespace modliar
