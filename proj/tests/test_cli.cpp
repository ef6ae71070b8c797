#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace modliar::cli {
namespace {

namespace fs = std::filesystem;

const std::string kAssets = MODLIAR_ASSET_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "modliar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name, const std::string& content) {
  fs::path dir = fs::temp_directory_path() / "modliar_cli_tests";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

TEST(Cli, SatLiarInTIsUnsat) {
  Result r = invoke({"sat", "--defs", kAssets + "/liar.mod", "--system", "T"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "UNSAT\n");
}

TEST(Cli, SystemDefaultsToT) {
  EXPECT_EQ(invoke({"sat", "--defs", kAssets + "/liar.mod"}).out, "UNSAT\n");
}

TEST(Cli, SatLiarInKPrintsDot) {
  Result r = invoke({"sat", "--defs", kAssets + "/liar.mod", "--system", "K", "--format", "dot"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out.rfind("SAT\ndigraph kripke {\n", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("doublecircle"), std::string::npos);
}

TEST(Cli, SatJson) {
  Result r = invoke({"sat", "--defs", kAssets + "/liar.mod", "--system", "D", "--format", "json"});
  ASSERT_EQ(r.code, kOk);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"], "SAT");
  EXPECT_EQ(j["model"]["worlds"], 2);
  EXPECT_EQ(j["designated"], 0);
}

TEST(Cli, ResourceCapExitsIndeterminate) {
  Result r = invoke({"sat", "--defs", kAssets + "/liar.mod", "--max-prefixes", "1"});
  EXPECT_EQ(r.code, kIndeterminate);
  EXPECT_EQ(r.out, "INDETERMINATE\n");
}

TEST(Cli, ValidPostEntailmentQueries) {
  Result t = invoke({"valid", "--defs", kAssets + "/post_footnote3.mod", "--system", "T", "--query",
                     "(p -> ~p) -> []~p"});
  EXPECT_EQ(t.code, kNegative);
  EXPECT_EQ(t.out.rfind("not valid\ncountermodel:\n", 0), 0u) << t.out;

  Result k = invoke({"valid", "--defs", kAssets + "/post_footnote3.mod", "--system", "K", "--query",
                     "[]((p -> ~p) -> ~p)"});
  EXPECT_EQ(k.code, kOk);
  EXPECT_EQ(k.out, "valid\n");
}

TEST(Cli, ValidJson) {
  Result r = invoke({"valid", "--system", "K", "--query", "[]q -> q", "--format", "json"});
  EXPECT_EQ(r.code, kNegative);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["valid"], false);
  EXPECT_TRUE(j["countermodel"].is_object());
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(invoke({}).code, kInputError);
  EXPECT_EQ(invoke({"valid"}).code, kInputError);
  EXPECT_EQ(invoke({"sat", "--system", "S3"}).code, kInputError);
  EXPECT_EQ(invoke({"sat", "--format", "svg"}).code, kInputError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kInputError);

  Result bad_query = invoke({"valid", "--query", "p &"});
  EXPECT_EQ(bad_query.code, kInputError);
  EXPECT_NE(bad_query.err.find("error: query"), std::string::npos) << bad_query.err;

  Result missing = invoke({"sat", "--defs", "/nonexistent/liar.mod"});
  EXPECT_EQ(missing.code, kInputError);
  EXPECT_NE(missing.err.find("cannot read"), std::string::npos);

  fs::path dup = scratch("dup.mod", "def a := p\ndef a := q\n");
  EXPECT_EQ(invoke({"sat", "--defs", dup.string()}).code, kInputError);
}

TEST(Cli, HelpExitsZero) {
  Result r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("paradox"), std::string::npos);
  EXPECT_NE(r.out.find("census"), std::string::npos);
}

TEST(Cli, CheckModel) {
  fs::path chain = scratch("chain.json", R"({"worlds": 2, "access": [[0, 1]], "valuation": {"0": ["q"]}})");
  Result ok = invoke({"check-model", chain.string(), "--defs", kAssets + "/liar.mod", "--system", "K", "--query",
                      "q <-> ~[]q", "--world", "1"});
  EXPECT_EQ(ok.code, kOk);
  EXPECT_EQ(ok.out,
            "holds at world 1: true\n"
            "respects definitions: true\n"
            "frame properties: transitive\n"
            "in K: true\n");

  fs::path point = scratch("point.json", R"({"worlds": 1, "access": [[0, 0]], "valuation": {"0": ["q"]}})");
  Result bad = invoke({"check-model", point.string(), "--defs", kAssets + "/liar.mod", "--format", "json"});
  EXPECT_EQ(bad.code, kNegative);
  auto j = nlohmann::json::parse(bad.out);
  EXPECT_EQ(j["respects_definitions"], false);
  EXPECT_EQ(j["frame_properties"].size(), 4u);

  EXPECT_EQ(invoke({"check-model", chain.string(), "--world", "5"}).code, kInputError);
  fs::path broken = scratch("broken.json", "{\"worlds\": ");
  EXPECT_EQ(invoke({"check-model", broken.string()}).code, kInputError);
}

TEST(Cli, ProveLiarDerivation) {
  Result r = invoke({"prove", kAssets + "/paper_derivation.prf"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out.rfind("valid; necessitation uses: 0\n", 0), 0u) << r.out;

  Result k = invoke({"prove", kAssets + "/paper_derivation.prf", "--system", "K"});
  EXPECT_EQ(k.code, kNegative);
  EXPECT_EQ(k.out.rfind("invalid at line 4:", 0), 0u) << k.out;

  Result nec = invoke({"prove", kAssets + "/liar_via_necessitation.prf", "--format", "json"});
  EXPECT_EQ(nec.code, kOk);
  EXPECT_EQ(nlohmann::json::parse(nec.out)["rules_used"]["nec"], 1);
}

TEST(Cli, ProveErrors) {
  EXPECT_EQ(invoke({"prove", "/nonexistent.prf"}).code, kInputError);
  fs::path bad = scratch("bad.prf", "1. assume p @\n");
  EXPECT_EQ(invoke({"prove", bad.string()}).code, kInputError);
  fs::path no_defs = scratch("no_defs.prf", "use missing.mod\n1. assume p @ w0\n2. p -> p @ w0 by cp(1-1)\n");
  EXPECT_EQ(invoke({"prove", no_defs.string()}).code, kInputError);
  EXPECT_EQ(invoke({"prove", no_defs.string(), "--defs", kAssets + "/liar.mod"}).code, kOk);
}

TEST(Cli, Census) {
  Result r = invoke({"census", "--defs", kAssets + "/liar.mod", "--system", "K", "--system", "T", "--bound", "3"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("K      yes"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("T      no (<= 3)"), std::string::npos) << r.out;

  Result j = invoke({"census", "--defs", kAssets + "/liar.mod", "--format", "json", "--bound", "2"});
  EXPECT_EQ(nlohmann::json::parse(j.out).size(), 7u);
  EXPECT_EQ(invoke({"census", "--bound", "9"}).code, kInputError);
}

TEST(Cli, Paradox) {
  Result r = invoke({"paradox"});
  EXPECT_EQ(r.code, kOk) << r.out;
  EXPECT_EQ(r.out.find("[FAIL]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("all checks agree"), std::string::npos);

  auto j = nlohmann::json::parse(invoke({"paradox", "--format", "json"}).out);
  EXPECT_EQ(j["agrees"], true);
  EXPECT_EQ(j["checks"].size(), 14u);
}

TEST(Cli, OutWritesToFile) {
  fs::path target = fs::temp_directory_path() / "modliar_cli_tests" / "verdict.json";
  fs::create_directories(target.parent_path());
  fs::remove(target);
  Result r = invoke({"sat", "--defs", kAssets + "/liar.mod", "--system", "K", "--format", "json", "--out",
                     target.string()});
  EXPECT_EQ(r.code, kOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(target);
  EXPECT_EQ(nlohmann::json::parse(in)["verdict"], "SAT");
}

TEST(Cli, OutputIsDeterministic) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"sat", "--defs", kAssets + "/liar.mod", "--system", "D", "--format", "json"},
        std::vector<std::string>{"census", "--defs", kAssets + "/liar.mod", "--bound", "2", "--format", "json"},
        std::vector<std::string>{"valid", "--query", "(p -> ~p) -> []~p", "--format", "dot"}}) {
    Result a = invoke(args);
    Result b = invoke(args);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out);
  }
}

}  // namespace
}  // namespace modliar::cli
