#include "support.hpp"

#include "ztl/cli.hpp"
#include "ztl/error.hpp"
#include "ztl/spec_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ztl;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempSpec {
 public:
  explicit TempSpec(const std::string& text) {
    path_ = fs::temp_directory_path() / ("ztl_cli_" + std::to_string(counter_++) + "_" + std::to_string(::getpid()) + ".json");
    std::ofstream(path_) << text;
  }
  ~TempSpec() { fs::remove(path_); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

std::string example_arg(int k) { return fixtures::example_path(k); }

}  // namespace

TEST(SystemFiles, RoundTrip) {
  for (int k = 1; k <= 3; ++k) {
    SystemSpec a = load_spec(example_arg(k));
    SystemSpec b = parse_spec(serialize(a));
    EXPECT_EQ(a, b);
    EXPECT_EQ(serialize(a), serialize(b));
    System sa = build_system(a), sb = build_system(b);
    EXPECT_EQ(sa.phi.values, sb.phi.values);
    EXPECT_EQ(sa.psi.values, sb.psi.values);
  }
  SystemSpec s;
  s.alphabet = {"x", "y"};
  s.phi = {{"xy", "-5/3"}, {"yx", "0.125"}, {"xx", "7"}};
  s.psi = {{"xy", 0.1}};
  SystemSpec t = parse_spec(serialize(s));
  EXPECT_EQ(s, t);
  EXPECT_EQ(build_system(t).phi.values[*build_system(t).graph.arrow_index(1, 0)], Rational(1, 8));
}

TEST(SystemFiles, MultiCharacterSymbols) {
  SystemSpec s = parse_spec(R"({"alphabet": ["s0", "s1"], "phi": {"s0.s1": "-1", "s1.s0": "0", "s0.s0": "0"}})");
  System sys = build_system(s);
  EXPECT_EQ(sys.graph.arrow_count(), 3u);
  EXPECT_EQ(split_word(s.alphabet, "s1 s0"), (Word{1, 0}));
}

TEST(SystemFiles, ErrorsNameTheKey) {
  auto message = [](const std::string& text) {
    try {
      build_system(parse_spec(text));
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(R"({"alphabet": ["a"], "phi": {"aa": "1/0"}})").find("aa"), std::string::npos);
  EXPECT_NE(message(R"({"alphabet": ["a"], "phi": {"aa": "0"}, "extra": 1})").find("extra"), std::string::npos);
  EXPECT_NE(message(R"({"alphabet": ["a"], "phi": {"aa": "0"}, "psi": {"ab": 0.5}})").find("ab"), std::string::npos);
  EXPECT_NE(message(R"({"alphabet": ["a", "b"], "phi": {"aab": "0"}})").find("aab"), std::string::npos);
}

TEST(Cli, AnalyzeFirstExample) {
  auto r = run({"analyze", example_arg(1)});
  EXPECT_EQ(r.code, exit_ok) << r.err;
  EXPECT_NE(r.out.find("phi_bar"), std::string::npos);
  auto j = run({"analyze", example_arg(1), "--json"});
  ASSERT_EQ(j.code, exit_ok);
  auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc["phi_bar"], "0");
  EXPECT_EQ(doc["phi_g"], "-1");
  EXPECT_EQ(doc["n_heavy"], 3);
  int heavy = 0;
  for (const auto& c : doc["xbar_components"]) heavy += c["heavy"].get<bool>() ? 1 : 0;
  EXPECT_EQ(heavy, 3);
}

TEST(Cli, LimitExamples) {
  auto r1 = run({"limit", example_arg(1)});
  ASSERT_EQ(r1.code, exit_ok) << r1.err;
  EXPECT_NE(r1.out.find("= 1/2"), std::string::npos);

  auto j1 = nlohmann::json::parse(run({"limit", example_arg(1), "--json"}).out);
  std::vector<double> alpha;
  for (const auto& a : j1["alpha"]) alpha.push_back(a["alpha"]);
  EXPECT_EQ(alpha.size(), 3u);
  EXPECT_NEAR(alpha[0], 0.5, 1e-12);
  EXPECT_NEAR(alpha[1], 0.5, 1e-12);
  EXPECT_EQ(alpha[2], 0.0);

  auto j3 = nlohmann::json::parse(run({"limit", example_arg(3), "--json"}).out);
  EXPECT_EQ(j3["ladder"].size(), 3u);
  std::vector<double> want{1.0 / 6, 1.0 / 6, 1.0 / 6, 0.25, 0.25};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(j3["alpha"][i]["alpha"].get<double>(), want[i], 1e-10);

  auto r2 = run({"limit", example_arg(2)});
  for (const char* x : {"0.273237", "0.374089", "0.079437"}) EXPECT_NE(r2.out.find(x), std::string::npos) << x;
}

TEST(Cli, TableCsv) {
  auto r = run({"table", example_arg(2), "--betas", "log2:1..6", "--csv", "-"});
  ASSERT_EQ(r.code, exit_ok) << r.err;
  std::istringstream in(r.out);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 8u);
  EXPECT_EQ(lines[0], "beta,a,b,c,d");
  EXPECT_EQ(lines[7].rfind("limit,", 0), 0u);
  std::istringstream row(lines[6]);
  std::vector<double> cells;
  for (std::string cell; std::getline(row, cell, ',');) cells.push_back(std::stod(cell));
  EXPECT_NEAR(cells[0], 6 * std::log(2.0), 1e-15);
  EXPECT_NEAR(cells[3], 0.372988, 5e-7);

  auto z = run({"table", example_arg(1), "--betas", "0"});
  ASSERT_EQ(z.code, exit_ok);
  EXPECT_NE(z.out.find("0.333333"), std::string::npos);

  auto csv = fs::temp_directory_path() / ("ztl_cli_table_" + std::to_string(::getpid()) + ".csv");
  ASSERT_EQ(run({"table", example_arg(1), "--betas", "1,2", "--cylinders", "a,ab", "--csv", csv.string()}).code, exit_ok);
  std::ifstream f(csv);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "beta,a,ab");
  fs::remove(csv);
}

TEST(Cli, ParseBetas) {
  auto b = parse_betas("log2:1..3");
  ASSERT_EQ(b.size(), 3u);
  EXPECT_DOUBLE_EQ(b[2], 3 * std::log(2.0));
  EXPECT_EQ(parse_betas("0.5,1,2"), (std::vector<double>{0.5, 1, 2}));
  EXPECT_THROW(parse_betas("x"), Error);
}

TEST(Cli, Fractions) {
  EXPECT_EQ(as_fraction(0.5), "1/2");
  EXPECT_EQ(as_fraction(1.0 / 6), "1/6");
  EXPECT_EQ(as_fraction(0.0), "0");
  EXPECT_EQ(as_fraction(0.273237), "");
}

TEST(Cli, Determinism) {
  for (const auto& cmd : std::vector<std::vector<std::string>>{{"limit", example_arg(3), "--json"},
                                                               {"analyze", example_arg(2), "--json"},
                                                               {"table", example_arg(3), "--csv", "-"}}) {
    auto a = run(cmd), b = run(cmd);
    EXPECT_EQ(a.code, exit_ok);
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, ExitCodes) {
  TempSpec dag(R"({"alphabet": ["a", "b"], "phi": {"ab": "0"}})");
  auto r = run({"analyze", dag.str()});
  EXPECT_EQ(r.code, exit_no_circuit);
  EXPECT_NE(r.err.find("no circuit"), std::string::npos);

  TempSpec bad(R"({"alphabet": ["a", "b"], "phi": {"ab": "1/0", "ba": "0"}})");
  r = run({"analyze", bad.str()});
  EXPECT_EQ(r.code, exit_parse);
  EXPECT_NE(r.err.find("ab"), std::string::npos);

  TempSpec reducible(R"({"alphabet": ["a", "b"], "phi": {"aa": "0", "bb": "0"}})");
  EXPECT_EQ(run({"limit", reducible.str()}).code, exit_irreducibility);

  EXPECT_EQ(run({"limit", "/nonexistent/spec.json"}).code, exit_parse);
  EXPECT_NE(run({"frobnicate"}).code, exit_ok);
}

TEST(Cli, CheckPassesOnBundledExamples) {
  for (int k = 1; k <= 3; ++k) {
    auto r = run({"check", example_arg(k)});
    EXPECT_EQ(r.code, exit_ok) << "example " << k << "\n" << r.out << r.err;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  }
}

TEST(Cli, CheckCatchesPermutedWeights) {
  auto r = run({"check", example_arg(2), "--permute-alpha"});
  EXPECT_EQ(r.code, exit_property);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}
