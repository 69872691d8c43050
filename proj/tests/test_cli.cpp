#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hrsearch/cli.hpp"

using namespace hrsearch;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("hrsearch_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

TEST(Cli, SearchOutputMatchesOracle) {
  auto r = cli({"search", "--fn", "exp", "--p", "13", "--eps-bits", "8", "--binade", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::set<std::pair<std::uint64_t, std::uint64_t>> got;
  for (const auto& l : lines(r.out)) {
    auto j = nlohmann::json::parse(l);
    EXPECT_EQ(j["distance_den_log2"].get<int>(), 64);
    got.insert({std::stoull(j["arg_bits"].get<std::string>(), nullptr, 16),
                j["distance_num"].get<std::uint64_t>()});
  }
  FpFormat fmt{13, 8};
  auto f = make_exp();
  Domain whole = BinadeSplit(0, fmt, std::uint64_t{1} << 12).at(0);
  std::set<std::pair<std::uint64_t, std::uint64_t>> expect;
  for (const auto& rec : resolve_undecided(exhaustive_hr_search(*f, whole, fmt), *f, fmt)) {
    expect.insert({rec.arg_bits, rec.distance_num});
  }
  EXPECT_EQ(got, expect);
  EXPECT_FALSE(got.empty());
  // Statistics go to the error stream when no directory is given.
  EXPECT_EQ(lines(r.err).front(), "phase,domains_in,domains_out,arguments_covered,wall_ms");
}

TEST(Cli, SearchIsDeterministic) {
  std::vector<std::string> args{"search", "--fn", "exp2", "--p", "16", "--eps-bits", "8",
                                "--binade", "0", "--binade", "1", "--workers", "3"};
  auto a = cli(args), b = cli(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);
}

TEST(Cli, SearchWritesFiles) {
  auto dir = temp_dir("search");
  auto r = cli({"search", "--fn", "exp", "--p", "13", "--eps-bits", "8", "--binade", "0", "--format", "csv",
                "--out", dir.string(), "--timing"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream recs(dir / "hr_cases.csv"), stats(dir / "phase_stats.csv");
  std::string header;
  std::getline(recs, header);
  EXPECT_EQ(header, "arg_bits,distance_num,distance_den_log2,domain");
  std::getline(stats, header);
  EXPECT_EQ(header, "phase,domains_in,domains_out,arguments_covered,wall_ms");
  EXPECT_NE(r.out.find("hard-to-round cases written to"), std::string::npos);
}

TEST(Cli, OracleCheckAgreesAndDetectsFaults) {
  std::vector<std::string> args{"oracle-check", "--fn", "log", "--p", "13", "--eps-bits", "8",
                                "--binade", "1", "--algo", "lefevre", "--div-mode", "sub"};
  auto ok = cli(args);
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.out.rfind("0 differences", 0), 0u) << ok.out;
  args.push_back("--inject-fault");
  auto bad = cli(args);
  EXPECT_EQ(bad.code, kExitMismatch);
  EXPECT_EQ(bad.out.rfind("1 differences", 0), 0u) << bad.out;
  EXPECT_NE(bad.err.find("missing"), std::string::npos);
}

TEST(Cli, ConfigurationErrorsExitWithTwo) {
  const std::vector<std::vector<std::string>> cases = {
      {"search", "--fn", "exp", "--p", "13", "--eps-bits", "8", "--binade", "0", "--domain-bits", "13"},
      {"search", "--fn", "exp", "--p", "13", "--eps-bits", "8", "--binade", "0", "--phase2-split", "3"},
      {"search", "--fn", "exp", "--p", "13", "--eps-bits", "0", "--binade", "0"},
      {"search", "--fn", "sin", "--p", "13", "--eps-bits", "8", "--binade", "0"},
      {"search", "--fn", "log", "--p", "13", "--eps-bits", "8", "--binade", "0"},
      {"search", "--fn", "exp", "--p", "13", "--eps-bits", "8", "--binade", "0", "--div-mode", "fast"},
      {"search", "--fn", "poly-file", "--p", "13", "--eps-bits", "8", "--binade", "0"},
      {"search", "--p", "13"},
  };
  for (const auto& c : cases) {
    auto r = cli(c);
    EXPECT_EQ(r.code, kExitConfig) << c.back() << " " << r.err;
    EXPECT_FALSE(r.err.empty());
  }
  auto bits = cli(cases[0]);
  EXPECT_NE(bits.err.find("domain bits"), std::string::npos) << bits.err;
}

TEST(Cli, FlagAliases) {
  std::vector<std::string> base{"search", "--fn", "exp", "--p", "13", "--eps-bits", "8", "--binade", "0"};
  auto plain = cli(base);
  for (const auto& extra : std::vector<std::vector<std::string>>{
           {"--div-mode", "sub"}, {"--div-mode", "subtractive"}, {"--div-mode", "hw"},
           {"--div-mode", "hardware"}, {"--algo", "lefevre-swap"}, {"--algo", "regular-unrolled"},
           {"--workers", "2", "--phase2-split", "4"}, {"--word-bits", "32"}}) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    auto r = cli(args);
    EXPECT_EQ(r.code, 0) << extra[0] << " " << extra[1] << ": " << r.err;
    EXPECT_EQ(r.out, plain.out) << extra[0] << " " << extra[1];
  }
}

TEST(Cli, AutoChoiceIsLogged) {
  auto r = cli({"search", "--fn", "exp", "--p", "16", "--eps-bits", "8", "--binade", "0", "--algo", "auto"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto first = r.err.find("binade 0 interval 0: regular");
  EXPECT_NE(first, std::string::npos) << r.err;
}

TEST(Cli, PolynomialFile) {
  auto dir = temp_dir("poly");
  {
    std::ofstream f(dir / "p.txt");
    f << "# 1 + x/2 + x^2/8\n1\n0.5\n\n0.125\n";
  }
  auto r = cli({"oracle-check", "--fn", "poly-file", "--poly", (dir / "p.txt").string(), "--p",
                "13", "--eps-bits", "6", "--binade", "0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("0 differences", 0), 0u) << r.out;
}

TEST(Cli, DivergenceSingleWarp) {
  auto dir = temp_dir("div");
  auto r = cli({"divergence", "--fn", "exp", "--p", "13", "--eps-bits", "8", "--binade", "0", "--domains", "32",
                "--warp-size", "32", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto summary = lines(r.out);
  ASSERT_EQ(summary.size(), 6u);
  EXPECT_EQ(summary[0].rfind("algorithm,warps,lanes", 0), 0u);
  std::ifstream warps(dir / "warps_regular.csv");
  std::string header, row, none;
  std::getline(warps, header);
  EXPECT_EQ(header, "warp_id,max_iter,mean_iter,mdm,nmdm");
  ASSERT_TRUE(std::getline(warps, row));
  EXPECT_EQ(row.rfind("0,", 0), 0u);
  EXPECT_FALSE(std::getline(warps, none));
  EXPECT_TRUE(std::filesystem::exists(dir / "divergence_summary.csv"));
}

TEST(Cli, DumpCoefficients) {
  auto r = cli({"dump-coeffs", "--fn", "exp", "--p", "13", "--eps-bits", "8", "--binade", "0", "--interval", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_GT(ls.size(), 1u);
  EXPECT_EQ(ls[0].rfind("# binade 0 interval 0", 0), 0u);
  auto bad = cli({"dump-coeffs", "--fn", "exp", "--p", "13", "--eps-bits", "8", "--binade", "0", "--interval",
                  "100000"});
  EXPECT_EQ(bad.code, kExitConfig);
}

TEST(Cli, HelpAndMissingSubcommand) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({}).code, kExitConfig);
}

}  // namespace
