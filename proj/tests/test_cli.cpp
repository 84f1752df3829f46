#include "oml/adversary.hpp"
#include "oml/instance_io.hpp"
#include "oml/run_config.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace oml;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result omlab(const std::string& args) {
  const std::string cmd = std::string(OMLAB_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("omlab_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(Cli, ConstructSymmetricCounts) {
  ASSERT_EQ(omlab("construct --mode symmetric --k 3 --out " + path("s.json")).code, 0);
  const Instance inst = read_instance(path("s.json"));
  EXPECT_EQ(inst.servers.size(), 8u);
  EXPECT_EQ(inst.requests.size(), 7u);
}

TEST_F(Cli, ConstructAdaptiveGreedyLedger) {
  ASSERT_EQ(omlab("construct --mode adaptive --algo greedy --k 3 --eps 1/1048576 --out " + path("a.json")).code, 0);
  const GapLedger ledger = ledger_from_json(read_instance(path("a.json")).meta.at("ledger"));
  ASSERT_EQ(ledger.levels.size(), 3u);
  for (const auto& x : ledger.x()) EXPECT_LE(abs_diff(x, Rational(2)), 2 * ledger.eps);
}

TEST_F(Cli, ConstantRightWritesWitnessAndExitsThree) {
  EXPECT_EQ(omlab("construct --mode adaptive --algo const:right --k 3 --out " + path("w.json")).code, 3);
  const auto j = nlohmann::json::parse(slurp(path("w.json")));
  EXPECT_EQ(j.at("level"), 1);
  EXPECT_EQ(j.at("side"), "right");
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(omlab("construct --algo oracle").code, 2);
  EXPECT_EQ(omlab("construct --eps 1/0").code, 2);
  EXPECT_EQ(omlab("verify --suite nope").code, 2);
  EXPECT_EQ(omlab("frobnicate").code, 2);
  EXPECT_EQ(omlab("construct --mode adaptive --algo harmonic").code, 2);
}

TEST_F(Cli, GreedyOnDepthOneSymmetricIsExactlyOne) {
  ASSERT_EQ(omlab("construct --mode symmetric --k 1 --eps 1/64 --out " + path("s.json")).code, 0);
  const Result r = omlab("run --algo greedy --instance " + path("s.json") + " --out " + path("r.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).at(0), "ratio 1/1 1");
}

TEST_F(Cli, WfaOnDepthTenSymmetric) {
  ASSERT_EQ(omlab("construct --mode symmetric --k 10 --eps 1/1099511627776 --out " + path("s.json")).code, 0);
  const Result r = omlab("run --algo wfa --instance " + path("s.json") + " --out " + path("r.csv"));
  ASSERT_EQ(r.code, 0);
  std::istringstream in(lines(r.out).at(0));
  std::string word, exact;
  in >> word >> exact;
  const Rational ratio = parse_rational(exact);
  const Rational closed = (Rational(10) * pow2(10) - pow2(10) + 1) / (pow2(10) - 1);
  EXPECT_LE(abs_diff(ratio, closed), pow2(10) * pow2(-40));
}

TEST_F(Cli, ContractViolationExitsFour) {
  ASSERT_EQ(omlab("construct --mode symmetric --k 2 --out " + path("s.json")).code, 0);
  EXPECT_EQ(omlab("run --algo broken --instance " + path("s.json")).code, 4);
}

TEST_F(Cli, HarmonicRunIsReproducible) {
  ASSERT_EQ(omlab("construct --mode randomized --k 4 --out " + path("h.json")).code, 0);
  for (const char* csv : {"a.csv", "b.csv"}) {
    ASSERT_EQ(omlab("run --algo harmonic --trials 10000 --seed 7 --instance " + path("h.json") + " --out " + path(csv)).code, 0);
  }
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, EmittedInstanceReplaysToRecordedRatio) {
  for (const char* args : {"--mode symmetric --algo tnet:3 --k 4", "--mode adaptive --algo biased:3/2 --k 4"}) {
    ASSERT_EQ(omlab(std::string("construct ") + args + " --out " + path("i.json")).code, 0);
    const Instance inst = read_instance(path("i.json"));
    const std::string algo = inst.meta.at("replay").at("algorithm");
    const Result r = omlab("run --algo " + algo + " --instance " + path("i.json") + " --out " + path("r.csv"));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(lines(r.out).at(0).substr(0, lines(r.out).at(0).rfind(' ')),
              "ratio " + inst.meta.at("replay").at("ratio").get<std::string>())
        << args;
  }
}

TEST_F(Cli, SingleCellSweepEqualsConstructThenRun) {
  const std::string common = "--mode adaptive --algo biased:5/4 --k 3 --eps 1/4096 --budget 4096";
  ASSERT_EQ(omlab("construct " + common + " --out " + path("i.json")).code, 0);
  ASSERT_EQ(omlab("run " + common + " --instance " + path("i.json") + " --out " + path("run.csv")).code, 0);
  ASSERT_EQ(omlab("sweep --mode adaptive --algos biased:5/4 --k-min 3 --k-max 3 --eps 1/4096 --budget 4096 --out " +
                  path("sweep.csv"))
                .code,
            0);
  EXPECT_EQ(slurp(path("run.csv")), slurp(path("sweep.csv")));
}

TEST_F(Cli, AdaptiveSweepRatiosGrowWithDepth) {
  ASSERT_EQ(omlab("sweep --mode adaptive --algos greedy,wfa --k-min 2 --k-max 10 --out " + path("g.csv")).code, 0);
  const auto rows = lines(slurp(path("g.csv")));
  ASSERT_EQ(rows.size(), 19u);
  std::map<std::string, double> last;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<std::string> f;
    std::stringstream s(rows[i]);
    for (std::string cell; std::getline(s, cell, ',');) f.push_back(cell);
    ASSERT_EQ(f.back(), "ok");
    const double ratio = std::stod(f[9]);
    if (last.count(f[1])) EXPECT_GE(ratio, last[f[1]]) << rows[i];
    last[f[1]] = ratio;
  }
  EXPECT_TRUE(std::filesystem::exists(path("g.greedy.dat")));
  EXPECT_EQ(lines(slurp(path("g.wfa.dat"))).size(), 9u);
}

TEST_F(Cli, SweepAnnotatesFailedCells) {
  ASSERT_EQ(omlab("sweep --mode adaptive --algos const:left,greedy --k-min 1 --k-max 2 --out " + path("f.csv")).code, 0);
  const auto rows = lines(slurp(path("f.csv")));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NE(rows[1].find("unbounded-witness"), std::string::npos);
  EXPECT_NE(rows[3].find(",ok"), std::string::npos);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  {
    std::ofstream cfg(path("c.cfg"));
    cfg << "mode=symmetric\nk=2\neps=1/8\n";
  }
  ASSERT_EQ(omlab("construct --config " + path("c.cfg") + " --k 3 --out " + path("s.json")).code, 0);
  EXPECT_EQ(read_instance(path("s.json")).servers.size(), 8u);
}

TEST_F(Cli, OutputsAreByteIdentical) {
  ASSERT_EQ(omlab("construct --mode adaptive --algo greedy --k 4 --out " + path("a.json")).code, 0);
  ASSERT_EQ(omlab("construct --mode adaptive --algo greedy --k 4 --out " + path("b.json")).code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, VerifySuites) {
  const Result pm = omlab("verify --suite prefix-mass");
  EXPECT_EQ(pm.code, 0);
  EXPECT_NE(pm.out.find("PASS prefix-mass cases=10000 failures=0"), std::string::npos);
  const Result hs = omlab("verify --suite harmonic-symmetry");
  EXPECT_EQ(hs.code, 0);
  EXPECT_NE(hs.out.find("cases=8"), std::string::npos);
  EXPECT_EQ(omlab("verify --suite offline-oracle").code, 0);
}
