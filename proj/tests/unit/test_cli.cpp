#include "nsring/bounds.hpp"
#include "nsring/lp.hpp"
#include "nsring/nonsignal_lp.hpp"
#include "nsring/ring_model.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace nsring;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(NSRING_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nsring-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, Count) {
  const auto r = run("count --l 11");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "a = 2046\nb = 4098\n");
  EXPECT_EQ(run("count --l 4").out, "a = 18\nb = 30\n");
}

TEST_F(Cli, UniformProb) {
  EXPECT_EQ(run("uniform-prob --n 4 --d 2").out, "P = 2/3 (0.666666666667)\n");
  EXPECT_EQ(run("uniform-prob --n 4 --d 9").status, 2);
}

TEST_F(Cli, Bound) {
  EXPECT_EQ(run("bound --q 11/15 --k 9 --r 1 --n 20").out, "(11/15)^2 = 121/225 (0.537777777778)\n");
  const auto big = run("bound --q 1382/1383 --k 15 --r 1 --n 100");
  EXPECT_EQ(big.status, 0);
  std::ostringstream expect;
  const Rational q = pow(Rational(1382, 1383), 6);
  expect << "(1382/1383)^6 = " << to_string(q) << " (" << to_decimal(q) << ")\n";
  EXPECT_EQ(big.out, expect.str());
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("bound --q 0.5 --k 9 --r 1 --n 20").status, 2);
  EXPECT_EQ(run("no-such-command").status, 2);
  EXPECT_EQ(run("count").status, 2);
  EXPECT_EQ(run("beta --ring 9 --segment 5").status, 2);
}

TEST_F(Cli, Experiments11) {
  const auto r = run("experiments11");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out,
            "proper colorings = 2046\n"
            "min bias = 1/451 (0.002217294900)\n"
            "every coloring >= 1/451: yes\n"
            "bias of 01201201201 = 13/451 (0.028824833703)\n");
}

TEST_F(Cli, N4Scan) {
  EXPECT_EQ(run("n4-scan --grid 3").out,
            "grid points = 10\n"
            "points with a negative forced probability = 10\n"
            "worst min q = -1/18 (-0.055555555556) at (1/3, 1/3, 1/3)\n");
}

TEST_F(Cli, BetaMatchesLibrary) {
  ASSERT_EQ(run("beta --ring 9 --proper-only --out " + path("b.csv")).status, 0);
  std::ostringstream lib;
  write_beta_csv(lib, distinct_beta_set_ring(9, true));
  EXPECT_EQ(slurp(path("b.csv")), lib.str());
  ASSERT_EQ(run("beta --segment 5 --out " + path("s.csv")).status, 0);
  std::ostringstream seg;
  write_beta_csv(seg, distinct_beta_set_segment(5, false));
  EXPECT_EQ(slurp(path("s.csv")), seg.str());
}

TEST_F(Cli, RingLpWritesLibraryLpAndVerifiableCertificate) {
  const auto r = run("ring-lp --n 7 --r 1 --color-sym --out " + path("lp.json") + " --cert " + path("cert.json"));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("optimum = 1/1 (1.000000000000)\n", 0), 0u);
  EXPECT_NE(r.out.find("certificate: verified"), std::string::npos);
  std::ostringstream lib;
  write_lp_json(lib, build_ring_lp(7, 1, true, true).lp);
  EXPECT_EQ(slurp(path("lp.json")), lib.str());

  const auto ok = run("verify --lp " + path("lp.json") + " --cert " + path("cert.json"));
  EXPECT_EQ(ok.status, 0);
  EXPECT_EQ(ok.out.rfind("certificate accepted", 0), 0u);

  auto cert = nlohmann::json::parse(slurp(path("cert.json")));
  cert["objective"] = "2/3";
  std::ofstream(path("bad.json")) << cert.dump();
  const auto bad = run("verify --lp " + path("lp.json") + " --cert " + path("bad.json"));
  EXPECT_EQ(bad.status, 1);
  EXPECT_EQ(bad.out.rfind("certificate rejected", 0), 0u);

  auto neg = nlohmann::json::parse(slurp(path("cert.json")));
  neg["primal"][0][1] = "-" + neg["primal"][0][1].get<std::string>();
  std::ofstream(path("neg.json")) << neg.dump();
  const auto n = run("verify --lp " + path("lp.json") + " --cert " + path("neg.json"));
  EXPECT_EQ(n.status, 1);
  EXPECT_NE(n.out.find("negative"), std::string::npos);
}

TEST_F(Cli, SegmentLpSmall) {
  const auto r = run("segment-lp --k 5 --r 1 --color-sym");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("optimum = 1/1 (1.000000000000)\n", 0), 0u);
}

TEST_F(Cli, DumpConstraintsMatchesLibrary) {
  const auto r = run("ring-lp --n 5 --r 1 --dump-constraints");
  ASSERT_EQ(r.status, 0);
  std::ostringstream lib;
  dump_constraints(lib, Context::ring(5), 1, {});
  EXPECT_EQ(r.out, lib.str());
}

TEST_F(Cli, BiasLpAndGamma) {
  const auto r = run("bias-lp --ring 11 --out " + path("w.json"));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("delta = 1/451 (0.002217294900)\n", 0), 0u);
  std::ostringstream lib;
  write_witness_json(lib, bias_lp_ring(11).witness);
  EXPECT_EQ(slurp(path("w.json")), lib.str());
  const auto g = run("gamma --witness " + path("w.json"));
  EXPECT_EQ(g.status, 0);
  EXPECT_NE(g.out.find("gamma = 244/451"), std::string::npos);
  EXPECT_NE(g.out.find("success_upper = 244/245"), std::string::npos);

  // A hand-edited witness whose claimed delta exceeds its real bias fails.
  auto w = nlohmann::json::parse(slurp(path("w.json")));
  w["delta"] = "1/100";
  std::ofstream(path("big.json")) << w.dump();
  EXPECT_EQ(run("gamma --witness " + path("big.json")).status, 1);
}

TEST_F(Cli, Figures) {
  ASSERT_EQ(run("figures --which 5 --n 11 --out " + dir_.string()).status, 0);
  EXPECT_EQ(slurp(path("witness-n11.csv")),
            "d,p,p_float,p_prime,p_prime_float\n"
            "2,30/41,0.731707317073171,0/1,0.000000000000000\n"
            "3,11/41,0.268292682926829,0/1,0.000000000000000\n"
            "4,0/1,0.000000000000000,14/41,0.341463414634146\n"
            "5,0/1,0.000000000000000,27/41,0.658536585365854\n");
  ASSERT_EQ(run("figures --which 4 --n-max 12 --out " + dir_.string()).status, 0);
  EXPECT_EQ(slurp(path("bias-vs-n.csv")),
            "n,delta,delta_float,epsilon_lower,epsilon_lower_float\n"
            "11,1/451,0.002217294900222,1/245,0.004081632653061\n"
            "12,0/1,0.000000000000000,0/1,0.000000000000000\n");
}

TEST_F(Cli, QsimRoundTripAndThreadInvariance) {
  const auto a = run("--threads 1 qsim --n 4 --r 1 --w 1 --m 1 --seed 3 --check-independence --write-spec " +
                     path("s.json") + " --out " + path("a.csv"));
  ASSERT_EQ(a.status, 0);
  EXPECT_NE(a.out.find("cyclic: yes"), std::string::npos);
  EXPECT_NE(a.out.find(": pass"), std::string::npos);
  const auto b = run("qsim --spec " + path("s.json") + " --check-independence --threads 8 --out " + path("b.csv"));
  ASSERT_EQ(b.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.csv")).rfind("coloring,probability\n", 0), 0u);
}

TEST_F(Cli, OutputIsStableAcrossThreadCounts) {
  for (const std::string args : {"n4-scan --grid 50", "bias-lp --ring 13", "experiments11", "beta --ring 12"}) {
    const auto one = run("--threads 1 " + args);
    const auto many = run("--threads 8 " + args);
    EXPECT_EQ(one.status, 0) << args;
    EXPECT_EQ(one.out, many.out) << args;
    EXPECT_EQ(one.out, run("--threads 1 " + args).out) << args;
  }
}

TEST_F(Cli, CacheDirectoryIsUsed) {
  const std::string env = "NONSIGNAL_CACHE_DIR=" + dir_.string() + " ";
  const std::string cmd = "env " + env + NSRING_CLI + " bias-lp --ring 11 >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "beta-ring-11-proper.csv"));
  std::ostringstream lib;
  write_beta_csv(lib, distinct_beta_set_ring(11, true));
  EXPECT_EQ(slurp(dir_ / "beta-ring-11-proper.csv"), lib.str());
  ASSERT_EQ(std::system(cmd.c_str()), 0);
}
