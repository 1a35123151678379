#include "nsring/qsim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace nsring;
using namespace nsring::qsim;

namespace {

ProtocolSpec random_spec(int n, int r, int w, int m, std::uint64_t seed) {
  ProtocolSpec s;
  s.n = n;
  s.r = r;
  s.w = w;
  s.m = m;
  s.unitary = random_unitary(s.local_dimension(), seed);
  for (std::size_t i = 0; i < s.local_dimension(); ++i) s.color_map.push_back(static_cast<int>(i % 3));
  return s;
}

std::vector<Complex> identity(std::size_t dim) {
  std::vector<Complex> u(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) u[i * dim + i] = 1;
  return u;
}

// Oracle: dense matrices. The global operator for a round is V * (U x ... x U)
// with V permuting node tuples (workspace_v, message_v).
std::vector<double> dense_oracle(const ProtocolSpec& s) {
  const std::size_t dim = s.local_dimension();
  const std::size_t total = static_cast<std::size_t>(std::pow(dim, s.n));
  auto split = [&](std::size_t idx) {
    std::vector<std::size_t> locals(static_cast<std::size_t>(s.n));
    for (int v = s.n - 1; v >= 0; --v) {
      locals[static_cast<std::size_t>(v)] = idx % dim;
      idx /= dim;
    }
    return locals;
  };
  auto join = [&](const std::vector<std::size_t>& locals) {
    std::size_t idx = 0;
    for (auto l : locals) idx = idx * dim + l;
    return idx;
  };
  std::vector<Complex> full(total * total);
  for (std::size_t a = 0; a < total; ++a)
    for (std::size_t b = 0; b < total; ++b) {
      const auto la = split(a), lb = split(b);
      Complex prod = 1;
      for (std::size_t v = 0; v < la.size(); ++v) prod *= s.unitary[la[v] * dim + lb[v]];
      full[a * total + b] = prod;
    }
  std::vector<Complex> psi(total);
  psi[0] = 1;
  const std::size_t msg_dim = std::size_t{1} << s.m;
  for (int round = 0; round < s.r; ++round) {
    std::vector<Complex> next(total);
    for (std::size_t a = 0; a < total; ++a)
      for (std::size_t b = 0; b < total; ++b) next[a] += full[a * total + b] * psi[b];
    std::vector<Complex> shifted(total);
    for (std::size_t a = 0; a < total; ++a) {
      const auto l = split(a);
      std::vector<std::size_t> out(l.size());
      for (std::size_t v = 0; v < l.size(); ++v) {
        const std::size_t prev = (v + l.size() - 1) % l.size();
        out[v] = (l[v] / msg_dim) * msg_dim + l[prev] % msg_dim;
      }
      shifted[join(out)] += next[a];
    }
    psi = shifted;
  }
  std::vector<double> dist(pow3(s.n));
  for (std::size_t a = 0; a < total; ++a) {
    std::uint64_t word = 0;
    for (auto l : split(a)) word = word * 3 + static_cast<std::uint64_t>(s.color_map[l]);
    dist[word] += std::norm(psi[a]);
  }
  return dist;
}

}  // namespace

TEST(Unitary, RandomIsUnitaryAndSeeded) {
  for (std::size_t dim : {2u, 4u, 8u, 16u}) {
    const auto u = random_unitary(dim, 42);
    EXPECT_LT(unitarity_error(u, dim), 1e-13);
    EXPECT_EQ(u, random_unitary(dim, 42));
    EXPECT_NE(u, random_unitary(dim, 43));
  }
}

TEST(Spec, ValidationRejectsBadInput) {
  auto s = random_spec(3, 1, 1, 1, 1);
  EXPECT_NO_THROW(s.validate());
  auto bad = s;
  bad.unitary[0] *= 2.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = s;
  bad.color_map[1] = 3;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = s;
  bad.color_map.pop_back();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = random_spec(13, 1, 1, 1, 1);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Run, IdentityGivesAllZeros) {
  ProtocolSpec s;
  s.n = 4;
  s.r = 2;
  s.w = 1;
  s.m = 1;
  s.unitary = identity(4);
  s.color_map = {0, 0, 0, 0};
  const auto d = run_protocol(s);
  EXPECT_DOUBLE_EQ(d.probability("0000"), 1.0);
  EXPECT_TRUE(check_cyclicity(d, 0));
  EXPECT_EQ(check_independence(d, 1, 0).max_deviation, 0.0);
}

TEST(Run, ZeroRoundsIgnoreU) {
  auto s = random_spec(3, 0, 1, 1, 9);
  EXPECT_DOUBLE_EQ(run_protocol(s).probability("000"), 1.0);
}

TEST(Run, HadamardWorkspaceGivesProductDistribution) {
  ProtocolSpec s;
  s.n = 3;
  s.r = 1;
  s.w = 2;
  s.m = 0;
  s.unitary.assign(16, Complex(0.5, 0));
  // H x H: sign (-1)^{popcount(i & j)}.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (__builtin_popcount(static_cast<unsigned>(i & j)) % 2) s.unitary[static_cast<std::size_t>(i * 4 + j)] *= -1.0;
  s.color_map = {0, 1, 2, 0};
  const double single[3] = {0.5, 0.25, 0.25};
  const auto d = run_protocol(s);
  for (std::uint64_t w = 0; w < 27; ++w) {
    std::vector<Color> c(3);
    unpack_colors(w, c);
    EXPECT_NEAR(d.probabilities[w], single[c[0]] * single[c[1]] * single[c[2]], 1e-15);
  }
  EXPECT_LT(check_independence(d, 0, 1e-12).max_deviation, 1e-15);
}

TEST(Run, MatchesDenseMatrixOracle) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed)
    for (const auto& [n, r, w, m] : std::vector<std::array<int, 4>>{{3, 1, 1, 1}, {3, 2, 1, 1}, {2, 3, 1, 2}, {4, 2, 0, 1}}) {
      const auto s = random_spec(n, r, w, m, seed);
      const auto got = run_protocol(s).probabilities;
      const auto want = dense_oracle(s);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    }
}

TEST(Run, OutputIsNormalized) {
  const auto d = run_protocol(random_spec(5, 2, 1, 1, 3));
  EXPECT_NEAR(std::accumulate(d.probabilities.begin(), d.probabilities.end(), 0.0), 1.0, 1e-10);
  for (double p : d.probabilities) EXPECT_GE(p, 0.0);
}

TEST(Cyclicity, RejectsSinglePointMass) {
  OutputDistribution d;
  d.n = 3;
  d.probabilities.assign(27, 0.0);
  d.probabilities[5] = 1.0;  // 012
  EXPECT_FALSE(check_cyclicity(d, 1e-9));
}

TEST(Independence, UniformIsIndependentAtGapZero) {
  OutputDistribution d;
  d.n = 4;
  d.probabilities.assign(81, 1.0 / 81);
  EXPECT_LT(check_independence(d, 0, 1e-12).max_deviation, 1e-15);
}

TEST(Independence, RandomProtocolsAreCyclicAndIndependent) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    for (int n : {3, 4, 5})
      for (int r : {1, 2})
        for (const auto& [w, m] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}}) {
          if (n * (w + m) > 12) continue;
          const auto d = run_protocol(random_spec(n, r, w, m, seed));
          EXPECT_TRUE(check_cyclicity(d, 1e-9)) << seed << " " << n;
          const auto rep = check_independence(d, r, 1e-9);
          EXPECT_TRUE(rep.passed) << "seed=" << seed << " n=" << n << " r=" << r << " dev=" << rep.max_deviation;
        }
}

TEST(Independence, SignalingControlIsDetected) {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto d = run_protocol(random_spec(5, 2, 1, 1, seed));
    worst = std::max(worst, check_independence(d, 1, 1e-9).max_deviation);
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(Json, ProtocolRoundTrip) {
  const auto s = random_spec(3, 1, 1, 1, 5);
  std::stringstream ss;
  write_protocol_json(ss, s);
  EXPECT_EQ(ss.str().rfind("{\"n\":3,\"r\":1,\"w\":1,\"m\":1,\"U\":[[", 0), 0u);
  const auto back = read_protocol_json(ss);
  EXPECT_EQ(back.unitary, s.unitary);
  EXPECT_EQ(back.color_map, s.color_map);
  EXPECT_EQ(back.n, 3);
}

TEST(Csv, HeaderAndRows) {
  OutputDistribution d;
  d.n = 2;
  d.probabilities.assign(9, 0.0);
  d.probabilities[1] = 0.25;
  d.probabilities[3] = 0.75;
  std::ostringstream out;
  write_distribution_csv(out, d);
  EXPECT_EQ(out.str(), "coloring,probability\n01,0.25\n10,0.75\n");
}
