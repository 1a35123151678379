#include "nsring/lp.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>

using namespace nsring;

namespace {

Rational frac(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

// Dense rational Gaussian elimination; returns the rank.
std::size_t rank_of(std::vector<std::vector<Rational>> a) {
  std::size_t rank = 0;
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
    std::size_t piv = rank;
    while (piv < a.size() && sgn(a[piv][c]) == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == rank || sgn(a[r][c]) == 0) continue;
      const Rational f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

std::vector<std::vector<Rational>> dense(const RationalLP& lp) {
  std::vector<std::vector<Rational>> a(lp.num_rows(), std::vector<Rational>(lp.num_variables()));
  for (std::size_t r = 0; r < lp.num_rows(); ++r)
    for (const auto& t : lp.rows[r].terms) a[r][t.index] = t.value();
  return a;
}

// Solves the square system M x = v, or nothing if singular.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> m, std::vector<Rational> v) {
  const std::size_t n = m.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && sgn(m[piv][c]) == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[c]);
    std::swap(v[piv], v[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(m[r][c]) == 0) continue;
      const Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      v[r] -= f * v[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) v[i] /= m[i][i];
  return v;
}

// Oracle: best basic feasible solution over every column subset, for a
// full-row-rank LP with a bounded feasible region.
std::optional<Rational> vertex_oracle(const RationalLP& lp) {
  const auto a = dense(lp);
  const std::size_t m = lp.num_rows(), n = lp.num_variables();
  std::vector<Rational> c(n);
  for (const auto& t : lp.objective) c[t.index] = t.value();
  std::optional<Rational> best;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), true);
  std::vector<Rational> b(m);
  for (std::size_t r = 0; r < m; ++r) b[r] = lp.rows[r].rhs;
  do {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j)
      if (pick[j]) cols.push_back(j);
    std::vector<std::vector<Rational>> sq(m, std::vector<Rational>(m));
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t k = 0; k < m; ++k) sq[r][k] = a[r][cols[k]];
    const auto x = solve_square(sq, b);
    if (!x) continue;
    if (std::any_of(x->begin(), x->end(), [](const Rational& q) { return sgn(q) < 0; })) continue;
    Rational obj;
    for (std::size_t k = 0; k < m; ++k) obj += c[cols[k]] * (*x)[k];
    if (!best || obj > *best) best = obj;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

// Random LP: sum x = 1 plus a few rows with small integer coefficients and
// zero right-hand side, so the feasible region is bounded.
RationalLP random_lp(std::mt19937_64& rng, std::size_t n, std::size_t extra_rows) {
  std::uniform_int_distribution<int> coef(-3, 3);
  RationalLP lp;
  for (std::size_t j = 0; j < n; ++j) lp.variables.push_back("x" + std::to_string(j));
  Row norm;
  for (std::size_t j = 0; j < n; ++j) norm.terms.push_back({static_cast<std::uint32_t>(j), 1, 1});
  norm.rhs = 1;
  lp.rows.push_back(norm);
  lp.normalization_row = 0;
  for (std::size_t r = 0; r < extra_rows; ++r) {
    Row row;
    for (std::size_t j = 0; j < n; ++j) {
      const int v = coef(rng);
      if (v != 0) row.terms.push_back({static_cast<std::uint32_t>(j), v, 1});
    }
    if (row.terms.empty()) row.terms.push_back({0, 1, 1});
    lp.rows.push_back(row);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const int v = coef(rng);
    if (v != 0) lp.objective.push_back({static_cast<std::uint32_t>(j), v, 2});
  }
  for (auto& t : lp.objective) {
    const Rational q = t.value();
    t = make_term(t.index, q);
  }
  return lp;
}

RationalLP small_lp() {
  RationalLP lp;
  lp.variables = {"a", "b", "c"};
  lp.objective = {{0, 1, 1}, {2, 1, 2}};
  lp.rows.push_back({{{0, 1, 1}, {1, 1, 1}, {2, 1, 1}}, Rational(1)});
  lp.rows.push_back({{{0, 1, 1}, {1, -2, 3}}, Rational(0)});
  lp.normalization_row = 0;
  return lp;
}

}  // namespace

TEST(Rational, ParseAndFormat) {
  EXPECT_EQ(parse_rational("3/6"), frac(1, 2));
  EXPECT_EQ(parse_rational("-4"), Rational(-4));
  EXPECT_EQ(parse_rational(" 2/-4 "), frac(-1, 2));
  EXPECT_THROW(parse_rational("0.5"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_EQ(to_string(frac(-2, 4)), "-1/2");
  EXPECT_EQ(to_string(Rational(5)), "5/1");
  EXPECT_EQ(to_decimal(frac(2, 3), 4), "0.6667");
  EXPECT_EQ(to_decimal(frac(-1, 8), 2), "-0.13");
  EXPECT_EQ(pow(frac(11, 15), 2), frac(121, 225));
  EXPECT_EQ(pow(frac(11, 15), 0), Rational(1));
}

TEST(Rational, BestApproximationIsClosest) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-100000, 100000), den(1, 100000);
  for (int trial = 0; trial < 200; ++trial) {
    const Rational x = frac(num(rng), den(rng));
    for (long d : {1L, 7L, 50L, 300L}) {
      const Rational got = best_approximation(x, Integer(d));
      ASSERT_LE(got.get_den(), d);
      Rational best_dist = abs(x - got);
      for (long q = 1; q <= d; ++q) {
        const Rational xq = x * q;
        Integer p;
        mpz_fdiv_q(p.get_mpz_t(), xq.get_num_mpz_t(), xq.get_den_mpz_t());
        for (const Integer& cand : {p, Integer(p + 1)})
          EXPECT_LE(best_dist, abs(x - Rational(cand, q))) << x << " d=" << d;
      }
    }
  }
  EXPECT_EQ(best_approximation(0.3333333333333, Integer(1000)), frac(1, 3));
}

TEST(Term, MakeTermReducesAndChecksRange) {
  const Term t = make_term(3, frac(6, 4));
  EXPECT_EQ(t.num, 3);
  EXPECT_EQ(t.den, 2);
  EXPECT_THROW(make_term(0, Rational(Integer("100000000000000000000"))), std::overflow_error);
}

TEST(Validate, RejectsMalformedRows) {
  RationalLP lp = small_lp();
  lp.rows[0].terms = {{1, 1, 1}, {0, 1, 1}};
  EXPECT_THROW(lp.validate(), std::invalid_argument);
  lp = small_lp();
  lp.rows[1].terms.push_back({7, 1, 1});
  EXPECT_THROW(lp.validate(), std::invalid_argument);
}

TEST(Json, GoldenLp) {
  std::ostringstream out;
  write_lp_json(out, small_lp());
  EXPECT_EQ(out.str(),
            "{\"variables\":[\"a\",\"b\",\"c\"],\"objective\":[[0,\"1/1\"],[2,\"1/2\"]],\"rows\":[{\"rhs\":\"1/1\","
            "\"terms\":[[0,\"1/1\"],[1,\"1/1\"],[2,\"1/1\"]]},{\"rhs\":\"0/1\",\"terms\":[[0,\"1/1\"],[1,\"-2/3\"]]}],"
            "\"normalization_row\":0}\n");
}

TEST(Json, GoldenCertificate) {
  const auto res = solve_exact(small_lp());
  std::ostringstream out;
  write_certificate_json(out, res.certificate);
  EXPECT_EQ(out.str(), "{\"primal\":[[2,\"1/1\"]],\"dual\":[[0,\"1/2\"],[1,\"3/4\"]],\"objective\":\"1/2\"}\n");
}

TEST(Json, RoundTripPreservesEverything) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const RationalLP lp = random_lp(rng, 6, 2);
    std::stringstream ss;
    write_lp_json(ss, lp);
    const RationalLP back = read_lp_json(ss);
    EXPECT_EQ(back.variables, lp.variables);
    EXPECT_EQ(back.objective, lp.objective);
    ASSERT_EQ(back.rows.size(), lp.rows.size());
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
      EXPECT_EQ(back.rows[r].terms, lp.rows[r].terms);
      EXPECT_EQ(back.rows[r].rhs, lp.rows[r].rhs);
    }
    EXPECT_EQ(back.normalization_row, lp.normalization_row);
    const auto res = solve_exact(lp);
    if (res.status != SolveStatus::Optimal) continue;
    std::stringstream cs;
    write_certificate_json(cs, res.certificate);
    const Certificate cert = read_certificate_json(cs, lp);
    EXPECT_EQ(cert.primal, res.certificate.primal);
    EXPECT_EQ(cert.dual, res.certificate.dual);
    EXPECT_EQ(cert.objective, res.certificate.objective);
  }
}

TEST(RowSelection, RankMatchesRationalElimination) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    RationalLP lp = random_lp(rng, 7, 4);
    // Append dependent rows: sums of earlier rows.
    Row sum;
    std::vector<Rational> acc(lp.num_variables());
    for (std::size_t r = 1; r < 3; ++r)
      for (const auto& t : lp.rows[r].terms) acc[t.index] += t.value();
    for (std::size_t j = 0; j < acc.size(); ++j)
      if (sgn(acc[j]) != 0) sum.terms.push_back(make_term(static_cast<std::uint32_t>(j), acc[j]));
    if (!sum.terms.empty()) lp.rows.push_back(sum);
    lp.rows.push_back(lp.rows[1]);
    const auto rows = select_independent_rows(lp);
    EXPECT_EQ(rows.size(), rank_of(dense(lp)));
    EXPECT_EQ(rows.front(), 0u);
    std::vector<std::vector<Rational>> chosen;
    const auto a = dense(lp);
    for (auto r : rows) chosen.push_back(a[r]);
    EXPECT_EQ(rank_of(chosen), rows.size());
  }
}

TEST(Solve, RandomLpsMatchVertexOracle) {
  std::mt19937_64 rng(2024);
  int optimal = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const RationalLP lp = random_lp(rng, 6, 2);
    if (rank_of(dense(lp)) != lp.num_rows()) continue;
    const auto oracle = vertex_oracle(lp);
    const auto exact = solve_exact(lp);
    const auto presolved = solve_via_presolve(lp);
    if (!oracle) {
      EXPECT_EQ(exact.status, SolveStatus::Infeasible);
      EXPECT_EQ(presolved.status, SolveStatus::Infeasible);
      continue;
    }
    ++optimal;
    ASSERT_EQ(exact.status, SolveStatus::Optimal);
    ASSERT_EQ(presolved.status, SolveStatus::Optimal);
    EXPECT_EQ(exact.certificate.objective, *oracle);
    EXPECT_EQ(presolved.certificate.objective, *oracle);
    EXPECT_TRUE(verify_certificate(lp, exact.certificate).accepted());
    EXPECT_TRUE(verify_certificate(lp, presolved.certificate).accepted());
  }
  EXPECT_GT(optimal, 20);
}

TEST(Solve, BlandThroughoutAgrees) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const RationalLP lp = random_lp(rng, 7, 3);
    ExactOptions bland;
    bland.degenerate_switch = 0;
    const auto a = solve_exact(lp);
    const auto b = solve_exact(lp, bland);
    ASSERT_EQ(a.status, b.status);
    if (a.status == SolveStatus::Optimal) {
      EXPECT_EQ(a.certificate.objective, b.certificate.objective);
    }
  }
}

TEST(Solve, InfeasibleAndUnbounded) {
  RationalLP infeasible;
  infeasible.variables = {"x", "y"};
  infeasible.rows.push_back({{{0, 1, 1}, {1, 1, 1}}, Rational(-1)});
  EXPECT_EQ(solve_exact(infeasible).status, SolveStatus::Infeasible);
  EXPECT_EQ(solve_via_presolve(infeasible).status, SolveStatus::Infeasible);

  RationalLP unbounded;
  unbounded.variables = {"x", "y"};
  unbounded.objective = {{0, 1, 1}};
  unbounded.rows.push_back({{{0, 1, 1}, {1, -1, 1}}, Rational(0)});
  EXPECT_EQ(solve_exact(unbounded).status, SolveStatus::Unbounded);
}

TEST(Solve, ObserverSeesFeasibleIterates) {
  std::mt19937_64 rng(5);
  const RationalLP lp = random_lp(rng, 8, 3);
  ExactOptions opts;
  std::size_t calls = 0;
  opts.observer = [&](const std::vector<Rational>& x) {
    ++calls;
    for (std::size_t r = 0; r < lp.num_rows(); ++r) {
      Rational lhs;
      for (const auto& t : lp.rows[r].terms) lhs += t.value() * x[t.index];
      EXPECT_EQ(lhs, lp.rows[r].rhs);
    }
    for (const auto& v : x) EXPECT_GE(sgn(v), 0);
  };
  ASSERT_EQ(solve_exact(lp, opts).status, SolveStatus::Optimal);
  EXPECT_GT(calls, 0u);
}

TEST(Solve, OptimumInvariantUnderRowPermutation) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    RationalLP lp = random_lp(rng, 7, 3);
    const auto a = solve_exact(lp);
    std::shuffle(lp.rows.begin(), lp.rows.end(), rng);
    lp.normalization_row.reset();
    const auto b = solve_exact(lp);
    ASSERT_EQ(a.status, b.status);
    if (a.status == SolveStatus::Optimal) {
      EXPECT_EQ(a.certificate.objective, b.certificate.objective);
    }
  }
}

TEST(Verify, AcceptsOptimalCertificate) {
  const auto res = solve_exact(small_lp());
  const auto check = verify_certificate(small_lp(), res.certificate);
  EXPECT_TRUE(check.accepted()) << check.message;
}

TEST(Verify, RejectsEachKindOfTampering) {
  const RationalLP lp = small_lp();
  const Certificate good = solve_exact(lp).certificate;

  Certificate c = good;
  c.primal[2] = -1;
  EXPECT_EQ(verify_certificate(lp, c).kind, VerifyResult::Kind::NegativePrimal);
  EXPECT_EQ(verify_certificate(lp, c).index, 2u);

  c = good;
  c.primal[1] = frac(1, 7);
  EXPECT_EQ(verify_certificate(lp, c).kind, VerifyResult::Kind::PrimalRowViolated);

  c = good;
  c.dual[1] = 0;
  EXPECT_EQ(verify_certificate(lp, c).kind, VerifyResult::Kind::DualColumnViolated);

  c = good;
  c.objective += frac(1, 1000);
  EXPECT_EQ(verify_certificate(lp, c).kind, VerifyResult::Kind::PrimalObjectiveMismatch);

  c = good;
  c.dual.pop_back();
  EXPECT_EQ(verify_certificate(lp, c).kind, VerifyResult::Kind::ShapeMismatch);

  // A dual that is feasible but not optimal.
  c = good;
  c.dual[0] += 1;
  EXPECT_EQ(verify_certificate(lp, c).kind, VerifyResult::Kind::DualObjectiveMismatch);
}
