#include "nsring/bounds.hpp"
#include "nsring/nonsignal_lp.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

using namespace nsring;

namespace {

Rational frac(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

std::vector<Color> digits(std::uint64_t w, int size) {
  std::vector<Color> c(static_cast<std::size_t>(size));
  for (int i = size - 1; i >= 0; --i) {
    c[static_cast<std::size_t>(i)] = static_cast<Color>(w % 3);
    w /= 3;
  }
  return c;
}

std::uint64_t word(const std::vector<Color>& c) {
  std::uint64_t w = 0;
  for (Color x : c) w = w * 3 + x;
  return w;
}

// Oracle: orbit of a coloring by closure under the group generators.
std::set<std::uint64_t> orbit_of(std::uint64_t start, int size, const Symmetries& sym) {
  std::set<std::uint64_t> seen{start};
  std::vector<std::uint64_t> stack{start};
  while (!stack.empty()) {
    const auto c = digits(stack.back(), size);
    stack.pop_back();
    std::vector<std::vector<Color>> next;
    if (sym.rotation) {
      auto r = c;
      std::rotate(r.begin(), r.begin() + 1, r.end());
      next.push_back(r);
    }
    if (sym.colors) {
      auto a = c, b = c;
      for (auto& x : a) x = static_cast<Color>((x + 1) % 3);
      for (auto& x : b) x = x == 0 ? 1 : x == 1 ? 0 : x;
      next.push_back(a);
      next.push_back(b);
    }
    if (sym.reflection) next.emplace_back(c.rbegin(), c.rend());
    for (const auto& v : next)
      if (seen.insert(word(v)).second) stack.push_back(word(v));
  }
  return seen;
}

Rational solve_objective(const RationalLP& lp) {
  const auto res = solve_via_presolve(lp);
  EXPECT_EQ(res.status, SolveStatus::Optimal);
  EXPECT_TRUE(verify_certificate(lp, res.certificate).accepted());
  return res.certificate.objective;
}

}  // namespace

TEST(Orbits, MatchClosureOracle) {
  const std::vector<Symmetries> groups = {
      {false, false, false}, {true, false, false}, {false, true, false},
      {true, true, false},   {false, true, true},  {true, true, true},
  };
  for (int size : {4, 5, 6}) {
    for (const auto& sym : groups) {
      const Context ctx = sym.rotation ? Context::ring(size) : Context::segment(size);
      const auto table = orbit_table(ctx, sym);
      std::set<std::uint64_t> reps;
      for (std::uint64_t w = 0; w < pow3(size); ++w) {
        const auto orbit = orbit_of(w, size, sym);
        const auto cls = table.class_of[w];
        EXPECT_EQ(table.representative[cls], *orbit.begin());
        EXPECT_EQ(table.orbit_size[cls], orbit.size());
        reps.insert(*orbit.begin());
      }
      ASSERT_EQ(table.count(), reps.size());
      EXPECT_TRUE(std::is_sorted(table.representative.begin(), table.representative.end()));
      for (std::size_t i = 0; i < table.count(); ++i) {
        const auto c = digits(table.representative[i], size);
        EXPECT_EQ(table.proper[i], ctx.is_ring() ? is_proper_ring(c) : is_proper_segment(c));
      }
    }
  }
}

TEST(RingLp, AllVariantsAgreeOnSmallRings) {
  for (int n = 4; n <= 6; ++n) {
    const Rational base = solve_objective(build_ring_lp(n, 1, false, false).lp);
    EXPECT_EQ(solve_objective(build_ring_lp(n, 1, true, false).lp), base) << n;
    EXPECT_EQ(solve_objective(build_ring_lp(n, 1, true, true).lp), base) << n;
    EXPECT_EQ(solve_objective(build_ring_lp(n, 1, false, true).lp), base) << n;
    BuildOptions mirror;
    mirror.reflection = true;
    EXPECT_EQ(solve_objective(build_ring_lp(n, 1, true, true, mirror).lp), base) << n;
  }
}

TEST(RingLp, ColorSymmetryAgreesAtSeven) {
  EXPECT_EQ(solve_objective(build_ring_lp(7, 1, true, false).lp),
            solve_objective(build_ring_lp(7, 1, true, true).lp));
}

TEST(RingLp, PerfectUpToNine) {
  BuildOptions mirror;
  mirror.reflection = true;
  for (int n = 7; n <= 9; ++n) EXPECT_EQ(solve_objective(build_ring_lp(n, 1, true, true, mirror).lp), Rational(1)) << n;
}

TEST(RingLp, GapZeroForcesUniformOnFrames) {
  // With r = 0 adjacent single nodes are a valid two-frame placement, so the
  // pair marginal of neighbours equals that of any other pair.
  const auto model = build_ring_lp(5, 0, true, true);
  EXPECT_LT(solve_objective(model.lp), Rational(1));
}

TEST(SegmentLp, AllVariantsAgreeOnSmallSegments) {
  for (int k = 2; k <= 6; ++k) {
    const Rational base = solve_objective(build_segment_lp(k, 1, false).lp);
    EXPECT_EQ(base, Rational(1)) << k;
    EXPECT_EQ(solve_objective(build_segment_lp(k, 1, true).lp), base) << k;
    BuildOptions mirror;
    mirror.reflection = true;
    EXPECT_EQ(solve_objective(build_segment_lp(k, 1, true, mirror).lp), base) << k;
  }
}

TEST(SegmentLp, PerfectAtEight) {
  BuildOptions mirror;
  mirror.reflection = true;
  EXPECT_EQ(solve_objective(build_segment_lp(8, 1, true, mirror).lp), Rational(1));
}

TEST(Solvers, ExactAndPresolveAgree) {
  std::vector<RationalLP> lps;
  for (int n = 4; n <= 7; ++n) lps.push_back(build_ring_lp(n, 1, true, true).lp);
  for (int k = 3; k <= 6; ++k) lps.push_back(build_segment_lp(k, 1, true).lp);
  lps.push_back(build_ring_lp(6, 0, true, true).lp);
  for (const auto& lp : lps) {
    const auto exact = solve_exact(lp);
    const auto fast = solve_via_presolve(lp);
    PresolveOptions tiny;
    tiny.max_denominator = 2;
    const auto fallback = solve_via_presolve(lp, tiny);
    ASSERT_EQ(exact.status, SolveStatus::Optimal);
    EXPECT_EQ(fast.certificate.objective, exact.certificate.objective);
    EXPECT_EQ(fallback.certificate.objective, exact.certificate.objective);
    EXPECT_TRUE(verify_certificate(lp, exact.certificate).accepted());
    EXPECT_TRUE(verify_certificate(lp, fallback.certificate).accepted());
  }
}

TEST(Model, NormalizationWeightsAreOrbitSizes) {
  const auto model = build_ring_lp(6, 1, true, true);
  ASSERT_TRUE(model.lp.normalization_row.has_value());
  const auto& row = model.lp.rows[*model.lp.normalization_row];
  EXPECT_EQ(model.lp.rows[*model.lp.normalization_row].rhs, Rational(1));
  ASSERT_EQ(row.terms.size(), model.orbits.count());
  for (const auto& t : row.terms) EXPECT_EQ(t.value(), Rational(model.orbits.orbit_size[t.index]));
  for (const auto& t : model.lp.objective) {
    EXPECT_TRUE(model.orbits.proper[t.index]);
    EXPECT_EQ(t.value(), Rational(model.orbits.orbit_size[t.index]));
  }
}

TEST(Model, ExpandedOptimumIsANonsignalingDistribution) {
  for (const auto& model : {build_ring_lp(6, 1, true, true), build_ring_lp(5, 1, false, false),
                            build_segment_lp(5, 1, true)}) {
    const auto res = solve_exact(model.lp);
    ASSERT_EQ(res.status, SolveStatus::Optimal);
    const auto p = expand_distribution(model, res.certificate.primal);
    ASSERT_EQ(p.size(), pow3(model.orbits.context.size));
    EXPECT_EQ(std::accumulate(p.begin(), p.end(), Rational(0)), Rational(1));
    EXPECT_EQ(success_probability(p, model.orbits.context), res.certificate.objective);
    EXPECT_FALSE(nonsignaling_violation(p, model.orbits.context, model.gap).has_value());
    for (const auto& x : p) EXPECT_GE(sgn(x), 0);
  }
}

TEST(Model, UniformDistributionIsFeasible) {
  const auto model = build_ring_lp(5, 1, true, false);
  std::vector<Rational> x(model.orbits.count(), frac(1, 243));
  for (std::size_t r = 0; r < model.lp.num_rows(); ++r) {
    Rational lhs;
    for (const auto& t : model.lp.rows[r].terms) lhs += t.value() * x[t.index];
    EXPECT_EQ(lhs, model.lp.rows[r].rhs) << r;
  }
}

TEST(Model, BuildIsThreadCountInvariant) {
  BuildOptions one, many;
  one.threads = 1;
  many.threads = 8;
  const auto a = build_segment_lp(6, 1, true, one).lp;
  const auto b = build_segment_lp(6, 1, true, many).lp;
  ASSERT_EQ(a.num_rows(), b.num_rows());
  for (std::size_t r = 0; r < a.num_rows(); ++r) EXPECT_EQ(a.rows[r].terms, b.rows[r].terms);
  EXPECT_EQ(a.variables, b.variables);
}
