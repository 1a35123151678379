#include "nsring/lp.hpp"

#include "float_simplex.hpp"
#include "lifting.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace nsring {

namespace {

Rational round_entry(double v, const Integer& bound, bool nonnegative) {
  if (std::abs(v) < 1e-12) return 0;
  Rational q = best_approximation(v, bound);
  if (nonnegative && sgn(q) < 0) return 0;
  return q;
}

// Exact primal and dual of a basis over the given rows, or nothing when the
// basis is singular modulo the lifting prime or the system cannot be lifted.
std::optional<Certificate> solve_basis(const RationalLP& lp, const std::vector<std::size_t>& rows,
                                       const std::vector<std::size_t>& basis) {
  const std::size_t m = rows.size();
  if (basis.size() != m) return std::nullopt;
  // Row scales clearing all denominators of the selected rows.
  std::vector<Integer> scale(m, 1);
  for (std::size_t r = 0; r < m; ++r) {
    const auto& row = lp.rows[rows[r]];
    for (const auto& t : row.terms) scale[r] = lcm(scale[r], Integer(static_cast<long>(t.den)));
    scale[r] = lcm(scale[r], row.rhs.get_den());
  }
  std::vector<std::ptrdiff_t> position(lp.num_variables(), -1);
  for (std::size_t i = 0; i < m; ++i) position[basis[i]] = static_cast<std::ptrdiff_t>(i);
  detail::IntegerColumns cols;
  cols.size = m;
  cols.columns.resize(m);
  for (std::size_t r = 0; r < m; ++r)
    for (const auto& t : lp.rows[rows[r]].terms) {
      const auto pos = position[t.index];
      if (pos < 0) continue;
      Rational a = t.value() * scale[r];
      cols.columns[static_cast<std::size_t>(pos)].push_back({static_cast<std::uint32_t>(r), a.get_num()});
    }
  const auto solver = detail::LiftingSolver::factor(cols);
  if (!solver) return std::nullopt;

  std::vector<Integer> rhs(m);
  for (std::size_t r = 0; r < m; ++r) rhs[r] = Rational(lp.rows[rows[r]].rhs * scale[r]).get_num();
  const auto xb = solver->solve(rhs, false);
  if (!xb) return std::nullopt;

  std::vector<Rational> cost(lp.num_variables());
  for (const auto& t : lp.objective) cost[t.index] = t.value();
  Integer cden = 1;
  for (std::size_t i = 0; i < m; ++i) cden = lcm(cden, cost[basis[i]].get_den());
  std::vector<Integer> cb(m);
  for (std::size_t i = 0; i < m; ++i) cb[i] = Rational(cost[basis[i]] * cden).get_num();
  const auto w = solver->solve(cb, true);
  if (!w) return std::nullopt;

  Certificate cert;
  cert.primal.assign(lp.num_variables(), Rational(0));
  for (std::size_t i = 0; i < m; ++i) cert.primal[basis[i]] = (*xb)[i];
  cert.dual.assign(lp.num_rows(), Rational(0));
  for (std::size_t r = 0; r < m; ++r) cert.dual[rows[r]] = (*w)[r] * scale[r] / cden;
  for (const auto& t : lp.objective) cert.objective += t.value() * cert.primal[t.index];
  return cert;
}

}  // namespace

SolveResult solve_via_presolve(const RationalLP& lp, const PresolveOptions& options) {
  lp.validate();
  std::vector<std::size_t> rows = select_independent_rows(lp);
  std::sort(rows.begin(), rows.end());
  const auto fs = detail::solve_float(lp, rows, options.float_tolerance);

  SolveResult result;
  result.stats.selected_rows = rows.size();
  result.stats.iterations = fs.iterations;
  if (fs.status == detail::FloatSolution::Status::Optimal) {
    for (Integer bound = 1000; bound <= options.max_denominator; bound *= 1000) {
      Certificate cert;
      cert.primal.resize(lp.num_variables());
      for (std::size_t j = 0; j < lp.num_variables(); ++j)
        cert.primal[j] = round_entry(fs.primal[j], bound, true);
      cert.dual.assign(lp.num_rows(), Rational(0));
      for (std::size_t r = 0; r < rows.size(); ++r) cert.dual[rows[r]] = round_entry(fs.dual[r], bound, false);
      for (const auto& t : lp.objective) cert.objective += t.value() * cert.primal[t.index];
      const auto check = verify_certificate(lp, cert);
      if (check.accepted()) {
        result.certificate = std::move(cert);
        result.message = check.message;
        result.stats.path = "float+rounding(" + bound.get_str() + ")";
        return result;
      }
    }
  }
  if (!options.exact_fallback) {
    result.status = SolveStatus::Infeasible;
    result.message = "rounded float solution was not accepted and the exact fallback is disabled";
    result.stats.path = "float";
    return result;
  }
  if (fs.status == detail::FloatSolution::Status::Optimal) {
    if (auto cert = solve_basis(lp, rows, fs.basis)) {
      const auto check = verify_certificate(lp, *cert);
      if (check.accepted()) {
        result.certificate = std::move(*cert);
        result.message = check.message;
        result.stats.path = "float basis+lifting";
        return result;
      }
    }
  }
  ExactOptions exact;
  if (fs.status == detail::FloatSolution::Status::Optimal) exact.warm_start = fs.basis;
  auto res = solve_exact(lp, exact);
  res.stats.iterations += fs.iterations;
  res.stats.path = exact.warm_start.empty() ? "exact" : "float basis+exact";
  return res;
}

}  // namespace nsring
