#include "nsring/lp.hpp"

#include "exact_simplex.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsring {

namespace detail {

ExactTableau::ExactTableau(const RationalLP& lp, const std::vector<std::size_t>& rows)
    : m_(rows.size()), n_(lp.num_variables()), row_ids_(rows) {
  columns_.resize(n_);
  sign_.assign(m_, 1);
  b_.resize(m_);
  for (std::size_t r = 0; r < m_; ++r) {
    const auto& row = lp.rows[rows[r]];
    if (sgn(row.rhs) < 0) sign_[r] = -1;
    b_[r] = sign_[r] < 0 ? Rational(-row.rhs) : row.rhs;
    for (const auto& t : row.terms) {
      Rational a = t.value();
      if (sign_[r] < 0) a = -a;
      columns_[t.index].push_back({r, std::move(a)});
    }
  }
  cost_.assign(n_, Rational(0));
  for (const auto& t : lp.objective) cost_[t.index] = t.value();
  integral_.assign(n_, true);
  for (std::size_t j = 0; j < n_; ++j) {
    if (cost_[j].get_den() != 1) integral_[j] = false;
    for (const auto& e : columns_[j])
      if (e.value.get_den() != 1) integral_[j] = false;
  }
  reset_to_artificial_basis();
}

void ExactTableau::reset_to_artificial_basis() {
  basis_.resize(m_);
  is_basic_.assign(n_ + m_, false);
  binv_.assign(m_, std::vector<Rational>(m_));
  for (std::size_t r = 0; r < m_; ++r) {
    basis_[r] = n_ + r;
    is_basic_[n_ + r] = true;
    binv_[r][r] = 1;
  }
  x_ = b_;
}

std::vector<Rational> ExactTableau::column(std::size_t j) const {
  std::vector<Rational> u(m_);
  if (j >= n_) {
    const std::size_t k = j - n_;
    for (std::size_t r = 0; r < m_; ++r) u[r] = binv_[r][k];
    return u;
  }
  for (std::size_t r = 0; r < m_; ++r) {
    Rational s;
    for (const auto& e : columns_[j])
      if (sgn(binv_[r][e.row]) != 0) s += binv_[r][e.row] * e.value;
    u[r] = std::move(s);
  }
  return u;
}

void ExactTableau::pivot(std::size_t r, std::size_t j, const std::vector<Rational>& u) {
  const Rational piv = u[r];
  for (std::size_t k = 0; k < m_; ++k)
    if (sgn(binv_[r][k]) != 0) binv_[r][k] /= piv;
  x_[r] /= piv;
  for (std::size_t i = 0; i < m_; ++i) {
    if (i == r || sgn(u[i]) == 0) continue;
    const Rational f = u[i];
    for (std::size_t k = 0; k < m_; ++k)
      if (sgn(binv_[r][k]) != 0) binv_[i][k] -= f * binv_[r][k];
    x_[i] -= f * x_[r];
  }
  is_basic_[basis_[r]] = false;
  basis_[r] = j;
  is_basic_[j] = true;
  ++iterations_;
}

std::vector<Rational> ExactTableau::duals(const std::vector<Rational>& basic_costs) const {
  std::vector<Rational> y(m_);
  for (std::size_t r = 0; r < m_; ++r) {
    if (sgn(basic_costs[r]) == 0) continue;
    for (std::size_t k = 0; k < m_; ++k)
      if (sgn(binv_[r][k]) != 0) y[k] += basic_costs[r] * binv_[r][k];
  }
  return y;
}

Rational ExactTableau::phase_cost(std::size_t j, Phase phase) const {
  if (phase == Phase::One) return j >= n_ ? Rational(-1) : Rational(0);
  return j >= n_ ? Rational(0) : cost_[j];
}

std::vector<Rational> ExactTableau::reduced_costs_scaled(const std::vector<Rational>& y, Phase phase,
                                                         Integer& scale) const {
  // Scale y to integers so that integral columns price with Integer sums.
  scale = 1;
  for (const auto& v : y) scale = lcm(scale, v.get_den());
  std::vector<Integer> yi(m_);
  for (std::size_t r = 0; r < m_; ++r) yi[r] = Rational(y[r] * scale).get_num();
  std::vector<Rational> d(n_ + m_);
  for (std::size_t j = 0; j < n_; ++j) {
    if (is_basic_[j]) continue;
    const Rational cj = phase_cost(j, phase);
    if (integral_[j]) {
      Integer s = cj.get_num() * scale;
      for (const auto& e : columns_[j]) s -= yi[e.row] * e.value.get_num();
      d[j] = Rational(s);
    } else {
      Rational s = cj;
      for (const auto& e : columns_[j]) s -= y[e.row] * e.value;
      d[j] = s * scale;
    }
  }
  for (std::size_t k = 0; k < m_; ++k) {
    const std::size_t j = n_ + k;
    if (is_basic_[j]) continue;
    d[j] = (phase_cost(j, phase) - y[k]) * scale;
  }
  return d;
}

ExactTableau::PhaseResult ExactTableau::run_phase(Phase phase, const ExactOptions& options) {
  std::size_t degenerate_run = 0;
  if (phase == Phase::Two && options.observer) options.observer(primal());
  while (true) {
    std::vector<Rational> basic_costs(m_);
    for (std::size_t r = 0; r < m_; ++r) basic_costs[r] = phase_cost(basis_[r], phase);
    const auto y = duals(basic_costs);
    Integer scale;
    const auto d = reduced_costs_scaled(y, phase, scale);

    const bool bland = options.degenerate_switch == 0 || degenerate_run >= options.degenerate_switch;
    std::size_t entering = n_ + m_;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (is_basic_[j]) continue;
      // Artificial columns never re-enter.
      if (j >= n_) continue;
      if (sgn(d[j]) <= 0) continue;
      if (bland) {
        entering = j;
        break;
      }
      if (entering == n_ + m_ || d[j] > d[entering]) entering = j;
    }
    if (entering == n_ + m_) return PhaseResult::Optimal;

    const auto u = column(entering);
    std::size_t leave = m_;
    Rational best_ratio;
    for (std::size_t r = 0; r < m_; ++r) {
      if (sgn(u[r]) <= 0) continue;
      Rational ratio = x_[r] / u[r];
      if (leave == m_ || ratio < best_ratio ||
          (ratio == best_ratio && basis_[r] < basis_[leave])) {
        leave = r;
        best_ratio = std::move(ratio);
      }
    }
    if (leave == m_) return PhaseResult::Unbounded;
    degenerate_run = sgn(best_ratio) == 0 ? degenerate_run + 1 : 0;
    pivot(leave, entering, u);
    if (phase == Phase::Two && options.observer) options.observer(primal());
  }
}

bool ExactTableau::apply_warm_start(const std::vector<std::size_t>& columns) {
  for (std::size_t j : columns) {
    if (j >= n_ || is_basic_[j]) continue;
    const auto u = column(j);
    std::size_t r = m_;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_ && sgn(u[i]) != 0) {
        r = i;
        break;
      }
    if (r == m_) continue;
    pivot(r, j, u);
  }
  for (const auto& v : x_)
    if (sgn(v) < 0) {
      reset_to_artificial_basis();
      return false;
    }
  return true;
}

void ExactTableau::drive_out_artificials() {
  for (std::size_t r = 0; r < m_; ++r) {
    if (basis_[r] < n_) continue;
    for (std::size_t j = 0; j < n_; ++j) {
      if (is_basic_[j]) continue;
      Rational urj;
      for (const auto& e : columns_[j])
        if (sgn(binv_[r][e.row]) != 0) urj += binv_[r][e.row] * e.value;
      if (sgn(urj) != 0) {
        pivot(r, j, column(j));
        break;
      }
    }
  }
}

std::vector<Rational> ExactTableau::primal() const {
  std::vector<Rational> x(n_);
  for (std::size_t r = 0; r < m_; ++r)
    if (basis_[r] < n_) x[basis_[r]] = x_[r];
  return x;
}

Rational ExactTableau::artificial_sum() const {
  Rational s;
  for (std::size_t r = 0; r < m_; ++r)
    if (basis_[r] >= n_) s += x_[r];
  return s;
}

std::vector<Rational> ExactTableau::row_duals() const {
  std::vector<Rational> basic_costs(m_);
  for (std::size_t r = 0; r < m_; ++r) basic_costs[r] = phase_cost(basis_[r], Phase::Two);
  auto y = duals(basic_costs);
  for (std::size_t r = 0; r < m_; ++r)
    if (sign_[r] < 0) y[r] = -y[r];
  return y;
}

std::vector<std::size_t> ExactTableau::basic_structural() const {
  std::vector<std::size_t> cols;
  for (std::size_t j : basis_)
    if (j < n_) cols.push_back(j);
  return cols;
}

}  // namespace detail

namespace {

Certificate assemble(const RationalLP& lp, const std::vector<std::size_t>& rows,
                     const std::vector<Rational>& x, const std::vector<Rational>& y_selected) {
  Certificate cert;
  cert.primal = x;
  cert.dual.assign(lp.num_rows(), Rational(0));
  for (std::size_t r = 0; r < rows.size(); ++r) cert.dual[rows[r]] = y_selected[r];
  for (const auto& t : lp.objective) cert.objective += t.value() * x[t.index];
  return cert;
}

}  // namespace

SolveResult solve_exact(const RationalLP& lp, const ExactOptions& options) {
  lp.validate();
  SolveResult result;
  std::vector<std::size_t> rows = select_independent_rows(lp);
  std::sort(rows.begin(), rows.end());
  while (true) {
    detail::ExactTableau tab(lp, rows);
    if (!options.warm_start.empty()) tab.apply_warm_start(options.warm_start);
    using Phase = detail::ExactTableau::Phase;
    tab.run_phase(Phase::One, options);
    if (sgn(tab.artificial_sum()) != 0) {
      result.status = SolveStatus::Infeasible;
      result.message = "phase one ended with positive artificial mass";
      result.stats = {rows.size(), tab.iterations(), "exact"};
      return result;
    }
    tab.drive_out_artificials();
    if (tab.run_phase(Phase::Two, options) == detail::ExactTableau::PhaseResult::Unbounded) {
      result.status = SolveStatus::Unbounded;
      result.message = "objective unbounded above";
      result.stats = {rows.size(), tab.iterations(), "exact"};
      return result;
    }
    result.certificate = assemble(lp, rows, tab.primal(), tab.row_duals());
    result.stats = {rows.size(), tab.iterations(), "exact"};
    const auto check = verify_certificate(lp, result.certificate);
    if (check.accepted()) {
      result.status = SolveStatus::Optimal;
      result.message = check.message;
      return result;
    }
    // A row dropped as dependent modulo p can only fail here if it is
    // independent over Q; add it back and solve again.
    if (check.kind == VerifyResult::Kind::PrimalRowViolated &&
        !std::binary_search(rows.begin(), rows.end(), check.index)) {
      rows.insert(std::upper_bound(rows.begin(), rows.end(), check.index), check.index);
      continue;
    }
    if (check.kind == VerifyResult::Kind::PrimalRowViolated) {
      result.status = SolveStatus::Infeasible;
      result.message = check.message;
      return result;
    }
    throw std::logic_error("exact simplex produced an invalid certificate: " + check.message);
  }
}

}  // namespace nsring
