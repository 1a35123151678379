#include "float_simplex.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>

namespace nsring::detail {

namespace {

class Tableau {
 public:
  // The right-hand side is shifted to b + A delta for a small positive
  // delta drawn from a fixed seed. Any feasible x gives the feasible point
  // x + delta of the shifted system, on which no basic value ties at zero.
  Tableau(const RationalLP& lp, const std::vector<std::size_t>& rows, double perturbation)
      : m_(rows.size()), n_(lp.num_variables()), width_(n_ + m_ + 1) {
    t_.assign(m_ * width_, 0.0);
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(1.0, 2.0);
    std::vector<double> delta(n_);
    for (auto& d : delta) d = perturbation * dist(rng);
    sign_.assign(m_, 1.0);
    b_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      const auto& row = lp.rows[rows[r]];
      double shifted = row.rhs.get_d();
      for (const auto& t : row.terms) {
        const double a = static_cast<double>(t.num) / static_cast<double>(t.den);
        at(r, t.index) = a;
        shifted += a * delta[t.index];
      }
      if (shifted < 0) {
        sign_[r] = -1.0;
        for (const auto& t : row.terms) at(r, t.index) = -at(r, t.index);
      }
      at(r, n_ + r) = 1.0;
      rhs_ref(r) = sign_[r] * shifted;
      b_[r] = sign_[r] * row.rhs.get_d();
    }
    cost_.assign(n_, 0.0);
    for (const auto& t : lp.objective) cost_[t.index] = static_cast<double>(t.num) / static_cast<double>(t.den);
    basis_.resize(m_);
    basic_.assign(n_ + m_, 0);
    for (std::size_t r = 0; r < m_; ++r) {
      basis_[r] = n_ + r;
      basic_[n_ + r] = 1;
    }
    d_.assign(n_ + m_ + 1, 0.0);
  }

  double& at(std::size_t r, std::size_t j) { return t_[r * width_ + j]; }

  // Keeps a copy of [A | I | b] for later refactorization.
  void snapshot() {
    orig_.resize(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(width_));
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t j = 0; j < width_; ++j)
        orig_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = at(r, j);
  }

  // Recomputes the tableau as B^-1 [A | I | b] from the original data,
  // discarding the rounding error accumulated by pivoting.
  void refactor() {
    const auto m = static_cast<Eigen::Index>(m_);
    Eigen::MatrixXd basis(m, m);
    for (Eigen::Index r = 0; r < m; ++r) basis.col(r) = orig_.col(static_cast<Eigen::Index>(basis_[static_cast<std::size_t>(r)]));
    const Eigen::MatrixXd fresh = basis.partialPivLu().solve(orig_);
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t j = 0; j < width_; ++j) {
        const double v = fresh(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
        at(r, j) = std::abs(v) < 1e-14 ? 0.0 : v;
      }
    for (std::size_t r = 0; r < m_; ++r) at(r, basis_[r]) = 1.0;
  }

  // Basic values B^-1 b for the unperturbed b.
  void restore_rhs() {
    set_rhs_column(b_);
    refactor();
  }

  double min_basic_value() {
    double v = 0.0;
    for (std::size_t r = 0; r < m_; ++r) v = std::min(v, rhs_ref(r));
    return v;
  }
  double& rhs_ref(std::size_t r) { return t_[r * width_ + width_ - 1]; }
  void set_rhs_column(const std::vector<double>& v) {
    for (std::size_t r = 0; r < m_; ++r) orig_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(width_ - 1)) = v[r];
  }

  void set_phase_one() {
    std::fill(d_.begin(), d_.end(), 0.0);
    // d_j = c_j - c_B B^-1 A_j with c = -1 on artificials, basis all artificial.
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      for (std::size_t j = 0; j < width_; ++j) d_[j] += at(r, j);
    }
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] >= n_) d_[basis_[r]] = 0.0;
    for (std::size_t k = 0; k < m_; ++k)
      if (!is_basic(n_ + k)) d_[n_ + k] -= 1.0;
  }

  void set_phase_two() {
    for (std::size_t j = 0; j < width_; ++j) d_[j] = j < n_ ? cost_[j] : 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t b = basis_[r];
      const double cb = b < n_ ? cost_[b] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) d_[j] -= cb * at(r, j);
    }
  }

  bool is_basic(std::size_t j) const { return basic_[j] != 0; }

  void pivot(std::size_t r, std::size_t j) {
    double* pr = &t_[r * width_];
    const double inv = 1.0 / pr[j];
    nz_.clear();
    for (std::size_t k = 0; k < width_; ++k) {
      if (pr[k] == 0.0) continue;
      pr[k] *= inv;
      if (std::abs(pr[k]) < 1e-14) {
        pr[k] = 0.0;
        continue;
      }
      nz_.push_back(k);
    }
    pr[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* pi = &t_[i * width_];
      const double f = pi[j];
      if (f == 0.0) continue;
      for (std::size_t k : nz_) pi[k] -= f * pr[k];
      pi[j] = 0.0;
    }
    const double f = d_[j];
    if (f != 0.0)
      for (std::size_t k : nz_) d_[k] -= f * pr[k];
    d_[j] = 0.0;
    basic_[basis_[r]] = 0;
    basic_[j] = 1;
    basis_[r] = j;
    ++iterations_;
  }

  enum class Result { Optimal, Unbounded, IterationLimit };

  Result run(double tol, bool phase_one, std::size_t max_iter) {
    constexpr double kPivotTol = 1e-7;
    constexpr double kFeasTol = 1e-9;
    constexpr std::size_t kRefactorEvery = 400;
    std::size_t degenerate = 0;
    std::size_t since_refactor = 0;
    while (iterations_ < max_iter) {
      if (since_refactor == kRefactorEvery) {
        refactor();
        if (phase_one)
          set_phase_one();
        else
          set_phase_two();
        since_refactor = 0;
      }
      const bool bland = degenerate > 50;
      std::size_t enter = n_;
      double best = tol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (d_[j] <= tol || is_basic(j)) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (d_[j] > best) {
          best = d_[j];
          enter = j;
        }
      }
      if (enter == n_) return Result::Optimal;
      // Harris ratio test: the bound is relaxed by the feasibility
      // tolerance, then the largest pivot within the bound is taken.
      double bound = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a > kPivotTol) bound = std::min(bound, (std::max(rhs_ref(r), 0.0) + kFeasTol) / a);
      }
      if (bound == std::numeric_limits<double>::infinity()) return Result::Unbounded;
      std::size_t leave = m_;
      double pivot_mag = 0.0;
      double ratio = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol) continue;
        const double q = std::max(rhs_ref(r), 0.0) / a;
        if (q <= bound && a > pivot_mag) {
          pivot_mag = a;
          leave = r;
          ratio = q;
        }
      }
      degenerate = ratio <= tol ? degenerate + 1 : 0;
      pivot(leave, enter);
      ++since_refactor;
    }
    return Result::IterationLimit;
  }

  // Dual simplex from a dual feasible basis until the basic values are
  // nonnegative. Used after the perturbation is removed from the rhs.
  Result run_dual(double tol, std::size_t max_iter) {
    constexpr double kPivotTol = 1e-7;
    constexpr double kFeasTol = 1e-9;
    constexpr std::size_t kRefactorEvery = 400;
    std::size_t since_refactor = 0;
    while (iterations_ < max_iter) {
      if (since_refactor == kRefactorEvery) {
        refactor();
        set_phase_two();
        since_refactor = 0;
      }
      std::size_t leave = m_;
      double worst = -kFeasTol;
      for (std::size_t r = 0; r < m_; ++r)
        if (rhs_ref(r) < worst) {
          worst = rhs_ref(r);
          leave = r;
        }
      if (leave == m_) return Result::Optimal;
      // Harris pass on the dual ratios d_j / a_rj, both nonpositive/negative.
      double bound = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n_; ++j) {
        const double a = at(leave, j);
        if (is_basic(j) || a >= -kPivotTol) continue;
        bound = std::min(bound, (std::min(d_[j], 0.0) - tol) / a);
      }
      if (bound == std::numeric_limits<double>::infinity()) return Result::Unbounded;
      std::size_t enter = n_;
      double pivot_mag = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        const double a = at(leave, j);
        if (is_basic(j) || a >= -kPivotTol) continue;
        if (std::min(d_[j], 0.0) / a <= bound && -a > pivot_mag) {
          pivot_mag = -a;
          enter = j;
        }
      }
      pivot(leave, enter);
      ++since_refactor;
    }
    return Result::IterationLimit;
  }

  double artificial_mass() {
    double s = 0.0;
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] >= n_) s += std::abs(rhs_ref(r));
    return s;
  }

  void drive_out_artificials(double tol) {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      std::size_t best = n_;
      double mag = tol;
      for (std::size_t j = 0; j < n_; ++j) {
        const double a = std::abs(at(r, j));
        if (a > mag && !is_basic(j)) {
          mag = a;
          best = j;
        }
      }
      if (best < n_) pivot(r, best);
    }
  }

  FloatSolution extract() {
    FloatSolution s;
    s.primal.assign(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] < n_) {
        s.primal[basis_[r]] = std::max(rhs_ref(r), 0.0);
        s.basis.push_back(basis_[r]);
      }
    // Phase-two reduced cost of artificial k is -y_k.
    s.dual.resize(m_);
    for (std::size_t k = 0; k < m_; ++k) s.dual[k] = -d_[n_ + k] * sign_[k];
    s.iterations = iterations_;
    return s;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  std::size_t m_, n_, width_;
  std::vector<double> t_;
  Eigen::MatrixXd orig_;
  std::vector<double> sign_;
  std::vector<double> b_;
  std::vector<double> cost_;
  std::vector<double> d_;
  std::vector<std::size_t> basis_;
  std::vector<char> basic_;
  std::vector<std::size_t> nz_;
  std::size_t iterations_ = 0;
};

}  // namespace

FloatSolution solve_float(const RationalLP& lp, const std::vector<std::size_t>& rows, double tol) {
  Tableau tab(lp, rows, 1e-7);
  const std::size_t max_iter = 50 * (rows.size() + lp.num_variables()) + 1000;
  FloatSolution out;
  tab.snapshot();
  tab.set_phase_one();
  if (tab.run(tol, true, max_iter) == Tableau::Result::IterationLimit) {
    out.status = FloatSolution::Status::IterationLimit;
    return out;
  }
  if (tab.artificial_mass() > 1e-4) {
    out.status = FloatSolution::Status::Infeasible;
    return out;
  }
  tab.drive_out_artificials(1e-7);
  tab.refactor();
  tab.set_phase_two();
  auto res = tab.run(tol, false, max_iter);
  tab.restore_rhs();
  bool dual_failed = false;
  if (res == Tableau::Result::Optimal && tab.min_basic_value() < -1e-9) {
    tab.set_phase_two();
    res = tab.run_dual(tol, max_iter);
    dual_failed = res == Tableau::Result::Unbounded;
    tab.refactor();
    tab.set_phase_two();
  }
  out = tab.extract();
  if (dual_failed || (res == Tableau::Result::Optimal && tab.min_basic_value() < -1e-6))
    out.status = FloatSolution::Status::Infeasible;
  else if (res == Tableau::Result::Unbounded)
    out.status = FloatSolution::Status::Unbounded;
  if (res == Tableau::Result::IterationLimit) out.status = FloatSolution::Status::IterationLimit;
  return out;
}

}  // namespace nsring::detail
