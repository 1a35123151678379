#pragma once

#include "nsring/lp.hpp"

#include <vector>

namespace nsring::detail {

/// Revised simplex over the rationals on a fixed subset of rows with an
/// explicit dense basis inverse. Columns n..n+m-1 are the artificials.
class ExactTableau {
 public:
  enum class Phase { One, Two };
  enum class PhaseResult { Optimal, Unbounded };

  ExactTableau(const RationalLP& lp, const std::vector<std::size_t>& rows);

  /// Pivots the given structural columns into artificial slots; returns
  /// false (and restores the artificial basis) when the result is infeasible.
  bool apply_warm_start(const std::vector<std::size_t>& columns);
  PhaseResult run_phase(Phase phase, const ExactOptions& options);
  void drive_out_artificials();

  std::vector<Rational> primal() const;
  /// Duals of the selected rows in the LP's original row signs.
  std::vector<Rational> row_duals() const;
  Rational artificial_sum() const;
  std::vector<std::size_t> basic_structural() const;
  std::size_t iterations() const { return iterations_; }

 private:
  struct Entry {
    std::size_t row;
    Rational value;
  };

  void reset_to_artificial_basis();
  std::vector<Rational> column(std::size_t j) const;
  void pivot(std::size_t r, std::size_t j, const std::vector<Rational>& u);
  std::vector<Rational> duals(const std::vector<Rational>& basic_costs) const;
  Rational phase_cost(std::size_t j, Phase phase) const;
  std::vector<Rational> reduced_costs_scaled(const std::vector<Rational>& y, Phase phase,
                                             Integer& scale) const;

  std::size_t m_;
  std::size_t n_;
  std::vector<std::size_t> row_ids_;
  std::vector<std::vector<Entry>> columns_;
  std::vector<int> sign_;
  std::vector<Rational> b_;
  std::vector<Rational> cost_;
  std::vector<bool> integral_;

  std::vector<std::size_t> basis_;
  std::vector<bool> is_basic_;
  std::vector<std::vector<Rational>> binv_;
  std::vector<Rational> x_;
  std::size_t iterations_ = 0;
};

}  // namespace nsring::detail
