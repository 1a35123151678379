#pragma once

#include "nsring/lp.hpp"

#include <cstddef>
#include <vector>

namespace nsring::detail {

struct FloatSolution {
  enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };
  Status status = Status::Optimal;
  std::vector<double> primal;            // over all variables
  std::vector<double> dual;              // over the selected rows
  std::vector<std::size_t> basis;        // basic structural columns
  std::size_t iterations = 0;
};

/// Two-phase dense tableau simplex in double precision on the given rows.
FloatSolution solve_float(const RationalLP& lp, const std::vector<std::size_t>& rows, double tol);

}  // namespace nsring::detail
