#pragma once

#include "nsring/rational.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nsring::detail {

/// Square integer matrix given by sparse columns.
struct IntegerColumns {
  struct Entry {
    std::uint32_t row;
    Integer value;
  };
  std::size_t size = 0;
  std::vector<std::vector<Entry>> columns;
};

/// Exact solver for M z = v and M^T z = v with integer M: one LU
/// factorization modulo a 61-bit prime, p-adic lifting of the solution and
/// rational reconstruction, checked exactly before it is returned.
class LiftingSolver {
 public:
  /// Empty when M is singular modulo the prime.
  static std::optional<LiftingSolver> factor(const IntegerColumns& m);

  std::optional<std::vector<Rational>> solve(const std::vector<Integer>& v, bool transpose,
                                             std::size_t max_steps = 20000) const;

 private:
  explicit LiftingSolver(const IntegerColumns& m) : m_(&m) {}
  std::vector<std::uint64_t> solve_mod(std::vector<std::uint64_t> rhs, bool transpose) const;
  std::vector<Integer> apply(const std::vector<Integer>& z, bool transpose) const;

  const IntegerColumns* m_;
  std::size_t n_ = 0;
  std::vector<std::uint64_t> lu_;        // row-major, unit lower L below the diagonal
  std::vector<std::size_t> perm_;        // row i of PM is row perm_[i] of M
  std::vector<std::uint64_t> diag_inv_;
};

}  // namespace nsring::detail
