#include "nsring/lp.hpp"

#include "modular.hpp"

#include <algorithm>

namespace nsring {

std::vector<std::size_t> select_independent_rows(const RationalLP& lp) {
  const std::size_t ncols = lp.num_variables();
  std::vector<std::size_t> order;
  order.reserve(lp.num_rows());
  if (lp.normalization_row) order.push_back(*lp.normalization_row);
  for (std::size_t i = 0; i < lp.num_rows(); ++i)
    if (!lp.normalization_row || i != *lp.normalization_row) order.push_back(i);

  // Reduced row echelon basis. Basis rows are zero on every pivot column
  // except their own, so a candidate row is reduced by one pass over the
  // pivot columns in its original support, touching only free columns.
  std::vector<std::int64_t> pivot_row_of(ncols, -1);
  std::vector<std::vector<std::uint64_t>> basis;
  std::vector<std::size_t> free_cols(ncols);
  for (std::size_t c = 0; c < ncols; ++c) free_cols[c] = c;

  std::vector<std::size_t> selected;
  std::vector<std::uint64_t> v(ncols, 0);
  for (std::size_t i : order) {
    const auto& terms = lp.rows[i].terms;
    if (terms.empty()) continue;
    for (std::size_t c : free_cols) v[c] = 0;
    std::vector<std::pair<std::size_t, std::uint64_t>> pivot_hits;
    for (const auto& t : terms) {
      const std::uint64_t a = modp::from_fraction(t.num, t.den);
      if (pivot_row_of[t.index] >= 0)
        pivot_hits.emplace_back(t.index, a);
      else
        v[t.index] = a;
    }
    for (auto [col, a] : pivot_hits) {
      const auto& b = basis[static_cast<std::size_t>(pivot_row_of[col])];
      for (std::size_t c : free_cols)
        if (b[c]) v[c] = modp::sub(v[c], modp::mul(a, b[c]));
    }
    std::size_t lead = ncols;
    for (std::size_t c : free_cols)
      if (v[c]) {
        lead = c;
        break;
      }
    if (lead == ncols) continue;

    const std::uint64_t scale = modp::inv(v[lead]);
    std::vector<std::uint64_t> row(ncols, 0);
    for (std::size_t c : free_cols)
      if (v[c]) row[c] = modp::mul(v[c], scale);
    // Clear the new pivot column from the existing basis rows.
    for (auto& b : basis) {
      const std::uint64_t f = b[lead];
      if (!f) continue;
      for (std::size_t c : free_cols)
        if (row[c]) b[c] = modp::sub(b[c], modp::mul(f, row[c]));
      b[lead] = 0;
    }
    row[lead] = 1;
    pivot_row_of[lead] = static_cast<std::int64_t>(basis.size());
    basis.push_back(std::move(row));
    free_cols.erase(std::find(free_cols.begin(), free_cols.end(), lead));
    selected.push_back(i);
    if (free_cols.empty()) break;
  }
  return selected;
}

}  // namespace nsring
