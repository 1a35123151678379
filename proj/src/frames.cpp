#include "nsring/frames.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nsring {

FrameCollection::FrameCollection(std::vector<int> lengths) : lengths_(std::move(lengths)) {
  if (lengths_.empty()) throw std::invalid_argument("frame collection needs t >= 1");
  for (int s : lengths_)
    if (s < 1) throw std::invalid_argument("frame lengths must be >= 1");
}

int FrameCollection::total_length() const {
  return std::accumulate(lengths_.begin(), lengths_.end(), 0);
}

bool is_placable(const FrameCollection& frames, int gap, int n) {
  return frames.total_length() + gap * frames.count() <= n;
}

namespace {

// Gapped interval of frame j as integer endpoints [lo, hi] (before any mod).
std::pair<int, int> gapped_interval(int offset, int length, int gap) {
  return {offset - gap, offset + length - 1};
}

bool ring_intervals_disjoint(int n, const std::vector<std::pair<int, int>>& intervals) {
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (auto [lo, hi] : intervals) {
    if (hi - lo + 1 > n) return false;
    for (int x = lo; x <= hi; ++x) {
      const auto v = static_cast<std::size_t>(((x % n) + n) % n);
      if (used[v]) return false;
      used[v] = 1;
    }
  }
  return true;
}

}  // namespace

bool is_valid_placement(const FrameCollection& frames, const std::vector<int>& offsets, int gap,
                        const Context& context) {
  if (static_cast<int>(offsets.size()) != frames.count())
    throw std::invalid_argument("placement size does not match frame count");
  if (gap < 0) throw std::invalid_argument("gap must be >= 0");
  std::vector<std::pair<int, int>> intervals;
  for (int j = 0; j < frames.count(); ++j)
    intervals.push_back(gapped_interval(offsets[static_cast<std::size_t>(j)], frames.length(j), gap));
  if (context.is_ring()) return ring_intervals_disjoint(context.size, intervals);

  const int k = context.size;
  for (int j = 0; j < frames.count(); ++j) {
    const int w = offsets[static_cast<std::size_t>(j)];
    if (w < 1 || w + frames.length(j) - 1 > k) return false;
  }
  for (std::size_t a = 0; a < intervals.size(); ++a)
    for (std::size_t b = a + 1; b < intervals.size(); ++b)
      if (intervals[a].first <= intervals[b].second && intervals[b].first <= intervals[a].second)
        return false;
  return true;
}

namespace {

void extend_placements(const FrameCollection& frames, int gap, const Context& context,
                       std::vector<int>& offsets, std::vector<Placement>& out) {
  const auto j = static_cast<int>(offsets.size());
  if (j == frames.count()) {
    if (is_valid_placement(frames, offsets, gap, context)) out.push_back({offsets, gap, context});
    return;
  }
  int lo = 0, hi = context.size - 1;
  if (!context.is_ring()) {
    lo = 1;
    hi = context.size - frames.length(j) + 1;
  }
  for (int w = lo; w <= hi; ++w) {
    offsets.push_back(w);
    // Prune on the prefix: a prefix that already overlaps cannot be fixed.
    const FrameCollection prefix(std::vector<int>(frames.lengths().begin(),
                                                  frames.lengths().begin() + j + 1));
    if (is_valid_placement(prefix, offsets, gap, context))
      extend_placements(frames, gap, context, offsets, out);
    offsets.pop_back();
  }
}

}  // namespace

std::vector<Placement> placements(const FrameCollection& frames, int gap, const Context& context) {
  std::vector<Placement> out;
  std::vector<int> offsets;
  extend_placements(frames, gap, context, offsets, out);
  return out;
}

std::vector<Placement> placements_ring(const FrameCollection& frames, int gap, int n) {
  return placements(frames, gap, Context::ring(n));
}

std::vector<Placement> placements_segment(const FrameCollection& frames, int gap, int k) {
  return placements(frames, gap, Context::segment(k));
}

std::vector<int> observed_positions(const FrameCollection& frames, const Placement& placement) {
  std::vector<int> pos;
  const int size = placement.context.size;
  for (int j = 0; j < frames.count(); ++j) {
    const int w = placement.offsets[static_cast<std::size_t>(j)];
    for (int i = 0; i < frames.length(j); ++i) {
      if (placement.context.is_ring())
        pos.push_back(((w + i) % size + size) % size);
      else
        pos.push_back(w + i - 1);
    }
  }
  return pos;
}

Placement canonical_placement(const FrameCollection& frames, int gap, const Context& context) {
  Placement p{{}, gap, context};
  int w = context.is_ring() ? 0 : 1;
  for (int j = 0; j < frames.count(); ++j) {
    p.offsets.push_back(w);
    w += frames.length(j) + gap;
  }
  return p;
}

void for_each_consistent(int size, const std::vector<int>& observed,
                         const std::vector<Color>& flat_colors,
                         const std::function<void(PackedColoring)>& visit) {
  std::vector<char> is_observed(static_cast<std::size_t>(size), 0);
  PackedColoring base = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    is_observed[static_cast<std::size_t>(observed[i])] = 1;
    base += flat_colors[i] * pow3(size - 1 - observed[i]);
  }
  std::vector<PackedColoring> place;  // place values of free nodes
  for (int v = 0; v < size; ++v)
    if (!is_observed[static_cast<std::size_t>(v)]) place.push_back(pow3(size - 1 - v));
  // Odometer over the free nodes; the last free node is least significant,
  // so indices come out in increasing order.
  if (place.empty()) {
    visit(base);
    return;
  }
  std::vector<Color> digit(place.size(), 0);
  PackedColoring word = base;
  while (true) {
    visit(word);
    std::size_t i = place.size() - 1;
    while (true) {
      if (digit[i] < 2) {
        ++digit[i];
        word += place[i];
        break;
      }
      digit[i] = 0;
      word -= 2 * place[i];
      if (i == 0) return;
      --i;
    }
  }
}

std::vector<PackedColoring> consistent_colorings(const FrameCollection& frames,
                                                 const Placement& placement,
                                                 const TableauCollection& tableaux) {
  if (static_cast<int>(tableaux.size()) != frames.count())
    throw std::invalid_argument("tableau count does not match frame count");
  std::vector<Color> flat;
  for (int j = 0; j < frames.count(); ++j) {
    const auto& z = tableaux[static_cast<std::size_t>(j)];
    if (static_cast<int>(z.size()) != frames.length(j))
      throw std::invalid_argument("tableau length does not match frame length");
    flat.insert(flat.end(), z.begin(), z.end());
  }
  std::vector<PackedColoring> out;
  for_each_consistent(placement.context.size, observed_positions(frames, placement), flat,
                      [&](PackedColoring w) { out.push_back(w); });
  return out;
}

namespace {

void extend_collections(const Context& context, int gap, const ConstraintBudget& budget,
                        std::vector<int>& lengths, int target_count,
                        std::vector<FrameCollection>& out) {
  auto admissible = [&](const std::vector<int>& ls) {
    const int sum = std::accumulate(ls.begin(), ls.end(), 0);
    const int t = static_cast<int>(ls.size());
    if (budget.max_total_length && sum > *budget.max_total_length) return false;
    if (context.is_ring()) return sum + gap * t <= context.size;
    return sum + gap * (t - 1) <= context.size;
  };
  if (static_cast<int>(lengths.size()) == target_count) {
    out.emplace_back(lengths);
    return;
  }
  for (int s = 1; s <= context.size; ++s) {
    lengths.push_back(s);
    // Admissibility is monotone in the remaining frames (each adds >= 1).
    std::vector<int> padded = lengths;
    padded.resize(static_cast<std::size_t>(target_count), 1);
    if (!admissible(padded)) {
      lengths.pop_back();
      break;
    }
    extend_collections(context, gap, budget, lengths, target_count, out);
    lengths.pop_back();
  }
}

}  // namespace

std::vector<FrameCollection> frame_collections(const Context& context, int gap,
                                               const ConstraintBudget& budget) {
  std::vector<FrameCollection> out;
  const int max_t = budget.max_frames.value_or(context.size);
  for (int t = 1; t <= max_t; ++t) {
    std::vector<int> lengths;
    const auto before = out.size();
    extend_collections(context, gap, budget, lengths, t, out);
    if (out.size() == before) break;
  }
  return out;
}

namespace {

// Visits every tableau collection for F in lexicographic order of the
// flattened color string.
void for_each_tableau(const FrameCollection& frames,
                      const std::function<void(const TableauCollection&, const std::vector<Color>&)>&
                          visit) {
  const int total = frames.total_length();
  std::vector<Color> flat(static_cast<std::size_t>(total), 0);
  TableauCollection tabs(static_cast<std::size_t>(frames.count()));
  const std::uint64_t count = pow3(total);
  for (std::uint64_t w = 0; w < count; ++w) {
    unpack_colors(w, flat);
    std::size_t pos = 0;
    for (int j = 0; j < frames.count(); ++j) {
      auto& z = tabs[static_cast<std::size_t>(j)];
      z.assign(flat.begin() + static_cast<std::ptrdiff_t>(pos),
               flat.begin() + static_cast<std::ptrdiff_t>(pos) + frames.length(j));
      pos += static_cast<std::size_t>(frames.length(j));
    }
    visit(tabs, flat);
  }
}

}  // namespace

void generate_marginal_constraints(const Context& context, int gap, const ConstraintBudget& budget,
                                   const std::function<void(const MarginalConstraint&)>& emit) {
  std::set<std::pair<std::vector<PackedColoring>, std::vector<PackedColoring>>> seen;
  for (const auto& frames : frame_collections(context, gap, budget)) {
    const auto all = placements(frames, gap, context);
    const Placement anchor = canonical_placement(frames, gap, context);
    const auto anchor_pos = observed_positions(frames, anchor);
    for_each_tableau(frames, [&](const TableauCollection& tabs, const std::vector<Color>& flat) {
      std::vector<PackedColoring> lhs;
      for_each_consistent(context.size, anchor_pos, flat, [&](PackedColoring w) { lhs.push_back(w); });
      for (const auto& other : all) {
        if (other == anchor) continue;
        std::vector<PackedColoring> rhs;
        for_each_consistent(context.size, observed_positions(frames, other), flat,
                            [&](PackedColoring w) { rhs.push_back(w); });
        if (rhs == lhs) continue;
        if (!seen.emplace(lhs, std::move(rhs)).second) continue;
        emit(MarginalConstraint{frames, tabs, anchor, other});
      }
    });
  }
}

namespace {

std::string join_ints(const std::vector<int>& xs) {
  std::string s = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s + ")";
}

}  // namespace

std::string format_constraint(const MarginalConstraint& c) {
  std::ostringstream out;
  out << "F=" << join_ints(c.frames.lengths()) << " zeta=(";
  for (std::size_t j = 0; j < c.tableaux.size(); ++j) {
    if (j) out << ',';
    for (Color x : c.tableaux[j]) out << int(x);
  }
  out << ") omega=" << join_ints(c.anchor.offsets) << " omega'=" << join_ints(c.other.offsets);
  return out.str();
}

void dump_constraints(std::ostream& out, const Context& context, int gap,
                      const ConstraintBudget& budget) {
  generate_marginal_constraints(context, gap, budget, [&](const MarginalConstraint& c) {
    out << format_constraint(c) << '\n';
  });
}

}  // namespace nsring
