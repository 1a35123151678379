#pragma once

#include "nsring/rational.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nsring {

using Color = std::uint8_t;
inline constexpr int kNumColors = 3;

// Packed colorings are base-3 words with node 0 as the most significant
// digit, so numeric order on packed words is lexicographic order on colors.
using PackedColoring = std::uint64_t;

/// Coloring of the directed ring Z_n. Node v is followed by v+1 mod n.
class Coloring {
 public:
  explicit Coloring(std::vector<Color> colors);
  static Coloring unpack(PackedColoring word, int n);

  int size() const { return static_cast<int>(colors_.size()); }
  Color operator[](int v) const { return colors_[static_cast<std::size_t>(v)]; }
  std::span<const Color> colors() const { return colors_; }
  PackedColoring pack() const;

  friend bool operator==(const Coloring&, const Coloring&) = default;

 private:
  std::vector<Color> colors_;
};

/// Coloring of a line segment of k nodes. The public API numbers segment
/// nodes 1..k; operator[] takes the 0-based array position.
class SegmentColoring {
 public:
  explicit SegmentColoring(std::vector<Color> colors);
  static SegmentColoring unpack(PackedColoring word, int k);

  int size() const { return static_cast<int>(colors_.size()); }
  Color operator[](int i) const { return colors_[static_cast<std::size_t>(i)]; }
  Color at_node(int u) const { return colors_[static_cast<std::size_t>(u - 1)]; }
  std::span<const Color> colors() const { return colors_; }
  PackedColoring pack() const;

  friend bool operator==(const SegmentColoring&, const SegmentColoring&) = default;

 private:
  std::vector<Color> colors_;
};

std::uint64_t pow3(int e);
PackedColoring pack_colors(std::span<const Color> colors);
void unpack_colors(PackedColoring word, std::span<Color> out);

/// Proper segment colorings of length l (l+1 nodes) split by endpoints:
/// a = equal endpoint colors, b = different endpoint colors.
struct ColoringCounts {
  Integer a;
  Integer b;
};
ColoringCounts count_colorings(int length);

bool is_proper_ring(std::span<const Color> colors);
bool is_proper_ring(const Coloring& c);
bool is_proper_segment(std::span<const Color> colors);
bool is_proper_segment(const SegmentColoring& c);

/// Visits every proper coloring of the n-ring (n >= 3) exactly once.
///
/// Colorings are generated from step strings in {1,2}^(n-2) starting at
/// (1,0), keeping those whose wrap-around edge is proper, and expanding each
/// over the six color permutations. The visit order is deterministic:
/// step strings in increasing binary order, permutations in lexicographic
/// order. The visitor receives a span valid only during the call.
template <class Visitor>
void for_each_proper_ring(int n, Visitor&& visit);

/// Visits the proper colorings that start with colors (1,0), one per
/// color-permutation class. Any statistic invariant under recoloring can be
/// computed from this sixth of the set.
template <class Visitor>
void for_each_proper_ring_normalized(int n, Visitor&& visit);

/// Visits the 3*2^(k-1) proper colorings of a k-node segment (k >= 1),
/// first color outermost, then step strings in increasing binary order.
template <class Visitor>
void for_each_proper_segment(int k, Visitor&& visit);

/// Proper segment colorings starting with colors (0,1); one per
/// color-permutation class (k >= 2).
template <class Visitor>
void for_each_proper_segment_normalized(int k, Visitor&& visit);

std::vector<Coloring> enumerate_proper_ring(int n);
std::vector<SegmentColoring> enumerate_proper_segment(int k);

/// a_d a_{n-d} / (3 a_n): same-color probability of two nodes at distance d
/// under the uniform distribution over proper colorings of the n-ring.
Rational uniform_same_color_prob(int n, int d);

/// Same-color counts of a ring coloring by distance d = 2..n-2.
/// entry(d) = counts[d-2] / n.
struct BetaVectorRing {
  int n = 0;
  std::vector<int> counts;

  Rational entry(int d) const;
  auto operator<=>(const BetaVectorRing&) const = default;
};

/// Same-color indicators of a segment coloring over node pairs (u,v),
/// 1 <= u, u+2 <= v <= k, ordered lexicographically by (u,v).
struct BetaVectorSegment {
  int k = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t entry(int u, int v) const;
  auto operator<=>(const BetaVectorSegment&) const = default;
};

/// Number of non-adjacent pairs (u,v), u < v, on a k-node segment.
int segment_pair_count(int k);
/// Position of pair (u,v) in BetaVectorSegment::bits.
int segment_pair_index(int k, int u, int v);
struct NodePair {
  int u;
  int v;
};
std::vector<NodePair> segment_pairs(int k);

BetaVectorRing beta_ring(std::span<const Color> colors);
BetaVectorRing beta_ring(const Coloring& c);
BetaVectorSegment beta_segment(std::span<const Color> colors);
BetaVectorSegment beta_segment(const SegmentColoring& c);

/// Sorted, deduplicated beta vectors over proper (or all) colorings.
std::vector<BetaVectorRing> distinct_beta_set_ring(int n, bool proper_only);
std::vector<BetaVectorSegment> distinct_beta_set_segment(int k, bool proper_only);

void write_beta_csv(std::ostream& out, const std::vector<BetaVectorRing>& set);
void write_beta_csv(std::ostream& out, const std::vector<BetaVectorSegment>& set);
std::vector<BetaVectorRing> read_beta_ring_csv(std::istream& in, int n);
std::vector<BetaVectorSegment> read_beta_segment_csv(std::istream& in, int k);

/// Partition of all 3^n ring colorings into rotation orbits.
struct CyclicClass {
  PackedColoring representative;  // lexicographically smallest rotation
  int orbit_size;
  bool proper;
};
struct CyclicClassTable {
  int n = 0;
  std::vector<CyclicClass> classes;
  std::vector<std::uint32_t> class_of;  // indexed by packed coloring
};
CyclicClassTable cyclic_classes(int n);

// ---------------------------------------------------------------------------

template <class Visitor>
void for_each_proper_ring_normalized(int n, Visitor&& visit) {
  std::vector<Color> phi(static_cast<std::size_t>(n));
  phi[0] = 1;
  phi[1] = 0;
  const std::uint64_t strings = std::uint64_t{1} << (n - 2);
  for (std::uint64_t i = 0; i < strings; ++i) {
    // Most significant bit is the first step, as with IntegerDigits.
    Color c = 0;
    for (int j = 0; j < n - 2; ++j) {
      const unsigned step = 1U + static_cast<unsigned>((i >> (n - 3 - j)) & 1U);
      c = static_cast<Color>((c + step) % 3);
      phi[static_cast<std::size_t>(j + 2)] = c;
    }
    if (phi[static_cast<std::size_t>(n - 1)] == 1) continue;
    visit(std::span<const Color>(phi));
  }
}

namespace detail {
inline constexpr Color kColorPermutations[6][3] = {
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
}

template <class Visitor>
void for_each_proper_ring(int n, Visitor&& visit) {
  std::vector<Color> out(static_cast<std::size_t>(n));
  for_each_proper_ring_normalized(n, [&](std::span<const Color> phi) {
    for (const auto& perm : detail::kColorPermutations) {
      for (std::size_t v = 0; v < phi.size(); ++v) out[v] = perm[phi[v]];
      visit(std::span<const Color>(out));
    }
  });
}

template <class Visitor>
void for_each_proper_segment(int k, Visitor&& visit) {
  std::vector<Color> psi(static_cast<std::size_t>(k));
  const std::uint64_t strings = std::uint64_t{1} << (k - 1);
  for (Color first = 0; first < kNumColors; ++first) {
    psi[0] = first;
    for (std::uint64_t i = 0; i < strings; ++i) {
      Color c = first;
      for (int j = 0; j < k - 1; ++j) {
        const unsigned step = 1U + static_cast<unsigned>((i >> (k - 2 - j)) & 1U);
        c = static_cast<Color>((c + step) % 3);
        psi[static_cast<std::size_t>(j + 1)] = c;
      }
      visit(std::span<const Color>(psi));
    }
  }
}

template <class Visitor>
void for_each_proper_segment_normalized(int k, Visitor&& visit) {
  std::vector<Color> psi(static_cast<std::size_t>(k));
  psi[0] = 0;
  psi[1] = 1;
  const std::uint64_t strings = std::uint64_t{1} << (k - 2);
  for (std::uint64_t i = 0; i < strings; ++i) {
    Color c = 1;
    for (int j = 0; j < k - 2; ++j) {
      const unsigned step = 1U + static_cast<unsigned>((i >> (k - 3 - j)) & 1U);
      c = static_cast<Color>((c + step) % 3);
      psi[static_cast<std::size_t>(j + 2)] = c;
    }
    visit(std::span<const Color>(psi));
  }
}

}  // namespace nsring
