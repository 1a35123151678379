#include "nsring/ring_model.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nsring {

namespace {

void check_colors(std::span<const Color> colors) {
  for (Color c : colors)
    if (c >= kNumColors) throw std::invalid_argument("color outside {0,1,2}");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

std::uint64_t pow3(int e) {
  std::uint64_t p = 1;
  for (int i = 0; i < e; ++i) p *= 3;
  return p;
}

PackedColoring pack_colors(std::span<const Color> colors) {
  PackedColoring w = 0;
  for (Color c : colors) w = w * 3 + c;
  return w;
}

void unpack_colors(PackedColoring word, std::span<Color> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<Color>(word % 3);
    word /= 3;
  }
}

Coloring::Coloring(std::vector<Color> colors) : colors_(std::move(colors)) {
  if (colors_.size() < 3) throw std::invalid_argument("ring coloring needs n >= 3");
  check_colors(colors_);
}

Coloring Coloring::unpack(PackedColoring word, int n) {
  std::vector<Color> c(static_cast<std::size_t>(n));
  unpack_colors(word, c);
  return Coloring(std::move(c));
}

PackedColoring Coloring::pack() const { return pack_colors(colors_); }

SegmentColoring::SegmentColoring(std::vector<Color> colors) : colors_(std::move(colors)) {
  if (colors_.empty()) throw std::invalid_argument("segment coloring needs k >= 1");
  check_colors(colors_);
}

SegmentColoring SegmentColoring::unpack(PackedColoring word, int k) {
  std::vector<Color> c(static_cast<std::size_t>(k));
  unpack_colors(word, c);
  return SegmentColoring(std::move(c));
}

PackedColoring SegmentColoring::pack() const { return pack_colors(colors_); }

ColoringCounts count_colorings(int length) {
  if (length < 0) throw std::invalid_argument("segment length must be >= 0");
  Integer two_pow;
  mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, static_cast<unsigned long>(length));
  const int sign = (length % 2 == 0) ? 1 : -1;
  return {two_pow + 2 * sign, 2 * (two_pow - sign)};
}

bool is_proper_ring(std::span<const Color> colors) {
  const std::size_t n = colors.size();
  for (std::size_t v = 0; v < n; ++v)
    if (colors[v] == colors[(v + 1) % n]) return false;
  return true;
}

bool is_proper_ring(const Coloring& c) { return is_proper_ring(c.colors()); }

bool is_proper_segment(std::span<const Color> colors) {
  for (std::size_t i = 1; i < colors.size(); ++i)
    if (colors[i] == colors[i - 1]) return false;
  return true;
}

bool is_proper_segment(const SegmentColoring& c) { return is_proper_segment(c.colors()); }

std::vector<Coloring> enumerate_proper_ring(int n) {
  if (n < 3) throw std::invalid_argument("enumerate_proper_ring: n must be >= 3");
  std::vector<Coloring> out;
  for_each_proper_ring(n, [&](std::span<const Color> c) {
    out.emplace_back(std::vector<Color>(c.begin(), c.end()));
  });
  return out;
}

std::vector<SegmentColoring> enumerate_proper_segment(int k) {
  if (k < 1) throw std::invalid_argument("enumerate_proper_segment: k must be >= 1");
  std::vector<SegmentColoring> out;
  for_each_proper_segment(k, [&](std::span<const Color> c) {
    out.emplace_back(std::vector<Color>(c.begin(), c.end()));
  });
  return out;
}

Rational uniform_same_color_prob(int n, int d) {
  if (n < 3 || d < 1 || d > n - 1)
    throw std::invalid_argument("uniform_same_color_prob: need n >= 3, 1 <= d <= n-1");
  Rational p(count_colorings(d).a * count_colorings(n - d).a, 3 * count_colorings(n).a);
  p.canonicalize();
  return p;
}

Rational BetaVectorRing::entry(int d) const {
  if (d < 2 || d > n - 2) throw std::out_of_range("beta distance outside 2..n-2");
  Rational q(counts[static_cast<std::size_t>(d - 2)], n);
  q.canonicalize();
  return q;
}

int segment_pair_count(int k) { return k >= 3 ? (k - 1) * (k - 2) / 2 : 0; }

int segment_pair_index(int k, int u, int v) {
  if (u < 1 || v < u + 2 || v > k) throw std::out_of_range("segment pair out of range");
  // Pairs with first node u' < u: sum over u' of (k - u' - 1).
  int idx = 0;
  for (int w = 1; w < u; ++w) idx += k - w - 1;
  return idx + (v - u - 2);
}

std::vector<NodePair> segment_pairs(int k) {
  std::vector<NodePair> pairs;
  for (int u = 1; u <= k; ++u)
    for (int v = u + 2; v <= k; ++v) pairs.push_back({u, v});
  return pairs;
}

std::uint8_t BetaVectorSegment::entry(int u, int v) const {
  return bits[static_cast<std::size_t>(segment_pair_index(k, u, v))];
}

BetaVectorRing beta_ring(std::span<const Color> colors) {
  const int n = static_cast<int>(colors.size());
  BetaVectorRing b;
  b.n = n;
  b.counts.assign(static_cast<std::size_t>(std::max(0, n - 3)), 0);
  for (int d = 2; d <= n - 2; ++d) {
    int count = 0;
    for (int v = 0; v < n; ++v)
      count += colors[static_cast<std::size_t>(v)] == colors[static_cast<std::size_t>((v + d) % n)];
    b.counts[static_cast<std::size_t>(d - 2)] = count;
  }
  return b;
}

BetaVectorRing beta_ring(const Coloring& c) { return beta_ring(c.colors()); }

BetaVectorSegment beta_segment(std::span<const Color> colors) {
  const int k = static_cast<int>(colors.size());
  BetaVectorSegment b;
  b.k = k;
  b.bits.reserve(static_cast<std::size_t>(segment_pair_count(k)));
  for (int u = 0; u < k; ++u)
    for (int v = u + 2; v < k; ++v)
      b.bits.push_back(colors[static_cast<std::size_t>(u)] == colors[static_cast<std::size_t>(v)]);
  return b;
}

BetaVectorSegment beta_segment(const SegmentColoring& c) { return beta_segment(c.colors()); }

std::vector<BetaVectorRing> distinct_beta_set_ring(int n, bool proper_only) {
  if (n < 5) throw std::invalid_argument("distinct_beta_set_ring: n must be >= 5");
  std::vector<BetaVectorRing> all;
  if (proper_only) {
    // Beta vectors are invariant under recoloring, so the normalized sixth
    // of the proper colorings already yields every vector.
    for_each_proper_ring_normalized(n, [&](std::span<const Color> c) {
      all.push_back(beta_ring(c));
      if (all.size() > (std::size_t{1} << 20)) {
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
      }
    });
  } else {
    // Fix node 0 to color 0 for the same reason.
    std::vector<Color> c(static_cast<std::size_t>(n));
    const std::uint64_t total = pow3(n - 1);
    for (std::uint64_t w = 0; w < total; ++w) {
      unpack_colors(w, c);
      all.push_back(beta_ring(c));
      if (all.size() > (std::size_t{1} << 20)) {
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
      }
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::vector<BetaVectorSegment> distinct_beta_set_segment(int k, bool proper_only) {
  if (k < 4) throw std::invalid_argument("distinct_beta_set_segment: k must be >= 4");
  std::vector<BetaVectorSegment> all;
  if (proper_only) {
    for_each_proper_segment_normalized(k, [&](std::span<const Color> c) {
      all.push_back(beta_segment(c));
    });
  } else {
    std::vector<Color> c(static_cast<std::size_t>(k));
    const std::uint64_t total = pow3(k - 1);
    for (std::uint64_t w = 0; w < total; ++w) {
      unpack_colors(w, c);
      all.push_back(beta_segment(c));
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

void write_beta_csv(std::ostream& out, const std::vector<BetaVectorRing>& set) {
  if (set.empty()) return;
  const int n = set.front().n;
  for (int d = 2; d <= n - 2; ++d) out << (d > 2 ? "," : "") << "d=" << d;
  out << '\n';
  for (const auto& b : set) {
    for (int d = 2; d <= n - 2; ++d) out << (d > 2 ? "," : "") << to_string(b.entry(d));
    out << '\n';
  }
}

void write_beta_csv(std::ostream& out, const std::vector<BetaVectorSegment>& set) {
  if (set.empty()) return;
  const auto pairs = segment_pairs(set.front().k);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out << (i ? "," : "") << pairs[i].u << ':' << pairs[i].v;
  out << '\n';
  for (const auto& b : set) {
    for (std::size_t i = 0; i < b.bits.size(); ++i) out << (i ? "," : "") << int(b.bits[i]) << "/1";
    out << '\n';
  }
}

std::vector<BetaVectorRing> read_beta_ring_csv(std::istream& in, int n) {
  std::vector<BetaVectorRing> set;
  std::string line;
  if (!std::getline(in, line)) return set;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != n - 3) throw std::runtime_error("beta csv: bad row width");
    BetaVectorRing b;
    b.n = n;
    for (const auto& cell : cells) {
      Rational q = parse_rational(cell) * n;
      if (q.get_den() != 1) throw std::runtime_error("beta csv: entry not a multiple of 1/n");
      b.counts.push_back(static_cast<int>(q.get_num().get_si()));
    }
    set.push_back(std::move(b));
  }
  return set;
}

std::vector<BetaVectorSegment> read_beta_segment_csv(std::istream& in, int k) {
  std::vector<BetaVectorSegment> set;
  std::string line;
  if (!std::getline(in, line)) return set;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != segment_pair_count(k))
      throw std::runtime_error("beta csv: bad row width");
    BetaVectorSegment b;
    b.k = k;
    for (const auto& cell : cells) {
      Rational q = parse_rational(cell);
      if (q != 0 && q != 1) throw std::runtime_error("beta csv: segment entry not 0 or 1");
      b.bits.push_back(q == 1);
    }
    set.push_back(std::move(b));
  }
  return set;
}

CyclicClassTable cyclic_classes(int n) {
  if (n < 3) throw std::invalid_argument("cyclic_classes: n must be >= 3");
  if (n > 20) throw std::invalid_argument("cyclic_classes: n too large for a dense table");
  CyclicClassTable table;
  table.n = n;
  const std::uint64_t total = pow3(n);
  const std::uint64_t top = pow3(n - 1);
  constexpr std::uint32_t kUnassigned = ~std::uint32_t{0};
  table.class_of.assign(total, kUnassigned);
  std::vector<Color> colors(static_cast<std::size_t>(n));
  for (std::uint64_t w = 0; w < total; ++w) {
    if (table.class_of[w] != kUnassigned) continue;
    // Scanning upward, the first member seen is the smallest rotation.
    const auto id = static_cast<std::uint32_t>(table.classes.size());
    int size = 0;
    std::uint64_t x = w;
    do {
      table.class_of[x] = id;
      ++size;
      // Rotate left by one node: the leading digit moves to the end.
      x = (x % top) * 3 + x / top;
    } while (x != w);
    unpack_colors(w, colors);
    table.classes.push_back({w, size, is_proper_ring(colors)});
  }
  return table;
}

}  // namespace nsring
