#include "nsring/nonsignal_lp.hpp"

#include "nsring/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace nsring {

namespace {

// Digit-level group generators. Each maps a coloring to its image in place.
using Digits = std::vector<Color>;

void rotate_once(Digits& d) { std::rotate(d.begin(), d.begin() + 1, d.end()); }
void swap_01(Digits& d) {
  for (auto& c : d)
    if (c < 2) c = static_cast<Color>(1 - c);
}
void cycle_colors(Digits& d) {
  for (auto& c : d) c = static_cast<Color>((c + 1) % 3);
}
void reverse_nodes(Digits& d) { std::reverse(d.begin(), d.end()); }

}  // namespace

OrbitTable orbit_table(const Context& context, const Symmetries& symmetries) {
  if (symmetries.rotation && !context.is_ring())
    throw std::invalid_argument("rotation symmetry requires a ring context");
  const int size = context.size;
  if (size < 1 || size > 20) throw std::invalid_argument("orbit table size must be in 1..20");
  std::vector<void (*)(Digits&)> gens;
  if (symmetries.rotation) gens.push_back(rotate_once);
  if (symmetries.colors) {
    gens.push_back(swap_01);
    gens.push_back(cycle_colors);
  }
  if (symmetries.reflection) gens.push_back(reverse_nodes);

  OrbitTable t;
  t.context = context;
  t.symmetries = symmetries;
  const std::uint64_t total = pow3(size);
  constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  t.class_of.assign(total, kUnset);
  Digits digits(static_cast<std::size_t>(size));
  std::vector<PackedColoring> stack;
  for (PackedColoring w = 0; w < total; ++w) {
    if (t.class_of[w] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(t.representative.size());
    std::uint32_t members = 0;
    t.class_of[w] = id;
    stack.assign(1, w);
    while (!stack.empty()) {
      const PackedColoring x = stack.back();
      stack.pop_back();
      ++members;
      for (auto g : gens) {
        unpack_colors(x, digits);
        g(digits);
        const PackedColoring y = pack_colors(digits);
        if (t.class_of[y] == kUnset) {
          t.class_of[y] = id;
          stack.push_back(y);
        }
      }
    }
    unpack_colors(w, digits);
    t.representative.push_back(w);
    t.orbit_size.push_back(members);
    t.proper.push_back(context.is_ring() ? is_proper_ring(digits) : is_proper_segment(digits));
  }
  return t;
}

namespace {

// A row as interleaved (variable, coefficient) pairs, sorted by variable,
// divided by the gcd of its coefficients, first coefficient positive.
using RowKey = std::vector<std::int64_t>;

struct RowKeyHash {
  std::size_t operator()(const RowKey& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto v : k) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

void normalize(RowKey& key) {
  std::int64_t g = 0;
  for (std::size_t i = 1; i < key.size(); i += 2) g = std::gcd(g, key[i]);
  if (key[1] < 0) g = -g;
  for (std::size_t i = 1; i < key.size(); i += 2) key[i] /= g;
}

// Colors appear in first-occurrence order 0, 1, 2.
bool color_canonical(const std::vector<Color>& flat) {
  Color next = 0;
  for (Color c : flat) {
    if (c > next) return false;
    if (c == next) ++next;
  }
  return true;
}

class RowCollector {
 public:
  void add(RowKey key) {
    if (key.empty()) return;
    normalize(key);
    if (seen_.insert(key).second) rows_.push_back(std::move(key));
  }
  std::vector<RowKey>& rows() { return rows_; }

 private:
  std::unordered_set<RowKey, RowKeyHash> seen_;
  std::vector<RowKey> rows_;
};

std::vector<RowKey> frame_rows(const OrbitTable& orbits, const FrameCollection& frames, int gap) {
  const Context& ctx = orbits.context;
  std::vector<Placement> others;
  const Placement anchor = canonical_placement(frames, gap, ctx);
  for (auto& p : placements(frames, gap, ctx)) {
    if (p == anchor) continue;
    // Rotations of a placement give the same marginal in orbit variables.
    if (orbits.symmetries.rotation && p.offsets[0] != 0) continue;
    others.push_back(std::move(p));
  }
  RowCollector out;
  if (others.empty()) return {};
  const auto anchor_pos = observed_positions(frames, anchor);
  std::vector<std::vector<int>> other_pos;
  for (const auto& p : others) other_pos.push_back(observed_positions(frames, p));

  std::vector<std::int64_t> acc(orbits.count(), 0);
  std::vector<char> mark(orbits.count(), 0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> anchor_count;
  auto touch = [&](std::uint32_t c, std::int64_t delta) {
    if (!mark[c]) {
      mark[c] = 1;
      touched.push_back(c);
    }
    acc[c] += delta;
  };

  const int total = frames.total_length();
  std::vector<Color> flat(static_cast<std::size_t>(total));
  const std::uint64_t tableaux = pow3(total);
  for (std::uint64_t z = 0; z < tableaux; ++z) {
    unpack_colors(z, flat);
    if (orbits.symmetries.colors && !color_canonical(flat)) continue;
    anchor_count.clear();
    for_each_consistent(ctx.size, anchor_pos, flat,
                        [&](PackedColoring w) { anchor_count.push_back(orbits.class_of[w]); });
    for (const auto& pos : other_pos) {
      for (auto c : anchor_count) touch(c, -1);
      for_each_consistent(ctx.size, pos, flat, [&](PackedColoring w) { touch(orbits.class_of[w], 1); });
      std::sort(touched.begin(), touched.end());
      RowKey key;
      for (auto c : touched) {
        if (acc[c] != 0) {
          key.push_back(c);
          key.push_back(acc[c]);
        }
        acc[c] = 0;
        mark[c] = 0;
      }
      touched.clear();
      out.add(std::move(key));
    }
  }
  return std::move(out.rows());
}

std::vector<RowKey> rotation_rows(const OrbitTable& orbits) {
  RowCollector out;
  const int n = orbits.context.size;
  Digits digits(static_cast<std::size_t>(n));
  for (std::uint32_t i = 0; i < orbits.count(); ++i) {
    unpack_colors(orbits.representative[i], digits);
    // phi o Prev: node v takes the color of node v-1.
    std::rotate(digits.rbegin(), digits.rbegin() + 1, digits.rend());
    const std::uint32_t j = orbits.class_of[pack_colors(digits)];
    if (i == j) continue;
    RowKey key = i < j ? RowKey{i, 1, j, -1} : RowKey{j, -1, i, 1};
    out.add(std::move(key));
  }
  return std::move(out.rows());
}

std::string label(const OrbitTable& orbits, std::uint32_t i) {
  std::vector<Color> digits(static_cast<std::size_t>(orbits.context.size));
  unpack_colors(orbits.representative[i], digits);
  std::string s;
  for (Color c : digits) s += static_cast<char>('0' + c);
  return s;
}

NonsignalLP assemble(OrbitTable orbits, int gap, const std::vector<FrameCollection>& frames,
                     bool explicit_rotation, unsigned threads) {
  std::vector<std::vector<RowKey>> per_frame(frames.size());
  parallel_for(frames.size(), threads,
               [&](std::size_t i) { per_frame[i] = frame_rows(orbits, frames[i], gap); });

  NonsignalLP model;
  model.gap = gap;
  RationalLP& lp = model.lp;
  for (std::uint32_t i = 0; i < orbits.count(); ++i) lp.variables.push_back(label(orbits, i));
  Row norm;
  for (std::uint32_t i = 0; i < orbits.count(); ++i) {
    norm.terms.push_back({i, orbits.orbit_size[i], 1});
    if (orbits.proper[i]) lp.objective.push_back({i, orbits.orbit_size[i], 1});
  }
  norm.rhs = 1;
  lp.rows.push_back(std::move(norm));
  lp.normalization_row = 0;

  RowCollector merged;
  if (explicit_rotation)
    for (auto& k : rotation_rows(orbits)) merged.add(std::move(k));
  for (auto& rows : per_frame)
    for (auto& k : rows) merged.add(std::move(k));
  for (const auto& k : merged.rows()) {
    Row row;
    for (std::size_t i = 0; i < k.size(); i += 2)
      row.terms.push_back({static_cast<std::uint32_t>(k[i]), k[i + 1], 1});
    lp.rows.push_back(std::move(row));
  }
  model.orbits = std::move(orbits);
  return model;
}

}  // namespace

NonsignalLP build_ring_lp(int n, int r, bool use_cyclic_classes, bool use_color_symmetry,
                          const BuildOptions& options) {
  if (n < 3) throw std::invalid_argument("ring LP needs n >= 3");
  if (r < 0) throw std::invalid_argument("gap r must be >= 0");
  const Context ctx = Context::ring(n);
  auto orbits = orbit_table(ctx, {use_cyclic_classes, use_color_symmetry, options.reflection});
  std::vector<FrameCollection> frames;
  for (auto& f : frame_collections(ctx, r, options.budget))
    if (!use_cyclic_classes || f.count() >= 2) frames.push_back(std::move(f));
  return assemble(std::move(orbits), r, frames, !use_cyclic_classes, options.threads);
}

NonsignalLP build_segment_lp(int k, int r, bool use_color_symmetry, const BuildOptions& options) {
  if (k < 2) throw std::invalid_argument("segment LP needs k >= 2");
  if (r < 0) throw std::invalid_argument("gap r must be >= 0");
  const Context ctx = Context::segment(k);
  auto orbits = orbit_table(ctx, {false, use_color_symmetry, options.reflection});
  return assemble(std::move(orbits), r, frame_collections(ctx, r, options.budget), false, options.threads);
}

std::vector<Rational> expand_distribution(const NonsignalLP& model, const std::vector<Rational>& x) {
  if (x.size() != model.orbits.count()) throw std::invalid_argument("solution size does not match orbit count");
  std::vector<Rational> p(model.orbits.class_of.size());
  for (std::size_t w = 0; w < p.size(); ++w) p[w] = x[model.orbits.class_of[w]];
  return p;
}

}  // namespace nsring
