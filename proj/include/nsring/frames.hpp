#pragma once

#include "nsring/ring_model.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nsring {

/// Where frames live: the n-node ring (nodes 0..n-1, arithmetic mod n) or a
/// k-node line segment (nodes 1..k).
struct Context {
  enum class Kind { Ring, Segment };
  Kind kind = Kind::Ring;
  int size = 0;

  static Context ring(int n) { return {Kind::Ring, n}; }
  static Context segment(int k) { return {Kind::Segment, k}; }
  bool is_ring() const { return kind == Kind::Ring; }
  friend bool operator==(const Context&, const Context&) = default;
};

/// Tuple of sliding-frame lengths (s_1, ..., s_t), t >= 1, s_j >= 1.
class FrameCollection {
 public:
  explicit FrameCollection(std::vector<int> lengths);

  int count() const { return static_cast<int>(lengths_.size()); }
  int length(int j) const { return lengths_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& lengths() const { return lengths_; }
  int total_length() const;

  friend auto operator<=>(const FrameCollection&, const FrameCollection&) = default;

 private:
  std::vector<int> lengths_;
};

/// Offsets of each frame of a collection. Ring offsets are nodes of Z_n;
/// segment offsets are 1-based node numbers.
struct Placement {
  std::vector<int> offsets;
  int gap = 0;
  Context context;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// One color string per frame.
using Tableau = std::vector<Color>;
using TableauCollection = std::vector<Tableau>;

/// sum_j (s_j + r) <= n.
bool is_placable(const FrameCollection& frames, int gap, int n);

/// Ring: gapped intervals omega_j + (-r..s_j-1) mod n pairwise disjoint, each
/// of at most n nodes. Segment: frame bodies omega_j + (0..s_j-1) inside 1..k
/// and gapped intervals pairwise disjoint as integer sets (a gap may stick
/// out to the left of node 1).
bool is_valid_placement(const FrameCollection& frames, const std::vector<int>& offsets, int gap,
                        const Context& context);

/// All valid placements in lexicographic order of offsets.
std::vector<Placement> placements_ring(const FrameCollection& frames, int gap, int n);
std::vector<Placement> placements_segment(const FrameCollection& frames, int gap, int k);
std::vector<Placement> placements(const FrameCollection& frames, int gap, const Context& context);

/// Array positions (0-based) of the observed nodes of omega + F, frame by
/// frame, in frame order.
std::vector<int> observed_positions(const FrameCollection& frames, const Placement& placement);

/// The packed-packing placement: first offset at node 0 (ring) or 1
/// (segment), each next frame starting s_j + r after the previous one.
Placement canonical_placement(const FrameCollection& frames, int gap, const Context& context);

/// Packed indices (increasing) of all full colorings whose restriction to
/// each placed frame reads the matching tableau.
std::vector<PackedColoring> consistent_colorings(const FrameCollection& frames,
                                                 const Placement& placement,
                                                 const TableauCollection& tableaux);

/// Visits the packed indices of consistent colorings without materializing
/// them; `observed` and `flat_colors` are the positions and colors of the
/// observed nodes.
void for_each_consistent(int size, const std::vector<int>& observed,
                         const std::vector<Color>& flat_colors,
                         const std::function<void(PackedColoring)>& visit);

struct ConstraintBudget {
  std::optional<int> max_frames;        // max t
  std::optional<int> max_total_length;  // max sum s_j
};

/// Frame collections (ordered tuples) admissible in the context, ordered by
/// t then lexicographically. Ring: gap-r-placable. Segment: sum_j s_j +
/// (t-1) r <= k, the condition for a placement respecting the segment.
std::vector<FrameCollection> frame_collections(const Context& context, int gap,
                                               const ConstraintBudget& budget = {});

/// One instance of the marginal-equality family: the marginal of omega + F
/// at tableaux zeta equals that of omega' + F.
struct MarginalConstraint {
  FrameCollection frames;
  TableauCollection tableaux;
  Placement anchor;  // canonical placement
  Placement other;
};

/// Emits, for every admissible F within budget and every zeta, the equality
/// of the canonical placement with every other valid placement. Rows whose
/// pair of consistent-coloring sets was already emitted are suppressed, as
/// are rows whose two sets coincide. Intended for small contexts (the
/// dedup keeps full index sets); the LP builders use a class-reduced path.
void generate_marginal_constraints(const Context& context, int gap, const ConstraintBudget& budget,
                                   const std::function<void(const MarginalConstraint&)>& emit);

/// Stable one-line text form:
///   F=(3,3,2) zeta=(012,001,10) omega=(0,6,12) omega'=(4,16,12)
std::string format_constraint(const MarginalConstraint& c);
void dump_constraints(std::ostream& out, const Context& context, int gap,
                      const ConstraintBudget& budget);

}  // namespace nsring
