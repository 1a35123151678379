#pragma once

#include "nsring/frames.hpp"
#include "nsring/lp.hpp"

#include <cstdint>
#include <vector>

namespace nsring {

/// Symmetry group acting on the colorings of a context.
struct Symmetries {
  bool rotation = false;    // ring only
  bool colors = false;      // the six permutations of {0,1,2}
  bool reflection = false;  // reversal of the node order
};

/// Orbits of all 3^size colorings under a symmetry group. Orbit ids follow
/// the order of their smallest member, which is the representative.
struct OrbitTable {
  Context context;
  Symmetries symmetries;
  std::vector<PackedColoring> representative;
  std::vector<std::uint32_t> orbit_size;
  std::vector<bool> proper;
  std::vector<std::uint32_t> class_of;  // indexed by packed coloring

  std::size_t count() const { return representative.size(); }
};

OrbitTable orbit_table(const Context& context, const Symmetries& symmetries);

/// A non-signaling LP together with the orbit table naming its variables.
/// Variable i is the common probability of every coloring in orbit i.
struct NonsignalLP {
  RationalLP lp;
  OrbitTable orbits;
  int gap = 0;
};

struct BuildOptions {
  ConstraintBudget budget;
  /// Also identify mirror-image colorings. The constraint family is closed
  /// under reversal, so the optimum is unchanged.
  bool reflection = false;
  unsigned threads = 0;
};

/// Success-probability LP of an n-ring coloring non-signaling beyond
/// distance r. With cyclic classes the rotation constraints are built into
/// the variables and single-frame rows are dropped; otherwise the rotation
/// equalities appear as explicit rows.
NonsignalLP build_ring_lp(int n, int r, bool use_cyclic_classes, bool use_color_symmetry,
                          const BuildOptions& options = {});

/// Same for a k-node segment; single-frame rows are kept.
NonsignalLP build_segment_lp(int k, int r, bool use_color_symmetry, const BuildOptions& options = {});

/// Per-coloring probabilities p_phi = x_{orbit(phi)} indexed by packed word.
std::vector<Rational> expand_distribution(const NonsignalLP& model, const std::vector<Rational>& x);

}  // namespace nsring
