#pragma once

#include "nsring/frames.hpp"
#include "nsring/lp.hpp"
#include "nsring/ring_model.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nsring {

/// Two distributions over distances (ring) or node pairs (segment) and the
/// bias Delta guaranteed by (p - p') . beta over proper colorings.
///
/// Ring support is d = 2..floor(n/2), entry i standing for d = i + 2.
/// Segment support is the pairs (u,v), v >= u+2, in lexicographic order.
struct BiasWitness {
  Context context;
  std::vector<Rational> p;
  std::vector<Rational> p_prime;
  Rational delta;
  std::optional<Rational> gamma;

  std::size_t support_size() const { return p.size(); }
  /// "d" for the ring, "u:v" for the segment.
  std::string support_label(std::size_t i) const;
  /// Throws std::invalid_argument unless p and p' are distributions of the
  /// right length.
  void validate() const;
  /// Positive entries of p and p' never share an index.
  bool disjoint_supports() const;
};

struct ErrorBound {
  Rational epsilon_lower;
  Rational success_upper;
};

/// Full result of a bias LP solve: the witness read from the dual, the LP
/// itself (dual form) and its certificate.
struct BiasSolve {
  BiasWitness witness;
  RationalLP lp;
  Certificate certificate;
  SolveStats stats;
};

/// Columns of the bias LP: beta vectors restricted to the support, as
/// integers over a common denominator `scale`.
struct BetaColumns {
  std::vector<std::vector<std::int64_t>> columns;
  std::int64_t scale = 1;
};
BetaColumns ring_beta_columns(int n, const std::vector<BetaVectorRing>& betas);
BetaColumns segment_beta_columns(int k, const std::vector<BetaVectorSegment>& betas);

/// Maximum-bias LP in its dual form: one row per support entry of p and
/// of p' plus sum(lambda) = 1, one column per beta vector, slack and split
/// free columns. The optimum is -Delta; p, p' and Delta are the duals.
RationalLP bias_lp_model(const BetaColumns& betas);
BiasSolve solve_bias_lp(const Context& context, const BetaColumns& betas);

BiasSolve bias_lp_ring(int n);
BiasSolve bias_lp_ring(int n, const std::vector<BetaVectorRing>& betas);
BiasSolve bias_lp_segment(int k);
BiasSolve bias_lp_segment(int k, const std::vector<BetaVectorSegment>& betas);

/// min over proper colorings of (p - p') . beta, by enumeration.
Rational min_bias_over_proper(const BiasWitness& witness);

/// Gamma = -min over improper colorings of (p - p') . beta, by brute force
/// over all 3^n (or 3^k) colorings in integer arithmetic. Clamped at 0
/// from below is not applied: the minimum over improper colorings is
/// reported as is, negated.
Rational gamma(const BiasWitness& witness, unsigned threads = 0);

/// epsilon >= Delta / (Delta + Gamma); both zero-bias cases give epsilon 0.
ErrorBound error_lower_bound(const Rational& delta, const Rational& gamma);

/// q^floor(n / (k + r)).
Rational compose_exponential(const Rational& q, int k, int r, long long n);
long long composition_exponent(int k, int r, long long n);

/// The fixed eleven-node witness over distances 2..5:
/// p = (30, 11, 0, 0)/41, p' = (0, 0, 14, 27)/41.
BiasWitness reference_witness_n11();

struct Experiments11Report {
  Rational min_bias;
  std::uint64_t colorings = 0;
  bool per_coloring_check = false;  // every coloring has bias >= 1/451
  Rational sample_bias;             // coloring (0,1,2,0,1,2,0,1,2,0,1)
};
Experiments11Report experiments11();

struct N4ScanReport {
  int grid = 0;
  std::uint64_t points = 0;
  std::uint64_t violating_points = 0;  // points with min_rho q(rho) < 0
  Rational worst;                      // max over points of min_rho q(rho)
  std::array<Rational, 3> worst_point;
  bool all_violate() const { return violating_points == points; }
};
/// Evaluates q(rho) = r_rho^2 - 2 r_rho + 1/2 on the barycentric grid with
/// denominator `grid`, exactly.
N4ScanReport n4_infeasibility_scan(int grid, unsigned threads = 0);

/// Marginal of a distribution over 3^n ring colorings on nodes 0..k-1,
/// indexed by packed segment coloring. Requires k <= n - r.
std::vector<Rational> restrict_ring_to_segment(const std::vector<Rational>& ring_distribution, int n, int k,
                                               int r);

/// Probability mass on proper colorings.
Rational success_probability(const std::vector<Rational>& distribution, const Context& context);

/// First marginal-equality violation of a distribution over all colorings
/// of the context (checked over every admissible frame collection within
/// the budget and every valid placement), or nothing.
std::optional<std::string> nonsignaling_violation(const std::vector<Rational>& distribution,
                                                  const Context& context, int r,
                                                  const ConstraintBudget& budget = {});

// Witness JSON:
//   {"context":"ring"|"segment","size":N,"support":["2",...]|["1:3",...],
//    "p":["num/den",...],"p_prime":[...],"delta":"num/den"[,"gamma":"num/den"]}
void write_witness_json(std::ostream& out, const BiasWitness& witness);
BiasWitness read_witness_json(std::istream& in);

}  // namespace nsring
