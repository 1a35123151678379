#pragma once

// State-vector simulation of one-way quantum ring protocols.

#include "nsring/ring_model.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nsring::qsim {

using Complex = std::complex<double>;

/// Identical nodes on a directed ring, each holding w workspace and m
/// message qubits. Local basis index = (workspace << m) | message; node 0
/// occupies the most significant bits of the global index.
struct ProtocolSpec {
  int n = 0;
  int r = 0;
  int w = 0;
  int m = 0;
  std::vector<Complex> unitary;  // row-major, local_dimension()^2 entries
  std::vector<int> color_map;    // local basis index -> color in {0,1,2}

  int qubits_per_node() const { return w + m; }
  std::size_t local_dimension() const { return std::size_t{1} << (w + m); }
  /// Throws std::invalid_argument on shape errors, a colour outside {0,1,2},
  /// a state over 24 qubits, or ||U^dagger U - I||_max > tol.
  void validate(double tol = 1e-12) const;
};

/// Probabilities indexed by packed coloring (node 0 most significant).
struct OutputDistribution {
  int n = 0;
  std::vector<double> probabilities;

  double probability(const std::string& colors) const;
};

/// Max-norm distance of U^dagger U from the identity.
double unitarity_error(const std::vector<Complex>& u, std::size_t dim);

/// Haar-like random unitary: Gram-Schmidt on a complex Gaussian matrix
/// drawn from a generator seeded with `seed`.
std::vector<Complex> random_unitary(std::size_t dim, std::uint64_t seed);

/// Applies r rounds of U on every node followed by the message shift to
/// the successor, starting from |0...0>, then measures every node in the
/// computational basis and maps each local outcome through color_map.
/// Throws std::runtime_error if the norm drifts beyond 1e-12 in a round.
OutputDistribution run_protocol(const ProtocolSpec& spec);

/// Every rotation of a coloring has the same probability, within tol.
bool check_cyclicity(const OutputDistribution& dist, double tol);

struct IndependenceReport {
  double max_deviation = 0;  // over placement changes and the product form
  std::size_t frame_collections = 0;
  std::size_t placements = 0;
  bool passed = false;
};

/// For every gap-r-placable frame collection and each of its placements,
/// compares the marginal with the canonical placement's marginal and with
/// the product of single-frame marginals.
IndependenceReport check_independence(const OutputDistribution& dist, int r, double tol);

// {"n":5,"r":1,"w":1,"m":1,"U":[[re,im],...],"color_map":[0,1,2,0]}
ProtocolSpec read_protocol_json(std::istream& in);
void write_protocol_json(std::ostream& out, const ProtocolSpec& spec);

/// "coloring,probability" header, then one line per coloring with nonzero
/// probability in packed order.
void write_distribution_csv(std::ostream& out, const OutputDistribution& dist);

}  // namespace nsring::qsim
