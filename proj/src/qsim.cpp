#include "nsring/qsim.hpp"

#include "nsring/frames.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nsring::qsim {

namespace {

constexpr int kMaxQubits = 24;

// Applies the same local operator to one node's register, in place.
void apply_local(std::vector<Complex>& state, const std::vector<Complex>& u, std::size_t dim, int node, int n,
                 int bits) {
  const std::size_t stride = std::size_t{1} << (static_cast<std::size_t>(n - 1 - node) * static_cast<std::size_t>(bits));
  const std::size_t block = stride * dim;
  std::vector<Complex> in(dim), out(dim);
  for (std::size_t base = 0; base < state.size(); base += block) {
    for (std::size_t low = 0; low < stride; ++low) {
      for (std::size_t l = 0; l < dim; ++l) in[l] = state[base + low + l * stride];
      for (std::size_t i = 0; i < dim; ++i) {
        Complex s = 0;
        const Complex* row = &u[i * dim];
        for (std::size_t j = 0; j < dim; ++j) s += row[j] * in[j];
        out[i] = s;
      }
      for (std::size_t l = 0; l < dim; ++l) state[base + low + l * stride] = out[l];
    }
  }
}

// Moves every node's message register to its successor.
void shift_messages(std::vector<Complex>& state, std::vector<Complex>& scratch, int n, int w, int m) {
  if (m == 0) return;
  const int bits = w + m;
  const std::uint64_t msg_mask = (std::uint64_t{1} << m) - 1;
  for (std::uint64_t idx = 0; idx < state.size(); ++idx) {
    std::uint64_t target = idx;
    for (int v = 0; v < n; ++v) {
      const int from_shift = (n - 1 - v) * bits;
      const int to_shift = (n - 1 - (v + 1) % n) * bits;
      const std::uint64_t msg = (idx >> from_shift) & msg_mask;
      target &= ~(msg_mask << to_shift);
      target |= msg << to_shift;
    }
    scratch[target] = state[idx];
  }
  state.swap(scratch);
}

double norm2(const std::vector<Complex>& state) {
  double s = 0;
  for (const auto& a : state) s += std::norm(a);
  return s;
}

std::vector<double> marginal(const OutputDistribution& dist, const std::vector<int>& positions) {
  std::vector<double> out(pow3(static_cast<int>(positions.size())), 0.0);
  std::vector<Color> c(static_cast<std::size_t>(dist.n));
  for (std::uint64_t w = 0; w < dist.probabilities.size(); ++w) {
    const double p = dist.probabilities[w];
    if (p == 0) continue;
    unpack_colors(w, c);
    std::uint64_t idx = 0;
    for (int v : positions) idx = idx * 3 + c[static_cast<std::size_t>(v)];
    out[idx] += p;
  }
  return out;
}

}  // namespace

double unitarity_error(const std::vector<Complex>& u, std::size_t dim) {
  double worst = 0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      Complex s = 0;
      for (std::size_t k = 0; k < dim; ++k) s += std::conj(u[k * dim + i]) * u[k * dim + j];
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  return worst;
}

void ProtocolSpec::validate(double tol) const {
  if (n < 1 || r < 0 || w < 0 || m < 0) throw std::invalid_argument("protocol needs n >= 1 and r, w, m >= 0");
  if (static_cast<long long>(n) * (w + m) > kMaxQubits)
    throw std::invalid_argument("protocol state exceeds 24 qubits (n*(w+m) > 24)");
  const std::size_t dim = local_dimension();
  if (unitary.size() != dim * dim) throw std::invalid_argument("U must have 2^(w+m) x 2^(w+m) entries");
  if (color_map.size() != dim) throw std::invalid_argument("color_map must cover every local basis index");
  for (int c : color_map)
    if (c < 0 || c > 2) throw std::invalid_argument("color_map values must be 0, 1 or 2");
  const double err = unitarity_error(unitary, dim);
  if (!(err <= tol)) {
    std::ostringstream msg;
    msg << "U is not unitary: max |U^dagger U - I| = " << err;
    throw std::invalid_argument(msg.str());
  }
}

double OutputDistribution::probability(const std::string& colors) const {
  if (static_cast<int>(colors.size()) != n) throw std::invalid_argument("coloring length mismatch");
  std::uint64_t idx = 0;
  for (char ch : colors) {
    if (ch < '0' || ch > '2') throw std::invalid_argument("colors must be digits 0..2");
    idx = idx * 3 + static_cast<std::uint64_t>(ch - '0');
  }
  return probabilities[idx];
}

std::vector<Complex> random_unitary(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Complex> a(dim * dim);
  for (auto& z : a) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z = Complex(re, im);
  }
  // Modified Gram-Schmidt over columns, done twice for orthogonality at 1e-15.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex dot = 0;
        for (std::size_t i = 0; i < dim; ++i) dot += std::conj(a[i * dim + k]) * a[i * dim + j];
        for (std::size_t i = 0; i < dim; ++i) a[i * dim + j] -= dot * a[i * dim + k];
      }
      double nrm = 0;
      for (std::size_t i = 0; i < dim; ++i) nrm += std::norm(a[i * dim + j]);
      nrm = std::sqrt(nrm);
      for (std::size_t i = 0; i < dim; ++i) a[i * dim + j] /= nrm;
    }
  }
  return a;
}

OutputDistribution run_protocol(const ProtocolSpec& spec) {
  spec.validate();
  const int bits = spec.qubits_per_node();
  const std::size_t dim = spec.local_dimension();
  std::vector<Complex> state(std::size_t{1} << (static_cast<std::size_t>(spec.n) * static_cast<std::size_t>(bits)));
  state[0] = 1;
  std::vector<Complex> scratch(spec.m > 0 ? state.size() : 0);
  for (int round = 0; round < spec.r; ++round) {
    for (int v = 0; v < spec.n; ++v) apply_local(state, spec.unitary, dim, v, spec.n, bits);
    shift_messages(state, scratch, spec.n, spec.w, spec.m);
    const double drift = std::abs(norm2(state) - 1.0);
    if (drift > 1e-12) {
      std::ostringstream msg;
      msg << "state norm drifted by " << drift << " in round " << round + 1;
      throw std::runtime_error(msg.str());
    }
  }
  OutputDistribution out;
  out.n = spec.n;
  out.probabilities.assign(pow3(spec.n), 0.0);
  const std::uint64_t local_mask = dim - 1;
  for (std::uint64_t idx = 0; idx < state.size(); ++idx) {
    const double p = std::norm(state[idx]);
    if (p == 0) continue;
    std::uint64_t word = 0;
    for (int v = 0; v < spec.n; ++v) {
      const std::uint64_t local = (idx >> ((spec.n - 1 - v) * bits)) & local_mask;
      word = word * 3 + static_cast<std::uint64_t>(spec.color_map[local]);
    }
    out.probabilities[word] += p;
  }
  for (auto& p : out.probabilities) p = std::max(p, 0.0);
  return out;
}

bool check_cyclicity(const OutputDistribution& dist, double tol) {
  const std::uint64_t top = pow3(dist.n - 1);
  for (std::uint64_t w = 0; w < dist.probabilities.size(); ++w) {
    // Rotation by one node: the leading digit moves to the end.
    const std::uint64_t rotated = (w % top) * 3 + w / top;
    if (std::abs(dist.probabilities[w] - dist.probabilities[rotated]) > tol) return false;
  }
  return true;
}

IndependenceReport check_independence(const OutputDistribution& dist, int r, double tol) {
  IndependenceReport rep;
  const Context ring = Context::ring(dist.n);
  std::vector<std::vector<double>> single(static_cast<std::size_t>(dist.n) + 1);
  auto single_marginal = [&](int s) -> const std::vector<double>& {
    auto& cached = single[static_cast<std::size_t>(s)];
    if (cached.empty()) {
      std::vector<int> pos(static_cast<std::size_t>(s));
      for (int i = 0; i < s; ++i) pos[static_cast<std::size_t>(i)] = i;
      cached = marginal(dist, pos);
    }
    return cached;
  };
  for (const auto& frames : frame_collections(ring, r)) {
    ++rep.frame_collections;
    std::vector<double> product(1, 1.0);
    for (int j = 0; j < frames.count(); ++j) {
      const auto& pj = single_marginal(frames.length(j));
      std::vector<double> next(product.size() * pj.size());
      for (std::size_t a = 0; a < product.size(); ++a)
        for (std::size_t b = 0; b < pj.size(); ++b) next[a * pj.size() + b] = product[a] * pj[b];
      product.swap(next);
    }
    const auto all = placements(frames, r, ring);
    std::vector<double> anchor;
    for (std::size_t pi = 0; pi < all.size(); ++pi) {
      ++rep.placements;
      const auto mg = marginal(dist, observed_positions(frames, all[pi]));
      if (pi == 0) anchor = mg;
      for (std::size_t i = 0; i < mg.size(); ++i) {
        rep.max_deviation = std::max(rep.max_deviation, std::abs(mg[i] - anchor[i]));
        rep.max_deviation = std::max(rep.max_deviation, std::abs(mg[i] - product[i]));
      }
    }
  }
  rep.passed = rep.max_deviation <= tol;
  return rep;
}

ProtocolSpec read_protocol_json(std::istream& in) {
  const auto j = nlohmann::json::parse(in);
  ProtocolSpec s;
  s.n = j.at("n").get<int>();
  s.r = j.at("r").get<int>();
  s.w = j.at("w").get<int>();
  s.m = j.at("m").get<int>();
  for (const auto& z : j.at("U")) {
    if (!z.is_array() || z.size() != 2) throw std::invalid_argument("U entries must be [re, im] pairs");
    s.unitary.emplace_back(z[0].get<double>(), z[1].get<double>());
  }
  s.color_map = j.at("color_map").get<std::vector<int>>();
  s.validate();
  return s;
}

void write_protocol_json(std::ostream& out, const ProtocolSpec& spec) {
  nlohmann::ordered_json j;
  j["n"] = spec.n;
  j["r"] = spec.r;
  j["w"] = spec.w;
  j["m"] = spec.m;
  auto u = nlohmann::ordered_json::array();
  for (const auto& z : spec.unitary) u.push_back({z.real(), z.imag()});
  j["U"] = u;
  j["color_map"] = spec.color_map;
  out << j.dump() << '\n';
}

void write_distribution_csv(std::ostream& out, const OutputDistribution& dist) {
  out << "coloring,probability\n";
  std::vector<Color> c(static_cast<std::size_t>(dist.n));
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (std::uint64_t w = 0; w < dist.probabilities.size(); ++w) {
    if (dist.probabilities[w] == 0) continue;
    unpack_colors(w, c);
    for (Color x : c) out << static_cast<char>('0' + x);
    out << ',' << dist.probabilities[w] << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace nsring::qsim
