#include "nsring/bounds.hpp"

#include "nsring/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nsring {

namespace {

int ring_support_size(int n) { return n / 2 - 1; }

__int128 to_i128(const Integer& z) {
  if (mpz_sizeinbase(z.get_mpz_t(), 2) > 120) throw std::overflow_error("weight exceeds the 128-bit brute-force range");
  Integer a = abs(z);
  unsigned __int128 v = 0;
  std::size_t count = 0;
  std::uint64_t limbs[2] = {0, 0};
  mpz_export(limbs, &count, -1, sizeof(std::uint64_t), 0, 0, a.get_mpz_t());
  v = (static_cast<unsigned __int128>(limbs[1]) << 64) | limbs[0];
  const auto s = static_cast<__int128>(v);
  return sgn(z) < 0 ? -s : s;
}

Rational from_i128(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 a = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  const std::uint64_t limbs[2] = {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(a >> 64)};
  Integer z;
  mpz_import(z.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, limbs);
  if (neg) z = -z;
  return Rational(z);
}

// (p - p') scaled to integers, together with the overall denominator of
// (p - p') . beta (including the 1/n of ring beta entries).
struct IntegerWeights {
  std::vector<__int128> w;
  Integer denominator;
};

IntegerWeights integer_weights(const BiasWitness& witness) {
  Integer den = 1;
  std::vector<Rational> diff(witness.p.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = witness.p[i] - witness.p_prime[i];
    den = lcm(den, diff[i].get_den());
  }
  IntegerWeights out;
  for (const auto& d : diff) out.w.push_back(to_i128(Rational(d * den).get_num()));
  out.denominator = den;
  if (witness.context.is_ring()) out.denominator *= witness.context.size;
  return out;
}

// Scores a coloring: sum of weights over matching support entries.
class Scorer {
 public:
  Scorer(const BiasWitness& witness, const IntegerWeights& weights) : ring_(witness.context.is_ring()) {
    const int size = witness.context.size;
    if (ring_) {
      for (std::size_t i = 0; i < weights.w.size(); ++i)
        if (weights.w[i] != 0) terms_.push_back({static_cast<int>(i) + 2, 0, weights.w[i]});
      n_ = size;
    } else {
      const auto pairs = segment_pairs(size);
      for (std::size_t i = 0; i < weights.w.size(); ++i)
        if (weights.w[i] != 0) terms_.push_back({pairs[i].u - 1, pairs[i].v - 1, weights.w[i]});
    }
  }

  __int128 score(const Color* c) const {
    __int128 s = 0;
    if (ring_) {
      for (const auto& t : terms_) {
        int count = 0;
        for (int v = 0; v < n_; ++v) {
          int u = v + t.a;
          if (u >= n_) u -= n_;
          count += c[v] == c[u];
        }
        s += t.weight * count;
      }
    } else {
      for (const auto& t : terms_)
        if (c[t.a] == c[t.b]) s += t.weight;
    }
    return s;
  }

 private:
  struct Term {
    int a, b;
    __int128 weight;
  };
  bool ring_;
  int n_ = 0;
  std::vector<Term> terms_;
};

}  // namespace

std::string BiasWitness::support_label(std::size_t i) const {
  if (context.is_ring()) return std::to_string(i + 2);
  const auto pairs = segment_pairs(context.size);
  return std::to_string(pairs.at(i).u) + ":" + std::to_string(pairs.at(i).v);
}

void BiasWitness::validate() const {
  const std::size_t expected = context.is_ring()
                                   ? static_cast<std::size_t>(std::max(0, ring_support_size(context.size)))
                                   : static_cast<std::size_t>(segment_pair_count(context.size));
  if (p.size() != expected || p_prime.size() != expected)
    throw std::invalid_argument("witness support has the wrong length");
  Rational sp, spp;
  for (std::size_t i = 0; i < expected; ++i) {
    if (sgn(p[i]) < 0 || sgn(p_prime[i]) < 0) throw std::invalid_argument("witness has a negative probability");
    sp += p[i];
    spp += p_prime[i];
  }
  if (sp != 1 || spp != 1) throw std::invalid_argument("witness distributions must sum to 1");
  if (sgn(delta) < 0) throw std::invalid_argument("witness bias must be >= 0");
}

bool BiasWitness::disjoint_supports() const {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (sgn(p[i]) > 0 && sgn(p_prime[i]) > 0) return false;
  return true;
}

BetaColumns ring_beta_columns(int n, const std::vector<BetaVectorRing>& betas) {
  BetaColumns out;
  out.scale = n;
  const int support = ring_support_size(n);
  for (const auto& b : betas) {
    std::vector<std::int64_t> col(static_cast<std::size_t>(support));
    for (int d = 2; d <= n / 2; ++d) col[static_cast<std::size_t>(d - 2)] = b.counts[static_cast<std::size_t>(d - 2)];
    out.columns.push_back(std::move(col));
  }
  return out;
}

BetaColumns segment_beta_columns(int, const std::vector<BetaVectorSegment>& betas) {
  BetaColumns out;
  for (const auto& b : betas) out.columns.emplace_back(b.bits.begin(), b.bits.end());
  return out;
}

RationalLP bias_lp_model(const BetaColumns& betas) {
  if (betas.columns.empty()) throw std::invalid_argument("bias LP needs at least one beta vector");
  const std::size_t m1 = betas.columns.front().size();
  const std::size_t nb = betas.columns.size();
  RationalLP lp;
  for (std::size_t i = 0; i < nb; ++i) lp.variables.push_back("lambda" + std::to_string(i));
  for (std::size_t e = 0; e < m1; ++e) lp.variables.push_back("s" + std::to_string(e));
  for (std::size_t e = 0; e < m1; ++e) lp.variables.push_back("s'" + std::to_string(e));
  for (const char* name : {"mu+", "mu-", "mu'+", "mu'-"}) lp.variables.emplace_back(name);
  const auto mu = static_cast<std::uint32_t>(nb + 2 * m1);

  const Rational scale(betas.scale);
  lp.rows.resize(2 * m1 + 1);
  for (std::size_t i = 0; i < nb; ++i) {
    const auto idx = static_cast<std::uint32_t>(i);
    for (std::size_t e = 0; e < m1; ++e) {
      const std::int64_t c = betas.columns[i][e];
      if (c == 0) continue;
      const Rational beta = Rational(c) / scale;
      lp.rows[e].terms.push_back(make_term(idx, -beta));
      lp.rows[m1 + e].terms.push_back(make_term(idx, beta));
    }
    lp.rows[2 * m1].terms.push_back({idx, 1, 1});
  }
  for (std::size_t e = 0; e < m1; ++e) {
    lp.rows[e].terms.push_back({static_cast<std::uint32_t>(nb + e), -1, 1});
    lp.rows[e].terms.push_back({mu, 1, 1});
    lp.rows[e].terms.push_back({mu + 1, -1, 1});
    lp.rows[m1 + e].terms.push_back({static_cast<std::uint32_t>(nb + m1 + e), -1, 1});
    lp.rows[m1 + e].terms.push_back({mu + 2, 1, 1});
    lp.rows[m1 + e].terms.push_back({mu + 3, -1, 1});
  }
  lp.rows[2 * m1].rhs = 1;
  lp.objective = {{mu, -1, 1}, {mu + 1, 1, 1}, {mu + 2, -1, 1}, {mu + 3, 1, 1}};
  return lp;
}

BiasSolve solve_bias_lp(const Context& context, const BetaColumns& betas) {
  BiasSolve out;
  out.lp = bias_lp_model(betas);
  auto res = solve_via_presolve(out.lp);
  if (res.status != SolveStatus::Optimal) throw std::runtime_error("bias LP did not solve: " + res.message);
  out.certificate = std::move(res.certificate);
  out.stats = res.stats;
  const std::size_t m1 = betas.columns.front().size();
  BiasWitness& w = out.witness;
  w.context = context;
  for (std::size_t e = 0; e < m1; ++e) {
    w.p.push_back(-out.certificate.dual[e]);
    w.p_prime.push_back(-out.certificate.dual[m1 + e]);
  }
  w.delta = -out.certificate.dual[2 * m1];
  if (w.delta != -out.certificate.objective) throw std::logic_error("bias LP dual does not match its objective");
  w.validate();
  if (sgn(w.delta) > 0 && !w.disjoint_supports())
    throw std::logic_error("optimal witness with positive bias has overlapping supports");
  return out;
}

BiasSolve bias_lp_ring(int n) {
  if (n < 5) throw std::invalid_argument("ring bias LP needs n >= 5");
  return bias_lp_ring(n, distinct_beta_set_ring(n, true));
}

BiasSolve bias_lp_ring(int n, const std::vector<BetaVectorRing>& betas) {
  if (n < 5) throw std::invalid_argument("ring bias LP needs n >= 5");
  return solve_bias_lp(Context::ring(n), ring_beta_columns(n, betas));
}

BiasSolve bias_lp_segment(int k) {
  if (k < 4) throw std::invalid_argument("segment bias LP needs k >= 4");
  return bias_lp_segment(k, distinct_beta_set_segment(k, true));
}

BiasSolve bias_lp_segment(int k, const std::vector<BetaVectorSegment>& betas) {
  if (k < 4) throw std::invalid_argument("segment bias LP needs k >= 4");
  return solve_bias_lp(Context::segment(k), segment_beta_columns(k, betas));
}

Rational min_bias_over_proper(const BiasWitness& witness) {
  witness.validate();
  const auto weights = integer_weights(witness);
  const Scorer scorer(witness, weights);
  __int128 best = 0;
  bool first = true;
  auto visit = [&](std::span<const Color> c) {
    const __int128 s = scorer.score(c.data());
    if (first || s < best) best = s;
    first = false;
  };
  if (witness.context.is_ring())
    for_each_proper_ring(witness.context.size, visit);
  else
    for_each_proper_segment(witness.context.size, visit);
  return from_i128(best) / weights.denominator;
}

Rational gamma(const BiasWitness& witness, unsigned threads) {
  witness.validate();
  const auto weights = integer_weights(witness);
  const Scorer scorer(witness, weights);
  const bool ring = witness.context.is_ring();
  const int size = witness.context.size;
  // Chunks fix the leading digits; each chunk runs an odometer over the rest.
  const int lead = std::min(size, 5);
  const int tail = size - lead;
  const std::uint64_t chunks = pow3(lead);
  constexpr __int128 kNone = std::numeric_limits<__int128>::max();
  std::vector<__int128> chunk_min(chunks, kNone);
  parallel_for(chunks, threads, [&](std::size_t chunk) {
    std::vector<Color> c(static_cast<std::size_t>(size), 0);
    unpack_colors(chunk, std::span<Color>(c.data(), static_cast<std::size_t>(lead)));
    __int128 best = kNone;
    while (true) {
      bool proper = true;
      for (int v = 0; v + 1 < size && proper; ++v) proper = c[static_cast<std::size_t>(v)] != c[static_cast<std::size_t>(v + 1)];
      if (proper && ring) proper = c.front() != c.back();
      if (!proper) best = std::min(best, scorer.score(c.data()));
      int i = size - 1;
      while (i >= lead && c[static_cast<std::size_t>(i)] == 2) c[static_cast<std::size_t>(i--)] = 0;
      if (i < lead) break;
      ++c[static_cast<std::size_t>(i)];
    }
    chunk_min[chunk] = best;
  });
  (void)tail;
  const __int128 best = *std::min_element(chunk_min.begin(), chunk_min.end());
  if (best == kNone) return 0;
  return -from_i128(best) / weights.denominator;
}

ErrorBound error_lower_bound(const Rational& delta, const Rational& gamma) {
  if (sgn(delta) < 0) throw std::invalid_argument("delta must be >= 0");
  if (sgn(gamma) < 0 || gamma > 1) throw std::invalid_argument("gamma must lie in [0,1]");
  ErrorBound b;
  if (sgn(delta) == 0) {
    b.epsilon_lower = 0;
    b.success_upper = 1;
    return b;
  }
  b.epsilon_lower = delta / (delta + gamma);
  b.success_upper = gamma / (delta + gamma);
  return b;
}

long long composition_exponent(int k, int r, long long n) {
  if (k < 2 || r < 0 || n < 1) throw std::invalid_argument("composition needs k >= 2, r >= 0, n >= 1");
  return n / (k + r);
}

Rational compose_exponential(const Rational& q, int k, int r, long long n) {
  if (sgn(q) < 0 || q > 1) throw std::invalid_argument("q must lie in [0,1]");
  return pow(q, static_cast<std::uint64_t>(composition_exponent(k, r, n)));
}

BiasWitness reference_witness_n11() {
  BiasWitness w;
  w.context = Context::ring(11);
  w.p = {Rational(30, 41), Rational(11, 41), 0, 0};
  w.p_prime = {0, 0, Rational(14, 41), Rational(27, 41)};
  w.delta = Rational(1, 451);
  return w;
}

Experiments11Report experiments11() {
  const BiasWitness w = reference_witness_n11();
  const auto weights = integer_weights(w);
  const Scorer scorer(w, weights);
  Experiments11Report rep;
  __int128 best = 0;
  bool first = true;
  bool all_ok = true;
  // 1/451 = 11 * 41 / (451 * 11 * 41) in units of 1/(11*41): threshold 1.
  const Rational threshold(1, 451);
  for_each_proper_ring(11, [&](std::span<const Color> c) {
    const __int128 s = scorer.score(c.data());
    if (first || s < best) best = s;
    first = false;
    if (from_i128(s) / weights.denominator < threshold) all_ok = false;
    ++rep.colorings;
  });
  rep.min_bias = from_i128(best) / weights.denominator;
  rep.per_coloring_check = all_ok;
  const std::vector<Color> sample = {0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1};
  rep.sample_bias = from_i128(scorer.score(sample.data())) / weights.denominator;
  return rep;
}

N4ScanReport n4_infeasibility_scan(int grid, unsigned threads) {
  if (grid < 2) throw std::invalid_argument("grid resolution must be >= 2");
  const long long g = grid;
  // 2 g^2 q(x/g) = 2x^2 - 4xg + g^2.
  auto scaled_q = [g](long long x) { return 2 * x * x - 4 * x * g + g * g; };
  struct Slice {
    std::uint64_t points = 0, violating = 0;
    long long worst = std::numeric_limits<long long>::min();
    long long wj = 0;
  };
  std::vector<Slice> slices(static_cast<std::size_t>(grid + 1));
  parallel_for(slices.size(), threads, [&](std::size_t si) {
    const auto i = static_cast<long long>(si);
    Slice s;
    for (long long j = 0; i + j <= g; ++j) {
      const long long k = g - i - j;
      const long long q = std::min({scaled_q(i), scaled_q(j), scaled_q(k)});
      ++s.points;
      if (q < 0) ++s.violating;
      if (q > s.worst) {
        s.worst = q;
        s.wj = j;
      }
    }
    slices[si] = s;
  });
  N4ScanReport rep;
  rep.grid = grid;
  long long worst = std::numeric_limits<long long>::min();
  long long wi = 0, wj = 0;
  for (std::size_t si = 0; si < slices.size(); ++si) {
    rep.points += slices[si].points;
    rep.violating_points += slices[si].violating;
    if (slices[si].worst > worst) {
      worst = slices[si].worst;
      wi = static_cast<long long>(si);
      wj = slices[si].wj;
    }
  }
  auto ratio = [](long long a, long long b) {
    Rational q{Integer(std::to_string(a)), Integer(std::to_string(b))};
    q.canonicalize();
    return q;
  };
  rep.worst = ratio(worst, 2 * g * g);
  rep.worst_point = {ratio(wi, g), ratio(wj, g), ratio(g - wi - wj, g)};
  return rep;
}

std::vector<Rational> restrict_ring_to_segment(const std::vector<Rational>& ring_distribution, int n, int k,
                                               int r) {
  if (k < 1 || k > n - r) throw std::invalid_argument("segment length must satisfy 1 <= k <= n - r");
  if (ring_distribution.size() != pow3(n)) throw std::invalid_argument("ring distribution must cover 3^n colorings");
  const std::uint64_t drop = pow3(n - k);
  std::vector<Rational> seg(pow3(k));
  for (std::uint64_t w = 0; w < ring_distribution.size(); ++w)
    if (sgn(ring_distribution[w]) != 0) seg[w / drop] += ring_distribution[w];
  return seg;
}

Rational success_probability(const std::vector<Rational>& distribution, const Context& context) {
  if (distribution.size() != pow3(context.size)) throw std::invalid_argument("distribution size mismatch");
  std::vector<Color> c(static_cast<std::size_t>(context.size));
  Rational s;
  for (std::uint64_t w = 0; w < distribution.size(); ++w) {
    if (sgn(distribution[w]) == 0) continue;
    unpack_colors(w, c);
    if (context.is_ring() ? is_proper_ring(c) : is_proper_segment(c)) s += distribution[w];
  }
  return s;
}

std::optional<std::string> nonsignaling_violation(const std::vector<Rational>& distribution,
                                                  const Context& context, int r,
                                                  const ConstraintBudget& budget) {
  if (distribution.size() != pow3(context.size)) throw std::invalid_argument("distribution size mismatch");
  std::vector<std::pair<std::vector<Color>, const Rational*>> support;
  for (std::uint64_t w = 0; w < distribution.size(); ++w) {
    if (sgn(distribution[w]) == 0) continue;
    std::vector<Color> c(static_cast<std::size_t>(context.size));
    unpack_colors(w, c);
    support.emplace_back(std::move(c), &distribution[w]);
  }
  for (const auto& frames : frame_collections(context, r, budget)) {
    const auto all = placements(frames, r, context);
    std::vector<Rational> anchor_marginal;
    for (std::size_t pi = 0; pi < all.size(); ++pi) {
      const auto pos = observed_positions(frames, all[pi]);
      std::vector<Rational> marginal(pow3(frames.total_length()));
      for (const auto& [c, p] : support) {
        std::uint64_t idx = 0;
        for (int v : pos) idx = idx * 3 + c[static_cast<std::size_t>(v)];
        marginal[idx] += *p;
      }
      if (pi == 0) {
        anchor_marginal = std::move(marginal);
        continue;
      }
      for (std::uint64_t idx = 0; idx < marginal.size(); ++idx) {
        if (marginal[idx] == anchor_marginal[idx]) continue;
        std::vector<Color> flat(pos.size());
        unpack_colors(idx, flat);
        MarginalConstraint mc{frames, {}, all[0], all[pi]};
        auto it = flat.begin();
        for (int j = 0; j < frames.count(); ++j) {
          mc.tableaux.emplace_back(it, it + frames.length(j));
          it += frames.length(j);
        }
        return format_constraint(mc) + ": " + to_string(anchor_marginal[idx]) + " != " + to_string(marginal[idx]);
      }
    }
  }
  return std::nullopt;
}

void write_witness_json(std::ostream& out, const BiasWitness& witness) {
  nlohmann::ordered_json j;
  j["context"] = witness.context.is_ring() ? "ring" : "segment";
  j["size"] = witness.context.size;
  std::vector<std::string> support, p, pp;
  for (std::size_t i = 0; i < witness.p.size(); ++i) {
    support.push_back(witness.support_label(i));
    p.push_back(to_string(witness.p[i]));
    pp.push_back(to_string(witness.p_prime[i]));
  }
  j["support"] = support;
  j["p"] = p;
  j["p_prime"] = pp;
  j["delta"] = to_string(witness.delta);
  if (witness.gamma) j["gamma"] = to_string(*witness.gamma);
  out << j.dump() << '\n';
}

BiasWitness read_witness_json(std::istream& in) {
  const auto j = nlohmann::json::parse(in);
  BiasWitness w;
  const auto ctx = j.at("context").get<std::string>();
  const int size = j.at("size").get<int>();
  if (ctx == "ring")
    w.context = Context::ring(size);
  else if (ctx == "segment")
    w.context = Context::segment(size);
  else
    throw std::invalid_argument("witness context must be ring or segment");
  for (const auto& s : j.at("p")) w.p.push_back(parse_rational(s.get<std::string>()));
  for (const auto& s : j.at("p_prime")) w.p_prime.push_back(parse_rational(s.get<std::string>()));
  w.delta = parse_rational(j.at("delta").get<std::string>());
  if (j.contains("gamma")) w.gamma = parse_rational(j.at("gamma").get<std::string>());
  if (j.contains("support")) {
    const auto& sup = j.at("support");
    if (sup.size() != w.p.size()) throw std::invalid_argument("witness support length mismatch");
    for (std::size_t i = 0; i < sup.size(); ++i)
      if (sup[i].get<std::string>() != w.support_label(i))
        throw std::invalid_argument("witness support labels are not in canonical order");
  }
  w.validate();
  return w;
}

}  // namespace nsring
