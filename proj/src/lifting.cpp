#include "lifting.hpp"

#include "modular.hpp"

#include <algorithm>

namespace nsring::detail {

namespace {

const Integer& prime() {
  static const Integer p(static_cast<unsigned long>(modp::kPrime));
  return p;
}

// Wang's rational reconstruction: a/b == u mod P with |a| <= bound, 0 < b <= bound.
std::optional<Rational> reconstruct(const Integer& u, const Integer& modulus, const Integer& bound) {
  if (u <= bound) return Rational(u);
  if (modulus - u <= bound) return Rational(Integer(u - modulus));
  Integer r0 = modulus, r1 = u, s0 = 0, s1 = 1, q, t;
  while (r1 > bound) {
    mpz_fdiv_q(q.get_mpz_t(), r0.get_mpz_t(), r1.get_mpz_t());
    t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (abs(s1) > bound || s1 == 0) return std::nullopt;
  if (gcd(r1, s1) != 1) return std::nullopt;
  Rational out(r1, s1);
  out.canonicalize();
  return out;
}

}  // namespace

std::optional<LiftingSolver> LiftingSolver::factor(const IntegerColumns& m) {
  LiftingSolver s(m);
  const std::size_t n = m.size;
  s.n_ = n;
  s.lu_.assign(n * n, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& e : m.columns[j]) s.lu_[e.row * n + j] = modp::from_integer(e.value);
  s.perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.perm_[i] = i;
  auto a = [&](std::size_t i, std::size_t j) -> std::uint64_t& { return s.lu_[i * n + j]; };
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a(piv, k) == 0) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != k) {
      std::swap_ranges(s.lu_.begin() + static_cast<std::ptrdiff_t>(piv * n),
                       s.lu_.begin() + static_cast<std::ptrdiff_t>(piv * n + n),
                       s.lu_.begin() + static_cast<std::ptrdiff_t>(k * n));
      std::swap(s.perm_[piv], s.perm_[k]);
    }
    const std::uint64_t inv = modp::inv(a(k, k));
    const std::uint64_t* pk = &s.lu_[k * n];
    for (std::size_t i = k + 1; i < n; ++i) {
      std::uint64_t* pi = &s.lu_[i * n];
      if (pi[k] == 0) continue;
      const std::uint64_t f = modp::mul(pi[k], inv);
      pi[k] = f;
      for (std::size_t j = k + 1; j < n; ++j)
        if (pk[j]) pi[j] = modp::sub(pi[j], modp::mul(f, pk[j]));
    }
  }
  s.diag_inv_.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.diag_inv_[i] = modp::inv(a(i, i));
  return s;
}

std::vector<std::uint64_t> LiftingSolver::solve_mod(std::vector<std::uint64_t> rhs, bool transpose) const {
  const std::size_t n = n_;
  auto a = [&](std::size_t i, std::size_t j) { return lu_[i * n + j]; };
  if (!transpose) {
    // L U z = P v.
    std::vector<std::uint64_t> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = rhs[perm_[i]];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (a(i, j) && w[j]) w[i] = modp::sub(w[i], modp::mul(a(i, j), w[j]));
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j)
        if (a(i, j) && w[j]) w[i] = modp::sub(w[i], modp::mul(a(i, j), w[j]));
      w[i] = modp::mul(w[i], diag_inv_[i]);
    }
    return w;
  }
  // U^T L^T P z = v, processed column-wise for row-major access.
  std::vector<std::uint64_t>& s = rhs;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = modp::mul(s[i], diag_inv_[i]);
    if (!s[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j)
      if (a(i, j)) s[j] = modp::sub(s[j], modp::mul(a(i, j), s[i]));
  }
  for (std::size_t i = n; i-- > 0;) {
    if (!s[i]) continue;
    for (std::size_t j = 0; j < i; ++j)
      if (a(i, j)) s[j] = modp::sub(s[j], modp::mul(a(i, j), s[i]));
  }
  std::vector<std::uint64_t> z(n);
  for (std::size_t i = 0; i < n; ++i) z[perm_[i]] = s[i];
  return z;
}

std::vector<Integer> LiftingSolver::apply(const std::vector<Integer>& z, bool transpose) const {
  std::vector<Integer> out(n_);
  for (std::size_t j = 0; j < n_; ++j)
    for (const auto& e : m_->columns[j]) {
      if (transpose)
        out[j] += e.value * z[e.row];
      else
        out[e.row] += e.value * z[j];
    }
  return out;
}

std::optional<std::vector<Rational>> LiftingSolver::solve(const std::vector<Integer>& v, bool transpose,
                                                          std::size_t max_steps) const {
  const std::size_t n = n_;
  const Integer& p = prime();
  std::vector<Integer> residual = v;
  std::vector<Integer> acc(n);
  Integer modulus = 1;
  std::size_t next_attempt = 1;
  std::vector<std::uint64_t> rm(n);
  std::vector<Integer> zi(n);
  for (std::size_t step = 1; step <= max_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) rm[i] = modp::from_integer(residual[i]);
    const auto z = solve_mod(rm, transpose);
    for (std::size_t i = 0; i < n; ++i) {
      zi[i] = static_cast<unsigned long>(z[i]);
      acc[i] += zi[i] * modulus;
    }
    modulus *= p;
    const auto mz = apply(zi, transpose);
    bool zero = true;
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] -= mz[i];
      mpz_divexact(residual[i].get_mpz_t(), residual[i].get_mpz_t(), p.get_mpz_t());
      if (residual[i] != 0) zero = false;
    }
    if (!zero && step < next_attempt) continue;
    next_attempt = step + std::max<std::size_t>(1, step / 2);

    // Reconstruct with a running common denominator so that later entries
    // usually reduce to the small-integer fast path.
    Integer bound;
    mpz_sqrt(bound.get_mpz_t(), Integer(modulus / 2).get_mpz_t());
    std::vector<Rational> out(n);
    Integer common = 1;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      Integer u = (acc[i] * common) % modulus;
      const auto q = reconstruct(u, modulus, bound);
      if (!q) {
        ok = false;
        break;
      }
      out[i] = *q / common;
      common *= q->get_den();
    }
    if (!ok) continue;
    std::vector<Integer> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = Rational(out[i] * common).get_num();
    const auto check = apply(scaled, transpose);
    bool exact = true;
    for (std::size_t i = 0; i < n && exact; ++i) exact = check[i] == v[i] * common;
    if (exact) return out;
  }
  return std::nullopt;
}

}  // namespace nsring::detail
