#pragma once

// Arithmetic modulo the Mersenne prime 2^61 - 1.

#include "nsring/rational.hpp"

#include <cstdint>
#include <stdexcept>

namespace nsring::modp {

inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

inline std::uint64_t reduce(unsigned __int128 x) {
  std::uint64_t lo = static_cast<std::uint64_t>(x & kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
  std::uint64_t s = lo + hi;
  // Products of reduced values are below 2^122; a second fold leaves s <= p.
  s = (s & kPrime) + (s >> 61);
  return s >= kPrime ? s - kPrime : s;
}

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s >= kPrime ? s - kPrime : s;
}

inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  return reduce(static_cast<unsigned __int128>(a) * b);
}

inline std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1U) r = mul(r, a);
    a = mul(a, a);
    e >>= 1U;
  }
  return r;
}

inline std::uint64_t inv(std::uint64_t a) {
  if (a == 0) throw std::domain_error("inverse of zero modulo p");
  return pow(a, kPrime - 2);
}

inline std::uint64_t from_int64(std::int64_t v) {
  if (v >= 0) return static_cast<std::uint64_t>(v) % kPrime;
  const std::uint64_t m = (static_cast<std::uint64_t>(-(v + 1)) + 1) % kPrime;
  return m == 0 ? 0 : kPrime - m;
}

inline std::uint64_t from_fraction(std::int64_t num, std::int64_t den) {
  const std::uint64_t d = from_int64(den);
  if (d == 0) throw std::domain_error("denominator divisible by the modulus");
  return mul(from_int64(num), inv(d));
}

inline std::uint64_t from_integer(const Integer& z) {
  Integer r = z % Integer(static_cast<unsigned long>(kPrime));
  if (r < 0) r += Integer(static_cast<unsigned long>(kPrime));
  return r.get_ui();
}

inline std::uint64_t from_rational(const Rational& q) {
  const std::uint64_t d = from_integer(q.get_den());
  if (d == 0) throw std::domain_error("denominator divisible by the modulus");
  return mul(from_integer(q.get_num()), inv(d));
}

}  // namespace nsring::modp
