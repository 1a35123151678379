#include "nsring/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace nsring {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

Integer parse_integer(std::string_view s) {
  std::string tmp(s);
  if (!tmp.empty() && tmp[0] == '+') tmp.erase(0, 1);
  return Integer(tmp, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (!is_integer_literal(text))
      throw std::invalid_argument("not an exact rational: '" + std::string(text) + "'");
    return Rational(parse_integer(text));
  }
  const auto num = trim(text.substr(0, slash));
  const auto den = trim(text.substr(slash + 1));
  if (!is_integer_literal(num) || !is_integer_literal(den))
    throw std::invalid_argument("not an exact rational: '" + std::string(text) + "'");
  Integer d = parse_integer(den);
  if (d == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
  Rational q(parse_integer(num), d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal(const Rational& q, int digits) {
  // Round half away from zero at the requested number of digits.
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Rational scaled = abs(q) * scale;
  Integer whole = scaled.get_num() / scaled.get_den();
  Rational frac = scaled - Rational(whole);
  if (frac >= Rational(1, 2)) whole += 1;
  std::string s = whole.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits))
      s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  if (sgn(q) < 0 && whole != 0) s.insert(0, "-");
  return s;
}

Rational best_approximation(const Rational& x, const Integer& max_den) {
  if (max_den < 1) throw std::invalid_argument("max_den must be positive");
  if (x.get_den() <= max_den) return x;
  // Continued fraction of |x|; h/k are convergents.
  const bool neg = sgn(x) < 0;
  Rational y = abs(x);
  Integer h_prev = 1, k_prev = 0;  // h_{-1}, k_{-1}
  Integer h_prev2 = 0, k_prev2 = 1;  // h_{-2}, k_{-2}
  Integer num = y.get_num(), den = y.get_den();
  Rational best;
  while (den != 0) {
    Integer a = num / den;
    Integer h = a * h_prev + h_prev2;
    Integer k = a * k_prev + k_prev2;
    if (k > max_den) {
      // Largest semiconvergent that still fits.
      Integer t = (max_den - k_prev2) / k_prev;
      Rational semi(t * h_prev + h_prev2, t * k_prev + k_prev2);
      semi.canonicalize();
      Rational conv(h_prev, k_prev);
      conv.canonicalize();
      best = (abs(semi - y) < abs(conv - y)) ? semi : conv;
      return neg ? Rational(-best) : best;
    }
    h_prev2 = h_prev;
    k_prev2 = k_prev;
    h_prev = h;
    k_prev = k;
    Integer rem = num - a * den;
    num = den;
    den = rem;
  }
  best = Rational(h_prev, k_prev);
  best.canonicalize();
  return neg ? Rational(-best) : best;
}

Rational best_approximation(double x, const Integer& max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  return best_approximation(Rational(x), max_den);
}

Rational pow(const Rational& q, std::uint64_t e) {
  Rational result(1), base(q);
  while (e > 0) {
    if (e & 1U) result *= base;
    base *= base;
    e >>= 1U;
  }
  return result;
}

}  // namespace nsring
