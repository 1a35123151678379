#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace nsring {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses `num/den` or a bare integer. Decimal notation is rejected so that
/// exact inputs never pass through a float. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical `num/den` form, lowest terms, sign on the numerator. Integers
/// keep the `/1` suffix so every serialized rational has the same shape.
std::string to_string(const Rational& q);

/// Fixed-point decimal approximation used next to exact output.
std::string to_decimal(const Rational& q, int digits = 12);

/// Best rational approximation of `x` with denominator at most `max_den`,
/// computed from the exact binary value of the double by continued
/// fractions (convergents plus the final semiconvergent).
Rational best_approximation(double x, const Integer& max_den);

/// Same, for an exact rational input.
Rational best_approximation(const Rational& x, const Integer& max_den);

/// q^e for e >= 0.
Rational pow(const Rational& q, std::uint64_t e);

}  // namespace nsring
