#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace rg {

using Rational = mpq_class;

// Parses "a/b", "-a/b" or an integer literal; the result is reduced.
Rational parse_rational(const std::string& text);

// num/den in canonical form; mpq_class(num, den) alone leaves it unreduced.
inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Reduced "num/den", or "num" when the denominator is 1.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_positive(const Rational& q) { return sgn(q) > 0; }

Rational sum(const std::vector<Rational>& values);

std::string join_rationals(const std::vector<Rational>& values, const std::string& sep);

std::string sha256_hex(const std::string& data);

}  // namespace rg
