#pragma once

// Exact rational arithmetic for every coordinate and cost on the line.
// Backed by GMP's mpq_class; values are kept canonical (gcd 1, den > 0).

#include <gmpxx.h>

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oml {

using Rational = mpq_class;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Canonical "num/den" encoding. Integers still carry "/1".
inline std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Accepts "num/den" or a bare integer "num". Surrounding whitespace is not allowed.
inline Rational parse_rational(std::string_view text) {
  auto valid_int = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
  };
  auto strip_plus = [](std::string_view s) {
    return std::string(!s.empty() && s[0] == '+' ? s.substr(1) : s);
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den)) {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  }
  mpz_class n(strip_plus(num), 10);
  mpz_class d(strip_plus(den), 10);
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

/// n/d in canonical form. mpq_class(n, d) alone does not reduce.
inline Rational make_rational(long n, long d) {
  if (d == 0) throw std::invalid_argument("make_rational: zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

/// 2^e for any integer e.
inline Rational pow2(long e) {
  Rational q(1);
  if (e >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return q;
}

inline Rational pow_int(const Rational& base, unsigned e) {
  Rational result(1);
  for (unsigned i = 0; i < e; ++i) result *= base;
  return result;
}

inline Rational abs_diff(const Rational& a, const Rational& b) {
  return a < b ? Rational(b - a) : Rational(a - b);
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// 15 significant digits.
inline std::string to_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string to_decimal(const Rational& q) { return to_decimal(q.get_d()); }

}  // namespace oml
