#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "cso/errors.hpp"

namespace cso {

using Rational = mpq_class;

/// Parses "p/q" or a plain integer, optionally signed. The result is canonical.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
  std::size_t first = s.find_first_not_of(" \t");
  if (first == std::string::npos) throw DomainError("empty rational literal");
  s.erase(0, first);

  auto digits_ok = [](std::string_view d, bool allow_sign) {
    if (allow_sign && !d.empty() && (d.front() == '-' || d.front() == '+')) d.remove_prefix(1);
    if (d.empty()) return false;
    for (char ch : d)
      if (ch < '0' || ch > '9') return false;
    return true;
  };
  const std::size_t slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? std::string("1") : s.substr(slash + 1);
  if (!digits_ok(num, true) || !digits_ok(den, false))
    throw DomainError("malformed rational literal '" + std::string(text) + "'");
  if (!num.empty() && num.front() == '+') num.erase(0, 1);

  Rational r;
  r.get_num() = mpz_class(num, 10);
  r.get_den() = mpz_class(den, 10);
  if (r.get_den() == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
  r.canonicalize();
  return r;
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline Rational pow2_inverse(unsigned k) {
  Rational r;
  r.get_num() = 1;
  mpz_ui_pow_ui(r.get_den().get_mpz_t(), 2, k);
  return r;
}

inline Rational pow3_inverse(unsigned long k) {
  Rational r;
  r.get_num() = 1;
  mpz_ui_pow_ui(r.get_den().get_mpz_t(), 3, k);
  return r;
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

/// Closed interval [lo, hi] known to contain an exact value.
struct Enclosure {
  Rational lo;
  Rational hi;

  bool exact() const { return lo == hi; }
};

/// Working precisions (in bits of width) tried before falling back to exact values.
inline constexpr std::array<unsigned, 4> kPrecisionLadder{64, 256, 1024, 4096};

/// A rigorous upper bound on a nonnegative quantity, tight when `exact`.
struct CertifiedBound {
  Rational value;
  bool exact = true;

  friend bool operator==(const CertifiedBound&, const CertifiedBound&) = default;
};

}  // namespace cso
