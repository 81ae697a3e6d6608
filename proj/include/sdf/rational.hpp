#pragma once
// Exact rational scalar type and conversions used throughout the library.
//
// All geometry and all filtration values are computed over GMP rationals (Q).
// Floating point appears only at the outermost reporting layer (square roots
// of exact squared scales), via a 106-bit staged conversion to long double so
// that printed values are deterministic across runs and platforms.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace sdf {

using Q = mpq_class;
using Z = mpz_class;

inline int sgn(const Q& q) { return sgn(q.get_num()) ; }

inline Q q_of(long num, long den = 1) {
  Q q(num, den);
  q.canonicalize();
  return q;
}

// Canonical "num/den" form (den >= 1, gcd 1), the on-disk representation.
inline std::string q_str(const Q& q) {
  Q c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

// Accepts "n", "n/d", and plain decimals like "-1.25" (converted exactly).
// Throws std::runtime_error on malformed input or zero denominator.
inline Q parse_q(const std::string& tok) {
  if (tok.empty()) throw std::runtime_error("empty rational token");
  auto bad = [&]() -> std::runtime_error {
    return std::runtime_error("malformed rational '" + tok + "'");
  };
  auto all_digits = [](const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  bool neg = tok[0] == '-';
  std::string body = (tok[0] == '-' || tok[0] == '+') ? tok.substr(1) : tok;
  if (body.empty()) throw bad();
  Q q;
  auto slash = body.find('/');
  auto dot = body.find('.');
  if (slash != std::string::npos) {
    std::string ns = body.substr(0, slash), ds = body.substr(slash + 1);
    if (!all_digits(ns) || !all_digits(ds)) throw bad();
    Z den(ds);
    if (den == 0) throw std::runtime_error("zero denominator in '" + tok + "'");
    q = Q(Z(ns), den);
  } else if (dot != std::string::npos) {
    std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if (ip.empty() && fp.empty()) throw bad();
    if (!ip.empty() && !all_digits(ip)) throw bad();
    if (!fp.empty() && !all_digits(fp)) throw bad();
    Z ipart = ip.empty() ? Z(0) : Z(ip);
    Z scale = 1, fpart = 0;
    for (char c : fp) {
      scale *= 10;
      fpart = fpart * 10 + (c - '0');
    }
    q = Q(ipart * scale + fpart, scale);
  } else {
    if (!all_digits(body)) throw bad();
    q = Q(Z(body), Z(1));
  }
  if (neg) q = -q;
  q.canonicalize();
  return q;
}

// Staged conversion Q -> long double with ~106 significant bits.
inline long double q_to_ld(const Q& q) {
  mpf_class f(0, 160);
  mpf_set_q(f.get_mpf_t(), q.get_mpq_t());
  double hi = f.get_d();
  mpf_class rem = f - hi;
  double lo = rem.get_d();
  return static_cast<long double>(hi) + static_cast<long double>(lo);
}

// alpha = sqrt(s) for a squared scale s >= 0.
inline long double alpha_of_s(const Q& s) {
  if (sgn(s) < 0) throw std::runtime_error("alpha_of_s: negative squared scale");
  return std::sqrt(q_to_ld(s));
}

// 17 significant digits, the reporting format for real-valued outputs.
inline std::string fmt_ld(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  return std::string(buf);
}

}  // namespace sdf
