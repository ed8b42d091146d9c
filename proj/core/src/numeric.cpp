#include "toeplitz_forge/numeric.hpp"

#include <cctype>
#include <limits>

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Integer ceil_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Integer floor_mod(const Integer& a, const Integer& b) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

std::string to_string(const Integer& v) { return v.get_str(10); }

std::string to_string(const Rational& v) {
  Rational c = v;
  c.canonicalize();
  return c.get_num().get_str(10) + "/" + c.get_den().get_str(10);
}

Integer parse_integer(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw FormatError("empty integer");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) throw FormatError("malformed integer: " + s);
  for (std::size_t i = start; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      throw FormatError("malformed integer: " + s);
    }
  }
  if (s[0] == '+') s.erase(0, 1);
  return Integer(s, 10);
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw FormatError("empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer num = parse_integer(std::string_view(s).substr(0, slash));
    Integer den = parse_integer(std::string_view(s).substr(slash + 1));
    if (den == 0) throw FormatError("zero denominator: " + s);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  std::string mantissa = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mantissa = s.substr(0, e);
    Integer ex = parse_integer(std::string_view(s).substr(e + 1));
    if (!ex.fits_slong_p() || abs(ex) > 100000) {
      throw FormatError("exponent out of range: " + s);
    }
    exponent = ex.get_si();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa.erase(0, 1);
  }
  std::string digits;
  long fraction_digits = 0;
  bool seen_point = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_point) throw FormatError("malformed decimal: " + s);
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) ++fraction_digits;
    } else {
      throw FormatError("malformed decimal: " + s);
    }
  }
  if (digits.empty()) throw FormatError("malformed decimal: " + s);
  Integer num(digits, 10);
  if (negative) num = -num;
  long scale = exponent - fraction_digits;
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational r = scale < 0 ? Rational(num, ten_pow) : Rational(num * ten_pow, 1);
  r.canonicalize();
  return r;
}

std::size_t decimal_digits(const Integer& v) {
  if (v == 0) return 1;
  // mpz_sizeinbase may overshoot by one.
  std::size_t n = mpz_sizeinbase(v.get_mpz_t(), 10);
  Integer bound;
  mpz_ui_pow_ui(bound.get_mpz_t(), 10, n - 1);
  return abs(v) >= bound ? n : n - 1;
}

bool fits_u64(const Integer& v) {
  return v >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64;
}

std::uint64_t to_u64(const Integer& v) {
  if (!fits_u64(v)) throw InvalidArgument("value does not fit 64 bits: " + to_string(v));
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

}  // namespace toeplitz_forge
