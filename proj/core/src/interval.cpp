#include "toeplitz_forge/interval.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <sstream>

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {
namespace {

void ensure_exponent_range() {
  static std::once_flag once;
  std::call_once(once, [] {
    mpfr_set_emax(mpfr_get_emax_max());
    mpfr_set_emin(mpfr_get_emin_min());
  });
}

thread_local mpfr_prec_t tl_precision = 0;

mpfr_prec_t max_prec(const Interval& a, const Interval& b) {
  return std::max(a.precision(), b.precision());
}

void check_finite(const Interval& r, const char* what) {
  if (!r.finite()) {
    throw BudgetExceeded(std::string("interval representation limit reached in ") + what);
  }
}

std::string dyadic(mpfr_srcptr x) {
  if (!mpfr_number_p(x)) throw FormatError("non-finite interval endpoint");
  if (mpfr_zero_p(x)) return "0";
  Integer m;
  mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
  mp_bitcnt_t tz = mpz_scan1(m.get_mpz_t(), 0);
  if (tz > 0) {
    mpz_tdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), tz);
    e += static_cast<mpfr_exp_t>(tz);
  }
  return m.get_str(10) + "*2^" + std::to_string(static_cast<long long>(e));
}

void parse_dyadic(const std::string& text, Integer* m, long long* e) {
  auto star = text.find("*2^");
  if (star == std::string::npos) {
    *m = parse_integer(text);
    *e = 0;
    return;
  }
  *m = parse_integer(std::string_view(text).substr(0, star));
  Integer ex = parse_integer(std::string_view(text).substr(star + 3));
  if (!ex.fits_slong_p()) throw FormatError("dyadic exponent out of range: " + text);
  *e = ex.get_si();
}

}  // namespace

mpfr_prec_t configured_precision() {
  if (const char* env = std::getenv("TOEPLITZ_FORGE_PRECISION")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 32 && v <= kPrecisionCap) {
      return static_cast<mpfr_prec_t>(v);
    }
    throw InvalidArgument(std::string("TOEPLITZ_FORGE_PRECISION must be an integer in [32, ") +
                          std::to_string(kPrecisionCap) + "], got '" + env + "'");
  }
  return kDefaultPrecision;
}

mpfr_prec_t working_precision() {
  if (tl_precision == 0) tl_precision = configured_precision();
  return tl_precision;
}

void set_working_precision(mpfr_prec_t bits) { tl_precision = bits; }

PrecisionScope::PrecisionScope(mpfr_prec_t bits) : saved_(working_precision()) {
  set_working_precision(bits);
}

PrecisionScope::~PrecisionScope() { set_working_precision(saved_); }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kTrue:
      return "pass";
    case Verdict::kFalse:
      return "fail";
    case Verdict::kMaybe:
      return "undecided";
  }
  return "undecided";
}

Interval::Interval(mpfr_prec_t bits) {
  ensure_exponent_range();
  mpfr_init2(lo_, bits);
  mpfr_init2(hi_, bits);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) {
  mpfr_init2(lo_, other.precision());
  mpfr_init2(hi_, other.precision());
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : Interval(other) {}

Interval& Interval::operator=(const Interval& other) {
  if (this != &other) {
    mpfr_set_prec(lo_, other.precision());
    mpfr_set_prec(hi_, other.precision());
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& other) noexcept {
  if (this != &other) {
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
  }
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::of(long v, mpfr_prec_t bits) {
  Interval r(bits);
  mpfr_set_si(r.lo_, v, MPFR_RNDD);
  mpfr_set_si(r.hi_, v, MPFR_RNDU);
  return r;
}

Interval Interval::of(const Integer& v, mpfr_prec_t bits) {
  Interval r(bits);
  mpfr_set_z(r.lo_, v.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_, v.get_mpz_t(), MPFR_RNDU);
  return r;
}

Interval Interval::of(const Rational& v, mpfr_prec_t bits) {
  Interval r(bits);
  mpfr_set_q(r.lo_, v.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, v.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::hull(const Interval& lo, const Interval& hi) {
  Interval r(max_prec(lo, hi));
  mpfr_set(r.lo_, lo.lo_, MPFR_RNDD);
  mpfr_set(r.hi_, hi.hi_, MPFR_RNDU);
  if (mpfr_greater_p(r.lo_, r.hi_)) throw InvalidArgument("empty interval hull");
  return r;
}

Interval Interval::log_of(const Integer& v, mpfr_prec_t bits) {
  if (v <= 0) throw InvalidArgument("log of nonpositive integer");
  return of(v, bits).log();
}

Interval Interval::pi(mpfr_prec_t bits) {
  Interval r(bits);
  mpfr_const_pi(r.lo_, MPFR_RNDD);
  mpfr_const_pi(r.hi_, MPFR_RNDU);
  return r;
}

bool Interval::finite() const { return mpfr_number_p(lo_) && mpfr_number_p(hi_); }

bool Interval::contains_zero() const {
  return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
}

double Interval::lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Interval::mid_double() const {
  mpfr_t m;
  mpfr_init2(m, precision() + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  double out = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return out;
}

Interval Interval::lower_point() const {
  Interval r(precision());
  mpfr_set(r.lo_, lo_, MPFR_RNDD);
  mpfr_set(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval Interval::upper_point() const {
  Interval r(precision());
  mpfr_set(r.lo_, hi_, MPFR_RNDD);
  mpfr_set(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::operator-() const {
  Interval r(precision());
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval operator+(const Interval& a, const Interval& b) {
  Interval r(max_prec(a, b));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  check_finite(r, "addition");
  return r;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval r(max_prec(a, b));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  check_finite(r, "subtraction");
  return r;
}

Interval operator*(const Interval& a, const Interval& b) {
  mpfr_prec_t p = max_prec(a, b);
  Interval r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  mpfr_srcptr as[2] = {a.lo_, a.hi_};
  mpfr_srcptr bs[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : as) {
    for (auto y : bs) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  check_finite(r, "multiplication");
  return r;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw InvalidArgument("interval division by a range containing zero");
  Interval inv(b.precision());
  mpfr_ui_div(inv.lo_, 1, b.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, b.lo_, MPFR_RNDU);
  return a * inv;
}

Interval Interval::log() const {
  if (mpfr_sgn(lo_) <= 0) throw InvalidArgument("log of a range reaching zero");
  Interval r(precision());
  mpfr_log(r.lo_, lo_, MPFR_RNDD);
  mpfr_log(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::exp() const {
  Interval r(precision());
  mpfr_clear_overflow();
  mpfr_exp(r.lo_, lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, hi_, MPFR_RNDU);
  if (mpfr_overflow_p() || !r.finite()) {
    mpfr_clear_overflow();
    throw BudgetExceeded("interval representation limit reached in exp");
  }
  return r;
}

Interval Interval::lngamma() const {
  if (mpfr_cmp_ui(lo_, 2) < 0) throw InvalidArgument("lngamma requires x >= 2");
  mpfr_prec_t p = precision();
  if (mpfr_cmp_ui_2exp(hi_, 1, 64) < 0) {
    Interval r(p);
    mpfr_lngamma(r.lo_, lo_, MPFR_RNDD);
    mpfr_lngamma(r.hi_, hi_, MPFR_RNDU);
    return r;
  }
  // (x - 1/2) log x - x + log(2π)/2 < log Γ(x) < that + 1/(12x).
  auto stirling = [p](const Interval& x) {
    Interval half = Interval::of(Rational(1, 2), p);
    Interval two_pi = Interval::of(2L, p) * Interval::pi(p);
    return (x - half) * x.log() - x + half * two_pi.log();
  };
  Interval lo_part = stirling(lower_point());
  Interval x_hi = upper_point();
  Interval hi_part = stirling(x_hi) + Interval::of(1L, p) / (Interval::of(12L, p) * x_hi);
  return hull(lo_part, hi_part);
}

bool Interval::ceil_if_unique(Integer* out) const {
  Integer a, b;
  mpfr_get_z(a.get_mpz_t(), lo_, MPFR_RNDU);
  mpfr_get_z(b.get_mpz_t(), hi_, MPFR_RNDU);
  if (a != b) return false;
  // An integer endpoint at lo could sit on the ceiling boundary itself.
  if (mpfr_integer_p(lo_) && mpfr_cmp(lo_, hi_) != 0) return false;
  *out = a;
  return true;
}

Integer Interval::floor_lo() const {
  Integer a;
  mpfr_get_z(a.get_mpz_t(), lo_, MPFR_RNDD);
  return a;
}

Verdict less(const Interval& a, const Interval& b) {
  if (mpfr_less_p(a.hi_, b.lo_)) return Verdict::kTrue;
  if (mpfr_greaterequal_p(a.lo_, b.hi_)) return Verdict::kFalse;
  return Verdict::kMaybe;
}

Verdict less_equal(const Interval& a, const Interval& b) {
  if (mpfr_lessequal_p(a.hi_, b.lo_)) return Verdict::kTrue;
  if (mpfr_greater_p(a.lo_, b.hi_)) return Verdict::kFalse;
  return Verdict::kMaybe;
}

std::string Interval::lo_dyadic() const { return dyadic(lo_); }
std::string Interval::hi_dyadic() const { return dyadic(hi_); }

Interval Interval::from_dyadic(const std::string& lo, const std::string& hi) {
  Integer mlo, mhi;
  long long elo = 0, ehi = 0;
  parse_dyadic(lo, &mlo, &elo);
  parse_dyadic(hi, &mhi, &ehi);
  mpfr_prec_t bits = std::max<mpfr_prec_t>(
      working_precision(),
      static_cast<mpfr_prec_t>(std::max(mpz_sizeinbase(mlo.get_mpz_t(), 2),
                                        mpz_sizeinbase(mhi.get_mpz_t(), 2))));
  Interval r(bits);
  mpfr_set_z_2exp(r.lo_, mlo.get_mpz_t(), static_cast<mpfr_exp_t>(elo), MPFR_RNDD);
  mpfr_set_z_2exp(r.hi_, mhi.get_mpz_t(), static_cast<mpfr_exp_t>(ehi), MPFR_RNDU);
  if (mpfr_greater_p(r.lo_, r.hi_)) throw FormatError("dyadic interval with lo > hi");
  return r;
}

std::string Interval::str(int digits) const {
  char* a = nullptr;
  char* b = nullptr;
  mpfr_asprintf(&a, "%.*RDg", digits, lo_);
  mpfr_asprintf(&b, "%.*RUg", digits, hi_);
  std::string out = std::string("[") + a + ", " + b + "]";
  mpfr_free_str(a);
  mpfr_free_str(b);
  return out;
}

}  // namespace toeplitz_forge
