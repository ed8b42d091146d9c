#pragma once

#include <mpfr.h>

#include <string>

#include "toeplitz_forge/numeric.hpp"

namespace toeplitz_forge {

inline constexpr mpfr_prec_t kDefaultPrecision = 128;
inline constexpr mpfr_prec_t kPrecisionCap = 16384;

// Starting precision: TOEPLITZ_FORGE_PRECISION if set, else kDefaultPrecision.
mpfr_prec_t configured_precision();
mpfr_prec_t working_precision();
void set_working_precision(mpfr_prec_t bits);

class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

enum class Verdict { kTrue, kFalse, kMaybe };

const char* to_string(Verdict v);

// Closed interval [lo, hi] with MPFR endpoints; every operation rounds outward.
class Interval {
 public:
  explicit Interval(mpfr_prec_t bits = working_precision());
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(const Interval& other);
  Interval& operator=(Interval&& other) noexcept;
  ~Interval();

  static Interval of(long v, mpfr_prec_t bits = working_precision());
  static Interval of(const Integer& v, mpfr_prec_t bits = working_precision());
  static Interval of(const Rational& v, mpfr_prec_t bits = working_precision());
  // Encloses [lo.lo, hi.hi].
  static Interval hull(const Interval& lo, const Interval& hi);
  static Interval log_of(const Integer& v, mpfr_prec_t bits = working_precision());
  static Interval pi(mpfr_prec_t bits = working_precision());

  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(lo_); }
  bool finite() const;
  bool contains_zero() const;

  double lo_double() const;
  double hi_double() const;
  double mid_double() const;

  Interval lower_point() const;
  Interval upper_point() const;

  Interval operator-() const;
  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);

  // Elementwise monotone functions; domain violations raise InvalidArgument.
  Interval log() const;
  Interval exp() const;
  // log Γ(x), valid for x ≥ 2.
  Interval lngamma() const;

  // Smallest integer ≥ every point, if the ceiling is the same at both ends.
  bool ceil_if_unique(Integer* out) const;
  Integer floor_lo() const;

  friend Verdict less(const Interval& a, const Interval& b);
  friend Verdict less_equal(const Interval& a, const Interval& b);

  // "m*2^e" forms, exact.
  std::string lo_dyadic() const;
  std::string hi_dyadic() const;
  static Interval from_dyadic(const std::string& lo, const std::string& hi);
  // Decimal rendering with the given significant digits, rounded outward.
  std::string str(int digits = 12) const;

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

}  // namespace toeplitz_forge
