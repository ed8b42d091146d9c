#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace toeplitz_forge {

using Integer = mpz_class;
using Rational = mpq_class;
using Letter = std::uint64_t;

// Floor division; b must be nonzero.
Integer floor_div(const Integer& a, const Integer& b);
// Ceiling division; b must be nonzero.
Integer ceil_div(const Integer& a, const Integer& b);
// Representative of a mod b in [0, b); b must be positive.
Integer floor_mod(const Integer& a, const Integer& b);

std::string to_string(const Integer& v);
std::string to_string(const Rational& v);

Integer parse_integer(std::string_view text);

// Accepts "p/q", "-12", "0.3", "1e-2", "2.5E3". The result is exact.
Rational parse_rational(std::string_view text);

// Number of decimal digits of |v| (1 for zero).
std::size_t decimal_digits(const Integer& v);

std::uint64_t to_u64(const Integer& v);
bool fits_u64(const Integer& v);

}  // namespace toeplitz_forge
