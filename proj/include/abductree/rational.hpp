#ifndef ABDUCTREE_RATIONAL_HPP
#define ABDUCTREE_RATIONAL_HPP

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace abductree {

/** Exact rational number. All scores, leaf values and thresholds use it. */
using Rational = mpq_class;

/**
 * Parses a decimal literal such as `-0.0536704734`, `12`, `.5` or
 * `1.25e-05` into the exact rational it denotes. No binary rounding takes
 * place. Throws std::invalid_argument on anything else (including inf/nan).
 */
Rational parse_decimal(std::string_view text);

/** True when the value has a terminating decimal expansion. */
bool is_finite_decimal(const Rational& value);

/**
 * Exact decimal rendering, e.g. 311460674/10^9 -> "0.311460674".
 * Throws std::domain_error for values without a terminating expansion.
 */
std::string to_decimal_string(const Rational& value);

/** Rounded (half away from zero) fixed-point rendering for display. */
std::string to_fixed_string(const Rational& value, int digits);

/** Nearest double; for reporting only. */
double to_double(const Rational& value);

}  // namespace abductree

#endif  // ABDUCTREE_RATIONAL_HPP
