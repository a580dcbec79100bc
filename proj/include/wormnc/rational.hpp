#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace wormnc {

/// Exact rational number. All curve parameters and bounds are kept exact;
/// conversion to decimal happens only at report time.
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// Parse "5", "-3/20", "0.05", "1.25e2" into an exact rational.
Rat rat_from_string(const std::string& text);

double rat_to_double(const Rat& r);

/// Fixed-point decimal rendering with `digits` fractional digits.
/// When round_up is set the value is rounded toward +infinity at the last
/// digit, so printed upper bounds stay upper bounds.
std::string rat_to_decimal(const Rat& r, int digits, bool round_up = false);

/// Exact "p/q" (or "p" when q == 1) rendering.
std::string rat_to_string(const Rat& r);

}  // namespace wormnc
