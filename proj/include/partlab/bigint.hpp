#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace partlab {

// All counts are exact arbitrary-precision integers; all tail coefficients
// are exact rationals. No floating point is used anywhere in the library.
using Int = mpz_class;
using Rat = mpq_class;

inline std::string to_decimal(const Int& v) { return v.get_str(); }

// "p" for integers, "p/q" otherwise (canonical GMP form, q > 0).
inline std::string to_decimal(const Rat& v) { return v.get_str(); }

// Parses "p" or "p/q"; throws std::invalid_argument on malformed input.
inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (s.empty() || r.set_str(s, 10) != 0) {
    throw std::invalid_argument("malformed rational: '" + s + "'");
  }
  r.canonicalize();
  return r;
}

}  // namespace partlab
