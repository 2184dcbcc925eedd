#pragma once

#include <map>
#include <string>

#include "partlab/bigint.hpp"
#include "partlab/oracle.hpp"
#include "partlab/tail_variant.hpp"

namespace partlab {

// Parity-split affine tail G(n): even_c0 + even_c1*n for even n,
// odd_c0 + odd_c1*n for odd n. Coefficients are exact rationals whose
// denominators divide 2; a well-formed tail is integer-valued at every
// integer of the matching parity.
struct QuasiPoly2 {
  Rat even_c0, even_c1, odd_c0, odd_c1;

  bool is_zero() const;
  Rat value_rat(long n) const;
  // Integer value at n; throws std::logic_error if the branch value is not
  // an integer (which would mean the tail was assembled incorrectly).
  Int value_at(long n) const;
  bool integer_valued(long lo, long hi) const;
  // G(n - d): branches swap when d is odd, and both re-center.
  QuasiPoly2 shifted(long d) const;
};

bool operator==(const QuasiPoly2& a, const QuasiPoly2& b);
QuasiPoly2 operator+(const QuasiPoly2& a, const QuasiPoly2& b);
QuasiPoly2 operator-(const QuasiPoly2& a, const QuasiPoly2& b);

// A signed combination sum_c coeffs[c] * p(n-c) plus a quasi-polynomial
// tail. `cap` bounds the stored offsets; [lo, hi] is the validity window
// the form was built with. For a full expansion of p(n) the window is the
// claimed range on which the form evaluates to p(n); for a single expanded
// cell it is the window on which truncation at `cap` loses nothing.
struct LinearForm {
  std::map<long, Int> coeffs;  // offset -> nonzero coefficient
  QuasiPoly2 tail;
  long cap = 0;
  long lo = 2;
  long hi = 0;
};

// Symbolically expands the cell rooted at the parcel p(n-a) under the head
// p(n-b) (b = 0 means the top-level head p(n)): the result is p(n-a) minus
// the recursively expanded children at offsets 2a-b+1 .. cap. The child
// range is independent of n because any term p(n-c) with c > n vanishes;
// truncation at `cap` is lossless for n <= cap. Requires 0 <= b < a <= cap.
LinearForm expand_parcel_symbolic(long a, long b, long cap);

// Fully expanded form of p(n) with offsets in [1, cap] and claimed range
// [2, cap]. OneSub replaces the offset-1 parcel by the constant tail 1;
// TwoSub additionally replaces the offset-2 parcel by floor(n/2), giving
// the tail floor(n/2) + 1. Requires cap >= 2.
LinearForm expand_symbolic(long cap, TailVariant variant);

// Re-expresses a form for p(m) in terms of n with m = n - d: offsets and
// the validity window move up by d and the tail becomes tail(n - d).
LinearForm shift_form(const LinearForm& form, long d);

// sum coeffs[c] * p(n-c) + tail(n), with p at negative indices contributing
// zero. Requires the table to cover max(0, n-1).
Int evaluate_form(const LinearForm& form, long n, const PartitionTable& table);

// Smallest l such that the form evaluates to p(n) for every n in [l, hi].
// The claimed window itself must pass (std::logic_error otherwise); the
// result is often below the claimed lo of 2.
long empirical_lower_bound(const LinearForm& form, const PartitionTable& table);

// The largest offset whose symbolic child list is nonempty, i.e. the first
// parcel to expand when the display is written in ascending-tab order:
// floor((cap - 1) / 2).
long first_expanding_offset(long cap);

// Canonical text: terms sorted by ascending offset, coefficient magnitudes
// folded into the sign, tail appended, then the validity window, e.g.
// "p(n) = p(n-1) + p(n-2) - p(n-5) - p(n-7) + p(n-12)  [2 <= n <= 12]".
std::string render_form(const LinearForm& form);

}  // namespace partlab
