#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "partlab/limits.hpp"
#include "partlab/symbolic.hpp"

namespace partlab {

// Where a recurrence came from: differencing two expansions (cap and the
// two tail variants), or external input (a catalog record or inline
// coefficients handed to the verifier).
struct Provenance {
  bool derived = false;
  long cap = 0;
  TailVariant v_pn = TailVariant::Full;
  TailVariant v_pn1 = TailVariant::Full;
};

// The identity p(n) = rhs, where rhs is a LinearForm over offsets >= 1.
// rhs.lo/rhs.hi carry the claimed validity range. The offset-1 coefficient
// is stored like any other (it can be 2 when both expansions are Full).
struct Recurrence {
  LinearForm rhs;
  Provenance provenance;
};

// rhs = p(n-1) + expand_symbolic(cap, v_pn) - shift_form(
//           expand_symbolic(cap-1, v_pn1), 1),
// collected exactly. The p(n-1) expansion uses cap-1 so that after the
// shift both sides truncate at the same deepest offset `cap`. Claimed
// range [2, cap]. Requires cap >= 3.
Recurrence derive_recurrence(long cap, TailVariant v_pn, TailVariant v_pn1);

// Outcome of scanning a recurrence against the oracle on a window.
struct VerificationReport {
  long window_lo = 0;
  long window_hi = -1;
  std::vector<bool> pass;  // pass[n - window_lo]
  // Whether every n in the claimed range (clipped to the window) passed.
  bool claimed_ok = false;
  // Maximal contiguous pass range containing the claimed lower bound;
  // empty (pass_hi < pass_lo) if the claimed lower bound itself fails.
  long pass_lo = 0;
  long pass_hi = -1;
  struct Failure {
    long n = 0;
    Int lhs, rhs;
  };
  // First failing n at or above the claimed lower bound, with both sides.
  std::optional<Failure> first_fail;
};

// pass at n iff p(n) == evaluate_form(rec.rhs, n, table). Requires the
// table to cover window_hi.
VerificationReport verify(const Recurrence& rec, long window_lo,
                          long window_hi, const PartitionTable& table);

// Maximal contiguous pass range containing the claimed range, scanned on
// [0, scan_to]; the lower end frequently extends below the claimed lo.
// Requires scan_to >= rec.rhs.hi.
std::pair<long, long> empirical_validity(const Recurrence& rec, long scan_to,
                                         const PartitionTable& table);

// Relation of a recurrence to Euler's series over the generalized
// pentagonal offsets 1, 2, 5, 7, 12, 15, 22, 26, ... with paired signs
// +,+,-,-,...:
//   ExactTruncation     -- offsets are exactly an initial segment of the
//                          pentagonal offsets with the Euler signs, unit
//                          coefficients and zero tail;
//   TruncationWithExtras -- the pentagonal offsets present form such an
//                          initial segment, but extra offsets or a nonzero
//                          tail remain;
//   Unrelated           -- anything else.
enum class PentagonalClass { ExactTruncation, TruncationWithExtras, Unrelated };

std::string to_string(PentagonalClass c);
PentagonalClass classify_pentagonal(const Recurrence& rec);

// Stable dedup key over the collected coefficients and the tail branches:
// "c1:v1,c2:v2,...|e:a0,a1|o:b0,b1" with offsets ascending and rationals
// in canonical form. Two derivations with identical content collide.
std::string canonical_key(const LinearForm& form);

struct CatalogEntry {
  Recurrence rec;
  std::string key;
  long empirical_lo = 0;
  long empirical_hi = -1;
  PentagonalClass classification = PentagonalClass::Unrelated;
};

struct MiningResult {
  // Deduplicated by canonical key, sorted by key for determinism; the
  // provenance of the first job that produced a key wins.
  std::vector<CatalogEntry> entries;
  // A derived recurrence that fails inside its claimed range. This would
  // falsify the derivation pipeline and must surface loudly.
  struct Anomaly {
    Provenance provenance;
    long n = 0;
    Int lhs, rhs;
  };
  std::vector<Anomaly> anomalies;
  std::vector<std::string> errors;  // per-job failures; the batch continues
  long jobs = 0;
};

// Runs derive + verify + empirical_validity + classify for every
// cap x variant pair, deduplicates, and aggregates anomalies and errors.
// Requires each cap >= 3 and scan_to >= max cap (violations become per-job
// errors); scan_to is bounded by limits.max_scan.
MiningResult mine(const std::vector<long>& caps,
                  const std::vector<std::pair<TailVariant, TailVariant>>& pairs,
                  long scan_to, const Limits& limits = {});

// All nine variant pairs in a fixed order.
std::vector<std::pair<TailVariant, TailVariant>> all_variant_pairs();

// rhs rendered with its claimed range, e.g.
// "p(n) = p(n-1) + p(n-2) - p(n-5) - p(n-7) + p(n-12)  [2 <= n <= 12]".
std::string render_recurrence(const Recurrence& rec);

// One catalog line: a JSON object with stable field order {key,
// coefficients, tail, claimed, empirical, provenance, classification}.
// Coefficients are [offset, "coef"] pairs with the coefficient as a
// decimal string; tail branches are ["c0", "c1"] rational strings.
std::string catalog_record(const CatalogEntry& entry);

// Parses one catalog line back into an entry (the round trip used by
// `verify --file`). Throws std::invalid_argument on malformed input.
CatalogEntry catalog_entry_from_json(const std::string& line);

// Builds an external recurrence from an inline spec: coeffs like
// "1:1,2:1,5:-1", tail branches like "0,0" (c0,c1 rationals), and a
// claimed range. Throws std::invalid_argument on malformed input.
Recurrence recurrence_from_coeff_spec(const std::string& coeffs,
                                      const std::string& tail_even,
                                      const std::string& tail_odd, long lo,
                                      long hi);

}  // namespace partlab
