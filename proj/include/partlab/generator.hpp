#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "partlab/bigint.hpp"
#include "partlab/limits.hpp"
#include "partlab/oracle.hpp"
#include "partlab/tail_variant.hpp"

namespace partlab {

// Number of child parcels generated by a parcel with tab tau under a father
// whose head tab is head: lambda = max(0, 2*tau - head). The children carry
// tabs 0..lambda-1. `bias` shifts the rule to 2*tau - head + bias; it exists
// only so the self-test can prove that a corrupted rule is caught, and every
// production path uses bias = 0.
long child_count(long tau, long head, int bias = 0);

// Evaluates fully expanded parcels against a fixed table, sharing one memo
// across queries. The value of the parcel {p(tab)} under father head equals
// the number of partitions of tab into parts <= head - tab, which is what
// the restricted-count oracle computes independently.
class ParcelEvaluator {
 public:
  explicit ParcelEvaluator(const PartitionTable& table, int bias = 0);

  // Requires 0 <= tab < head and tab <= table.limit. The result is
  // p(tab) minus the values of the lambda child parcels, each expanded
  // under head tab; always >= 0.
  Int value(long tab, long head);

 private:
  const PartitionTable* table_;
  int bias_;
  // The value depends on tab and head only through (tab, head - tab).
  std::map<std::pair<long, long>, Int> memo_;
};

// One-shot convenience wrapper around ParcelEvaluator.
Int parcel_value(long tab, long head, const PartitionTable& table);

// p(0..n) computed bottom-up purely through the generator rule: each new
// p(i) is the sum of its parcel values, and those parcel values only read
// previously fractal-computed entries. Never consults the oracle tables.
std::vector<Int> fractal_values(long n, const Limits& limits = {},
                                int bias = 0);

// p(n) via fractal_values.
Int fractal_p(long n, const Limits& limits = {}, int bias = 0);

// A node of the explicit expansion tree. A Parcel is an unexpanded leaf
// {p(tab)} (zero children under its father's head); a Cell is an expanded
// parcel [p(tab) - children...]. Children appear in increasing tab order
// starting at 0, and a Cell always has at least one child.
struct ExpansionNode {
  enum class Kind { Parcel, Cell };
  Kind kind = Kind::Parcel;
  long tab = 0;
  std::vector<ExpansionNode> children;
};

// Fully expanded decomposition of p(n) plus any closed tail terms that the
// variant substituted for the top parcels.
struct TraceDocument {
  long n = 0;
  TailVariant variant = TailVariant::Full;
  std::vector<ExpansionNode> roots;
  // (rendered label, value): ("1", 1) for OneSub; for TwoSub additionally
  // ("<n>/2", n/2) when n is even or ("(<n>-1)/2", (n-1)/2) when n is odd.
  std::vector<std::pair<std::string, Int>> tail_terms;
  Int total;            // always equals p(n)
  long steps = 0;       // 1 + deepest node depth: the "zoom" generation count
  long node_count = 0;  // nodes materialized in roots
};

// Builds the fully expanded tree for p(n). Substituting variants require
// n >= 2 (std::invalid_argument otherwise); the node budget in `limits`
// bounds tree size (ResourceLimitError beyond it).
TraceDocument build_trace(long n, TailVariant variant,
                          const Limits& limits = {}, int bias = 0);

// Deterministic text: leaves as `p(k)`, cells as `[p(k) - ...]`, terms
// joined with +/-, tail terms appended, greedily wrapped at 80 columns with
// a 4-space continuation indent, and a final `= <total>` line. The rendered
// arithmetic re-evaluates to doc.total.
std::string render_trace(const TraceDocument& doc);

// Machine-readable dump: one JSON object with the nested tree as arrays of
// {kind, tab, children}. Schema-stable field order.
std::string trace_to_json(const TraceDocument& doc);

}  // namespace partlab
