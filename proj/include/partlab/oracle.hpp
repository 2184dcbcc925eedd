#pragma once

#include <vector>

#include "partlab/bigint.hpp"
#include "partlab/limits.hpp"

namespace partlab {

// Dense table of p(0..limit), the ground truth every other component is
// validated against. Immutable after construction and freely shareable.
struct PartitionTable {
  long limit = 0;
  std::vector<Int> values;  // values[m] = p(m), size limit + 1

  // p(m) under the convention p(m) = 0 for m < 0. Indices above the table
  // limit are out of contract and throw std::invalid_argument.
  const Int& at(long m) const;
};

// Classic dynamic program over allowed parts 1..limit. Deliberately
// independent of both the pentagonal recurrence and the generator method,
// so neither is ever validated against itself.
PartitionTable build_table(long limit, const Limits& limits = {});

// Euler's full recurrence over generalized pentagonal offsets
// 1, 2, 5, 7, 12, 15, 22, 26, ... with paired signs +,+,-,-,...
// Produces a table identical to build_table(limit).
PartitionTable build_table_pentagonal(long limit, const Limits& limits = {});

// Number being partitioned (m) and the largest allowed part (k).
struct RestrictedQuery {
  long m = 0;
  long k = 0;
};

// Count of partitions of q.m into parts each <= q.k. Conventions:
// 1 when m = 0 (the empty partition), 0 when m > 0 and k = 0.
Int restricted_count(const RestrictedQuery& q, const Limits& limits = {});

inline Int restricted_count(long m, long k, const Limits& limits = {}) {
  return restricted_count(RestrictedQuery{m, k}, limits);
}

// Slow backtracking enumerator used as a test-only cross-check of
// restricted_count. Guarded to m <= 40 to keep runtime bounded.
Int enumerate_count(long m, long max_part);

}  // namespace partlab
