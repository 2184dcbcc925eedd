#include "partlab/oracle.hpp"

#include <stdexcept>
#include <string>

#include "partlab/errors.hpp"

namespace partlab {

namespace {

const Int kZero(0);

void check_limit(long limit, const Limits& limits, const char* what) {
  if (limit < 0) {
    throw std::invalid_argument(std::string(what) + ": negative size " +
                                std::to_string(limit));
  }
  if (limit > limits.max_table) {
    throw ResourceLimitError(std::string(what) + ": " + std::to_string(limit) +
                             " exceeds the configured maximum of " +
                             std::to_string(limits.max_table));
  }
}

}  // namespace

const Int& PartitionTable::at(long m) const {
  if (m < 0) return kZero;
  if (m > limit) {
    throw std::invalid_argument("partition table of limit " +
                                std::to_string(limit) +
                                " cannot answer p(" + std::to_string(m) + ")");
  }
  return values[static_cast<size_t>(m)];
}

PartitionTable build_table(long limit, const Limits& limits) {
  check_limit(limit, limits, "build_table");
  PartitionTable table;
  table.limit = limit;
  table.values.assign(static_cast<size_t>(limit) + 1, Int(0));
  table.values[0] = 1;
  // dp over allowed parts: after processing part k, values[m] counts the
  // partitions of m into parts <= k; parts up to `limit` cover all of them.
  for (long part = 1; part <= limit; ++part) {
    for (long m = part; m <= limit; ++m) {
      table.values[static_cast<size_t>(m)] +=
          table.values[static_cast<size_t>(m - part)];
    }
  }
  return table;
}

PartitionTable build_table_pentagonal(long limit, const Limits& limits) {
  check_limit(limit, limits, "build_table_pentagonal");
  PartitionTable table;
  table.limit = limit;
  table.values.assign(static_cast<size_t>(limit) + 1, Int(0));
  table.values[0] = 1;
  for (long n = 1; n <= limit; ++n) {
    Int acc(0);
    // Generalized pentagonal offsets k(3k-1)/2 and k(3k+1)/2 share the
    // sign (-1)^(k+1).
    for (long k = 1;; ++k) {
      const long g1 = k * (3 * k - 1) / 2;
      if (g1 > n) break;
      const long g2 = k * (3 * k + 1) / 2;
      const bool plus = (k % 2 == 1);
      if (plus) {
        acc += table.values[static_cast<size_t>(n - g1)];
        if (g2 <= n) acc += table.values[static_cast<size_t>(n - g2)];
      } else {
        acc -= table.values[static_cast<size_t>(n - g1)];
        if (g2 <= n) acc -= table.values[static_cast<size_t>(n - g2)];
      }
    }
    table.values[static_cast<size_t>(n)] = acc;
  }
  return table;
}

Int restricted_count(const RestrictedQuery& q, const Limits& limits) {
  if (q.m < 0 || q.k < 0) {
    throw std::invalid_argument("restricted_count: negative argument");
  }
  if (q.m > limits.max_table) {
    throw ResourceLimitError("restricted_count: m = " + std::to_string(q.m) +
                             " exceeds the configured maximum of " +
                             std::to_string(limits.max_table));
  }
  if (q.m == 0) return 1;
  if (q.k == 0) return 0;
  std::vector<Int> dp(static_cast<size_t>(q.m) + 1, Int(0));
  dp[0] = 1;
  const long top = q.k < q.m ? q.k : q.m;
  for (long part = 1; part <= top; ++part) {
    for (long m = part; m <= q.m; ++m) {
      dp[static_cast<size_t>(m)] += dp[static_cast<size_t>(m - part)];
    }
  }
  return dp[static_cast<size_t>(q.m)];
}

namespace {

Int enumerate_rec(long m, long max_part) {
  if (m == 0) return 1;
  Int count(0);
  const long top = max_part < m ? max_part : m;
  for (long part = top; part >= 1; --part) {
    count += enumerate_rec(m - part, part);
  }
  return count;
}

}  // namespace

Int enumerate_count(long m, long max_part) {
  if (m < 0 || max_part < 0) {
    throw std::invalid_argument("enumerate_count: negative argument");
  }
  if (m > 40) {
    throw std::invalid_argument(
        "enumerate_count: m = " + std::to_string(m) +
        " exceeds the enumeration guard of 40");
  }
  return enumerate_rec(m, max_part);
}

}  // namespace partlab
