#pragma once

namespace partlab {

// Resource ceilings. Library entry points take a Limits value and refuse
// work beyond it with a ResourceLimitError; the CLI populates one from the
// environment (see limits_from_env).
struct Limits {
  long max_table = 100000;         // largest PartitionTable limit
  long max_fractal = 2000;         // largest n accepted by fractal_p
  long max_trace_nodes = 1000000;  // node budget for build_trace
  long max_scan = 100000;          // largest verification scan window
};

// Reads PARTLAB_MAX_TABLE, PARTLAB_MAX_FRACTAL, PARTLAB_MAX_TRACE_NODES and
// PARTLAB_MAX_SCAN. Unset or non-positive/garbage values keep the defaults.
Limits limits_from_env();

}  // namespace partlab
