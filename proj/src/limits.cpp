#include "partlab/limits.hpp"

#include <cstdlib>

namespace partlab {

namespace {

void read_env(const char* name, long& slot) {
  const char* value = std::getenv(name);
  if (value == nullptr) return;
  char* end = nullptr;
  const long parsed = std::strtol(value, &end, 10);
  if (end != value && end != nullptr && *end == '\0' && parsed > 0) {
    slot = parsed;
  }
}

}  // namespace

Limits limits_from_env() {
  Limits limits;
  read_env("PARTLAB_MAX_TABLE", limits.max_table);
  read_env("PARTLAB_MAX_FRACTAL", limits.max_fractal);
  read_env("PARTLAB_MAX_TRACE_NODES", limits.max_trace_nodes);
  read_env("PARTLAB_MAX_SCAN", limits.max_scan);
  return limits;
}

}  // namespace partlab
