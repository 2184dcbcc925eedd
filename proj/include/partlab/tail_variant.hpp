#pragma once

#include <string>

namespace partlab {

// Which substitutions are applied to the top of the decomposition
// p(n) = {p(0)} + {p(1)} + ... + {p(n-1)} before expanding:
//   Full   -- none;
//   OneSub -- the last term {p(n-1)} is replaced by the constant 1
//             (there is exactly one partition of n containing the part n-1);
//   TwoSub -- additionally {p(n-2)} is replaced by floor(n/2)
//             (the count of partitions whose largest part is 2).
enum class TailVariant { Full, OneSub, TwoSub };

// CLI spellings: "none", "one", "two".
std::string to_string(TailVariant v);
TailVariant tail_variant_from_string(const std::string& s);

}  // namespace partlab
