#pragma once

#include <cstdint>

#include "bandchol/errors.hpp"

namespace bandchol {

/// Floating-point operation count. A square root counts as one operation.
struct FlopCount {
  std::uint64_t value = 0;

  friend bool operator==(FlopCount, FlopCount) = default;
  friend auto operator<=>(FlopCount, FlopCount) = default;
};

/// Exact operation count of the banded left-looking Cholesky loop nest:
///
///   sum_i sum_{j=r..i} sum_{l=r..j} 2  +  sum_i sum_{j=r..i} 2,
///   r = max(1, i - k)   (1-based indices).
///
/// This is the normalization used for every GFLOP/s figure. Throws
/// CountOverflow if the total does not fit in 64 bits, and InvalidBandwidth
/// unless 0 <= k < N.
FlopCount flops_exact(std::int64_t dim, std::int64_t bandwidth);

/// Leading-order approximation N*k^2 + 2*N*k.
FlopCount flops_approx(std::int64_t dim, std::int64_t bandwidth);

}  // namespace bandchol
