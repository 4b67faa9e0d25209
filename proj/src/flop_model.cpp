#include "bandchol/flop_model.hpp"

#include <algorithm>
#include <string>

namespace bandchol {

namespace {

void check_shape(std::int64_t dim, std::int64_t bandwidth) {
  if (dim <= 0 || bandwidth < 0 || bandwidth >= dim) {
    throw InvalidBandwidth("flop model requires 0 <= k < N (N=" +
                           std::to_string(dim) +
                           ", k=" + std::to_string(bandwidth) + ")");
  }
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw CountOverflow("flop count exceeds 64 bits");
  }
  return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw CountOverflow("flop count exceeds 64 bits");
  }
  return out;
}

}  // namespace

FlopCount flops_exact(std::int64_t dim, std::int64_t bandwidth) {
  check_shape(dim, bandwidth);
  // Row i touches m = i - r + 1 columns. The inner sums collapse to
  // sum_{j} 2 (j - r + 1) + 2 m = m (m + 1) + 2 m = m (m + 3).
  // Rows with i <= k are truncated (m = i); every later row has m = k + 1.
  const auto k = static_cast<std::uint64_t>(bandwidth);
  const auto n = static_cast<std::uint64_t>(dim);
  std::uint64_t total = 0;
  const std::uint64_t short_rows = std::min(n, k + 1);
  for (std::uint64_t m = 1; m <= short_rows; ++m) {
    total = checked_add(total, checked_mul(m, m + 3));
  }
  if (n > short_rows) {
    const std::uint64_t full = checked_mul(k + 1, k + 4);
    total = checked_add(total, checked_mul(n - short_rows, full));
  }
  return {total};
}

FlopCount flops_approx(std::int64_t dim, std::int64_t bandwidth) {
  check_shape(dim, bandwidth);
  const auto k = static_cast<std::uint64_t>(bandwidth);
  const auto n = static_cast<std::uint64_t>(dim);
  return {checked_mul(checked_mul(n, k), k + 2)};
}

}  // namespace bandchol
