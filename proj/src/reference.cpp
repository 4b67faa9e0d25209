#include "bandchol/reference.hpp"

#include <algorithm>
#include <cmath>

namespace bandchol {

FactorResult factor_reference(BandedMatrix& a, bool instrument) {
  const index_t n = a.dim();
  const index_t k = a.bandwidth();
  std::uint64_t flops = 0;
  for (index_t i = 0; i < n; ++i) {
    const index_t r = std::max<index_t>(0, i - k);
    for (index_t j = r; j <= i; ++j) {
      double t = 0.0;
      for (index_t l = r; l < j; ++l) {
        t += a(i, l) * a(j, l);
      }
      if (instrument) {
        flops += 2 * static_cast<std::uint64_t>(j - r) + 2;
      }
      if (i == j) {
        const double d = a(i, i) - t;
        if (!(d > 0.0)) {
          throw NotPositiveDefinite(i);
        }
        a(i, i) = std::sqrt(d);
      } else {
        a(i, j) = (a(i, j) - t) / a(j, j);
      }
    }
  }
  FactorResult result;
  if (instrument) {
    result.flop_count = flops;
  }
  return result;
}

FlopCount count_flops_instrumented(std::int64_t dim, std::int64_t bandwidth) {
  if (dim <= 0 || bandwidth < 0 || bandwidth >= dim) {
    throw InvalidBandwidth("count_flops_instrumented requires 0 <= k < N");
  }
  std::uint64_t count = 0;
  for (std::int64_t i = 1; i <= dim; ++i) {
    const std::int64_t r = std::max<std::int64_t>(1, i - bandwidth);
    for (std::int64_t j = r; j <= i; ++j) {
      for (std::int64_t l = r; l <= j; ++l) {
        count += 2;  // t += L(i,l) * L(j,l)
      }
      count += 2;  // sqrt(A - t) or (A - t) / L(j,j)
    }
  }
  return {count};
}

}  // namespace bandchol
