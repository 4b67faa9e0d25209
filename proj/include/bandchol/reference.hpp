#pragma once

#include <cstdint>
#include <optional>

#include "bandchol/band_matrix.hpp"
#include "bandchol/flop_model.hpp"

namespace bandchol {

struct FactorResult {
  /// Operations actually executed (multiply, add, subtract, divide and square
  /// root each count one). Present only when instrumentation was requested.
  std::optional<std::uint64_t> flop_count;
};

/// Serial left-looking banded Cholesky, row by row. Overwrites `a` with L.
///
/// For each row i and each column j in [max(0, i-k), i]:
///   t = sum_{l = max(0, i-k)}^{j-1} L(i,l) L(j,l)
///   L(i,i) = sqrt(A(i,i) - t)            if j == i
///   L(i,j) = (A(i,j) - t) / L(j,j)       otherwise
///
/// Throws NotPositiveDefinite(i) when A(i,i) - t is not strictly positive; `a`
/// is left partially overwritten in that case.
FactorResult factor_reference(BandedMatrix& a, bool instrument = false);

/// Runs the loop skeleton of the banded left-looking algorithm with the inner
/// accumulation bounded by l <= j (as the operation-count model is written),
/// tallying 2 per accumulate and 2 per finalize statement. No arithmetic on
/// matrix data is performed.
FlopCount count_flops_instrumented(std::int64_t dim, std::int64_t bandwidth);

}  // namespace bandchol
