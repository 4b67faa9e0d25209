#pragma once

#include <algorithm>
#include <cmath>

#include "bandchol/band_matrix.hpp"
#include "oracles.hpp"

namespace testing_support {

inline oracle::Dense dense_of(const bandchol::BandedMatrix& a) {
  return oracle::Dense(a.dim(), a.to_dense());
}

/// Largest |x - y| / max(1, |y|) over the stored band.
inline double max_band_rel_diff(const bandchol::BandedMatrix& x,
                                const bandchol::BandedMatrix& y) {
  double worst = 0.0;
  for (bandchol::index_t j = 0; j < x.dim(); ++j) {
    const bandchol::index_t last = std::min(x.dim() - 1, j + x.bandwidth());
    for (bandchol::index_t i = j; i <= last; ++i) {
      const double d = std::abs(x(i, j) - y(i, j));
      worst = std::max(worst, d / std::max(1.0, std::abs(y(i, j))));
    }
  }
  return worst;
}

/// Largest element-wise relative difference between a band factor and a dense
/// lower factor, with entries of magnitude below 1 compared absolutely.
inline double max_rel_diff_vs_dense(const bandchol::BandedMatrix& band,
                                    const oracle::Dense& dense) {
  double worst = 0.0;
  for (bandchol::index_t j = 0; j < band.dim(); ++j) {
    const bandchol::index_t last = std::min(band.dim() - 1, j + band.bandwidth());
    for (bandchol::index_t i = j; i <= last; ++i) {
      const double d = std::abs(band(i, j) - dense(i, j));
      worst = std::max(worst, d / std::max(1.0, std::abs(dense(i, j))));
    }
  }
  return worst;
}

}  // namespace testing_support
