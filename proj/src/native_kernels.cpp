#include <cmath>

#include "bandchol/kernels.hpp"

namespace bandchol {

namespace {

void check(bool ok, const char* what) {
  if (!ok) {
    throw ShapeMismatch(what);
  }
}

}  // namespace

void NativeKernels::factor_diag(MatrixView a) const {
  check(a.rows == a.cols, "factor_diag: block must be square");
  const index_t m = a.rows;
  // Left-looking by columns: column j is updated by every finished column p < j
  // and then scaled by its pivot.
  for (index_t j = 0; j < m; ++j) {
    double* cj = a.column(j);
    for (index_t p = 0; p < j; ++p) {
      const double* cp = a.column(p);
      const double s = cp[j];
      for (index_t i = j; i < m; ++i) {
        cj[i] -= cp[i] * s;
      }
    }
    const double d = cj[j];
    if (!(d > 0.0)) {
      throw NotPositiveDefinite(j);
    }
    const double root = std::sqrt(d);
    cj[j] = root;
    for (index_t i = j + 1; i < m; ++i) {
      cj[i] /= root;
    }
  }
}

void NativeKernels::solve_panel(MatrixView b, ConstMatrixView l) const {
  check(l.rows == l.cols && b.cols == l.rows,
        "solve_panel: operand shapes do not conform");
  const index_t m = b.rows;
  const index_t c = b.cols;
  for (index_t q = 0; q < c; ++q) {
    if (l(q, q) == 0.0) {
      throw SingularFactor("solve_panel: zero diagonal in triangular factor");
    }
  }
  // X L^T = B, solved column by column of X.
  for (index_t q = 0; q < c; ++q) {
    double* xq = b.column(q);
    for (index_t p = 0; p < q; ++p) {
      const double* xp = b.column(p);
      const double s = l(q, p);
      for (index_t i = 0; i < m; ++i) {
        xq[i] -= xp[i] * s;
      }
    }
    const double d = l(q, q);
    for (index_t i = 0; i < m; ++i) {
      xq[i] /= d;
    }
  }
}

void NativeKernels::update_general(MatrixView c, ConstMatrixView a,
                                   ConstMatrixView b) const {
  check(a.rows == c.rows && b.rows == c.cols && a.cols == b.cols,
        "update_general: operand shapes do not conform");
  const index_t m = c.rows;
  const index_t inner = a.cols;
  for (index_t q = 0; q < c.cols; ++q) {
    double* cq = c.column(q);
    index_t r = 0;
    // Four columns of A per sweep over cq; each element still sees the
    // subtractions in increasing r.
    for (; r + 4 <= inner; r += 4) {
      const double* a0 = a.column(r);
      const double* a1 = a.column(r + 1);
      const double* a2 = a.column(r + 2);
      const double* a3 = a.column(r + 3);
      const double s0 = b(q, r);
      const double s1 = b(q, r + 1);
      const double s2 = b(q, r + 2);
      const double s3 = b(q, r + 3);
      for (index_t i = 0; i < m; ++i) {
        double v = cq[i];
        v -= a0[i] * s0;
        v -= a1[i] * s1;
        v -= a2[i] * s2;
        v -= a3[i] * s3;
        cq[i] = v;
      }
    }
    for (; r < inner; ++r) {
      const double* ar = a.column(r);
      const double s = b(q, r);
      for (index_t i = 0; i < m; ++i) {
        cq[i] -= ar[i] * s;
      }
    }
  }
}

void NativeKernels::update_symmetric(MatrixView c, ConstMatrixView a) const {
  check(c.rows == c.cols && a.rows == c.rows,
        "update_symmetric: operand shapes do not conform");
  const index_t m = c.rows;
  const index_t inner = a.cols;
  for (index_t q = 0; q < m; ++q) {
    double* cq = c.column(q);
    index_t r = 0;
    for (; r + 4 <= inner; r += 4) {
      const double* a0 = a.column(r);
      const double* a1 = a.column(r + 1);
      const double* a2 = a.column(r + 2);
      const double* a3 = a.column(r + 3);
      const double s0 = a0[q];
      const double s1 = a1[q];
      const double s2 = a2[q];
      const double s3 = a3[q];
      for (index_t i = q; i < m; ++i) {
        double v = cq[i];
        v -= a0[i] * s0;
        v -= a1[i] * s1;
        v -= a2[i] * s2;
        v -= a3[i] * s3;
        cq[i] = v;
      }
    }
    for (; r < inner; ++r) {
      const double* ar = a.column(r);
      const double s = ar[q];
      for (index_t i = q; i < m; ++i) {
        cq[i] -= ar[i] * s;
      }
    }
  }
}

const KernelBackend& native_kernels() {
  static const NativeKernels instance;
  return instance;
}

}  // namespace bandchol
