#include "blas_kernels.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>

namespace bandchol {

namespace {

void check(bool ok, const char* what) {
  if (!ok) {
    throw ShapeMismatch(what);
  }
}

int ld_of(index_t ld, index_t rows) {
  return static_cast<int>(std::max<index_t>({ld, rows, 1}));
}

}  // namespace

BlasKernels::BlasKernels() { openblas_set_num_threads(1); }

void BlasKernels::factor_diag(MatrixView a) const {
  check(a.rows == a.cols, "factor_diag: block must be square");
  if (a.rows == 0) {
    return;
  }
  const lapack_int info =
      LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(a.rows),
                     a.ptr, ld_of(a.ld, a.rows));
  if (info > 0) {
    throw NotPositiveDefinite(info - 1);
  }
  check(info == 0, "factor_diag: invalid argument to dpotrf");
}

void BlasKernels::solve_panel(MatrixView b, ConstMatrixView l) const {
  check(l.rows == l.cols && b.cols == l.rows,
        "solve_panel: operand shapes do not conform");
  for (index_t q = 0; q < l.rows; ++q) {
    if (l(q, q) == 0.0) {
      throw SingularFactor("solve_panel: zero diagonal in triangular factor");
    }
  }
  if (b.empty()) {
    return;
  }
  cblas_dtrsm(CblasColMajor, CblasRight, CblasLower, CblasTrans, CblasNonUnit,
              static_cast<int>(b.rows), static_cast<int>(b.cols), 1.0, l.ptr,
              ld_of(l.ld, l.rows), b.ptr, ld_of(b.ld, b.rows));
}

void BlasKernels::update_general(MatrixView c, ConstMatrixView a,
                                 ConstMatrixView b) const {
  check(a.rows == c.rows && b.rows == c.cols && a.cols == b.cols,
        "update_general: operand shapes do not conform");
  if (c.empty() || a.cols == 0) {
    return;
  }
  cblas_dgemm(CblasColMajor, CblasNoTrans, CblasTrans, static_cast<int>(c.rows),
              static_cast<int>(c.cols), static_cast<int>(a.cols), -1.0, a.ptr,
              ld_of(a.ld, a.rows), b.ptr, ld_of(b.ld, b.rows), 1.0, c.ptr,
              ld_of(c.ld, c.rows));
}

void BlasKernels::update_symmetric(MatrixView c, ConstMatrixView a) const {
  check(c.rows == c.cols && a.rows == c.rows,
        "update_symmetric: operand shapes do not conform");
  if (c.empty() || a.cols == 0) {
    return;
  }
  cblas_dsyrk(CblasColMajor, CblasLower, CblasNoTrans, static_cast<int>(c.rows),
              static_cast<int>(a.cols), -1.0, a.ptr, ld_of(a.ld, a.rows), 1.0,
              c.ptr, ld_of(c.ld, c.rows));
}

}  // namespace bandchol
