#pragma once

#include "bandchol/kernels.hpp"

namespace bandchol {

/// Kernels forwarded to the system CBLAS/LAPACKE (OpenBLAS). The library is
/// pinned to one thread so that results do not depend on its internal
/// scheduling.
class BlasKernels final : public KernelBackend {
 public:
  BlasKernels();
  std::string_view name() const override { return "openblas"; }
  void factor_diag(MatrixView a) const override;
  void solve_panel(MatrixView b, ConstMatrixView l) const override;
  void update_general(MatrixView c, ConstMatrixView a,
                      ConstMatrixView b) const override;
  void update_symmetric(MatrixView c, ConstMatrixView a) const override;
};

}  // namespace bandchol
