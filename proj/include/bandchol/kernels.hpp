#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bandchol/band_matrix.hpp"

namespace bandchol {

/// The four dense block operations of the blocked band factorization.
///
/// Implementations must be deterministic and may only write to their
/// designated output operand, so that calls on disjoint blocks can run
/// concurrently. Operands are column-major views; shapes are given by the
/// views themselves:
///
///   factor_diag(A m x m)                       A = L L^T, lower triangle
///   solve_panel(B m x c, L c x c)              B <- B L^{-T}
///   update_general(C m x p, A m x c, B p x c)  C <- C - A B^T
///   update_symmetric(C m x m, A m x c)         C <- C - A A^T, lower only
class KernelBackend {
 public:
  virtual ~KernelBackend() = default;

  virtual std::string_view name() const = 0;

  /// Throws NotPositiveDefinite with the block-local column index.
  virtual void factor_diag(MatrixView a) const = 0;
  /// Throws SingularFactor if `l` has a zero diagonal.
  virtual void solve_panel(MatrixView b, ConstMatrixView l) const = 0;
  virtual void update_general(MatrixView c, ConstMatrixView a,
                              ConstMatrixView b) const = 0;
  virtual void update_symmetric(MatrixView c, ConstMatrixView a) const = 0;
};

/// Plain loop kernels. Every output element is accumulated in index order
/// (c -= a0*b0; c -= a1*b1; ...), which makes results reproducible against a
/// naive triple loop.
class NativeKernels final : public KernelBackend {
 public:
  std::string_view name() const override { return "native"; }
  void factor_diag(MatrixView a) const override;
  void solve_panel(MatrixView b, ConstMatrixView l) const override;
  void update_general(MatrixView c, ConstMatrixView a,
                      ConstMatrixView b) const override;
  void update_symmetric(MatrixView c, ConstMatrixView a) const override;
};

const KernelBackend& native_kernels();

/// Names of the backends compiled into this build ("native" always first).
std::vector<std::string> available_backends();

/// Returns the backend registered under `name`; throws std::invalid_argument
/// for unknown or unavailable backends.
const KernelBackend& backend_by_name(std::string_view name);

}  // namespace bandchol
