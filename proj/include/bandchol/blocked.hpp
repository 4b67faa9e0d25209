#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "bandchol/band_matrix.hpp"
#include "bandchol/kernels.hpp"

namespace bandchol {

/// Global row/column ranges of one block cell, clamped to [0, N).
struct CellExtent {
  index_t row_begin = 0;
  index_t row_end = 0;
  index_t col_begin = 0;
  index_t col_end = 0;
  /// Set on the bottom-left cell, of which only the upper triangle is in band.
  bool trapezoid = false;

  index_t rows() const noexcept { return row_end - row_begin; }
  index_t cols() const noexcept { return col_end - col_begin; }
  bool present() const noexcept { return rows() > 0 && cols() > 0; }
};

/// One active window: an n x n grid of b x b cells whose top-left corner sits
/// at (start, start). Only the lower triangle of the grid (j <= i) is used.
struct WindowDesc {
  index_t window_index = 0;
  index_t start = 0;
  int grid_dim = 0;
  std::vector<CellExtent> cells;  // row-major n x n, upper part left empty

  const CellExtent& cell(int i, int j) const {
    return cells[static_cast<std::size_t>(i * grid_dim + j)];
  }
};

/// The sweep of windows over an N x N matrix of bandwidth k with grid
/// dimension n and block size b = k / (n - 1). Window t starts at t * b, so
/// consecutive windows overlap by k rows and columns and cell (i, j) of window
/// t is cell (i - 1, j - 1) of window t + 1.
class WindowPlan {
 public:
  WindowPlan() = default;
  WindowPlan(index_t dim, index_t bandwidth, int grid_dim);

  index_t dim() const noexcept { return dim_; }
  index_t bandwidth() const noexcept { return bandwidth_; }
  int grid_dim() const noexcept { return grid_dim_; }
  index_t block_size() const noexcept { return block_size_; }
  index_t window_count() const noexcept { return window_count_; }

  /// Extent of cell (i, j) of window t. Cells entirely past N come back with
  /// zero rows.
  CellExtent cell(index_t window, int i, int j) const noexcept;

  WindowDesc window(index_t t) const;
  std::vector<WindowDesc> windows() const;

 private:
  index_t dim_ = 0;
  index_t bandwidth_ = 0;
  int grid_dim_ = 0;
  index_t block_size_ = 0;
  index_t window_count_ = 0;
};

/// Throws GridTooSmall for n < 3, InvalidBandwidth unless 2 <= k < N, and
/// BandwidthNotDivisible when (n - 1) does not divide k.
WindowPlan plan_windows(index_t dim, index_t bandwidth, int grid_dim);

enum class StepKind {
  FactorDiag,
  SolvePanel,
  UpdateGeneral,
  UpdateSymmetric,
  CopyIn,
  CopyBack,
};

std::string_view step_name(StepKind kind);

/// One kernel invocation: `kind` applied to cell (row, col) of `window`.
struct BlockStep {
  StepKind kind = StepKind::FactorDiag;
  index_t window = 0;
  int row = 0;
  int col = 0;

  friend bool operator==(const BlockStep&, const BlockStep&) = default;
};

/// Square b x b scratch buffer holding the bottom-left trapezoidal cell. Its
/// strict lower triangle stays zero, so the triangular solve and both updates
/// can run on it as a full dense block.
class WorkArray {
 public:
  WorkArray() = default;
  explicit WorkArray(index_t block_size);

  /// Copies the in-band (upper) triangle of `cell` and zeroes the rest.
  void load(const BandedMatrix& a, const CellExtent& cell);
  /// Writes the upper triangle back into the band.
  void store(BandedMatrix& a, const CellExtent& cell) const;

  MatrixView view(index_t rows, index_t cols);
  ConstMatrixView view(index_t rows, index_t cols) const;

  index_t block_size() const noexcept { return block_size_; }
  bool strict_lower_is_zero() const noexcept;

 private:
  index_t block_size_ = 0;
  std::vector<double> buffer_;
};

/// Steps of window t in program order, skipping cells clamped away at the end
/// of the matrix. For n = 3 and a full window this is: factor (0,0), solve
/// (1,0), symmetric update (1,1), copy-in (2,0), solve (2,0), general update
/// (2,1), symmetric update (2,2), copy-back (2,0).
std::vector<BlockStep> window_program(const WindowPlan& plan, index_t window);

/// Executes one step. Steps on disjoint cells may run concurrently as long as
/// each uses its own WorkArray. NotPositiveDefinite is rethrown with the
/// global column index.
void execute_step(BandedMatrix& a, const WindowPlan& plan,
                  const BlockStep& step, const KernelBackend& backend,
                  WorkArray& work);

/// Called before every step of the serial executor.
using StepObserver = std::function<void(const BlockStep&, const WorkArray&)>;

/// Serial blocked factorization: every window, every step, in program order.
void factor_blocked_serial(BandedMatrix& a, int grid_dim,
                           const KernelBackend& backend = native_kernels(),
                           const StepObserver& observer = {});

}  // namespace bandchol
