#include "bandchol/blocked.hpp"

#include <algorithm>
#include <string>

namespace bandchol {

WindowPlan::WindowPlan(index_t dim, index_t bandwidth, int grid_dim)
    : dim_(dim),
      bandwidth_(bandwidth),
      grid_dim_(grid_dim),
      block_size_(bandwidth / (grid_dim - 1)),
      window_count_((dim + block_size_ - 1) / block_size_) {}

CellExtent WindowPlan::cell(index_t window, int i, int j) const noexcept {
  const index_t start = window * block_size_;
  CellExtent e;
  e.row_begin = std::min(dim_, start + i * block_size_);
  e.row_end = std::min(dim_, start + (i + 1) * block_size_);
  e.col_begin = std::min(dim_, start + j * block_size_);
  e.col_end = std::min(dim_, start + (j + 1) * block_size_);
  e.trapezoid = (i == grid_dim_ - 1 && j == 0);
  return e;
}

WindowDesc WindowPlan::window(index_t t) const {
  WindowDesc desc;
  desc.window_index = t;
  desc.start = t * block_size_;
  desc.grid_dim = grid_dim_;
  desc.cells.resize(static_cast<std::size_t>(grid_dim_ * grid_dim_));
  for (int i = 0; i < grid_dim_; ++i) {
    for (int j = 0; j <= i; ++j) {
      desc.cells[static_cast<std::size_t>(i * grid_dim_ + j)] = cell(t, i, j);
    }
  }
  return desc;
}

std::vector<WindowDesc> WindowPlan::windows() const {
  std::vector<WindowDesc> out;
  out.reserve(static_cast<std::size_t>(window_count_));
  for (index_t t = 0; t < window_count_; ++t) {
    out.push_back(window(t));
  }
  return out;
}

WindowPlan plan_windows(index_t dim, index_t bandwidth, int grid_dim) {
  if (grid_dim < 3) {
    throw GridTooSmall("grid dimension must be at least 3 (got " +
                       std::to_string(grid_dim) + ")");
  }
  if (bandwidth < 2 || bandwidth >= dim) {
    throw InvalidBandwidth("blocked factorization requires 2 <= k < N (N=" +
                           std::to_string(dim) +
                           ", k=" + std::to_string(bandwidth) + ")");
  }
  if (bandwidth % (grid_dim - 1) != 0) {
    throw BandwidthNotDivisible(
        "grid dimension " + std::to_string(grid_dim) + " requires " +
        std::to_string(grid_dim - 1) + " to divide the bandwidth " +
        std::to_string(bandwidth) + "; pad the band (pad_bandwidth)");
  }
  return WindowPlan(dim, bandwidth, grid_dim);
}

std::string_view step_name(StepKind kind) {
  switch (kind) {
    case StepKind::FactorDiag:
      return "factor_diag";
    case StepKind::SolvePanel:
      return "solve_panel";
    case StepKind::UpdateGeneral:
      return "update_general";
    case StepKind::UpdateSymmetric:
      return "update_symmetric";
    case StepKind::CopyIn:
      return "copy_in";
    case StepKind::CopyBack:
      return "copy_back";
  }
  return "unknown";
}

WorkArray::WorkArray(index_t block_size)
    : block_size_(block_size),
      buffer_(static_cast<std::size_t>(block_size * block_size), 0.0) {}

void WorkArray::load(const BandedMatrix& a, const CellExtent& cell) {
  std::fill(buffer_.begin(), buffer_.end(), 0.0);
  for (index_t q = 0; q < cell.cols(); ++q) {
    const index_t last = std::min(q, cell.rows() - 1);
    for (index_t p = 0; p <= last; ++p) {
      buffer_[static_cast<std::size_t>(p + q * block_size_)] =
          a(cell.row_begin + p, cell.col_begin + q);
    }
  }
}

void WorkArray::store(BandedMatrix& a, const CellExtent& cell) const {
  for (index_t q = 0; q < cell.cols(); ++q) {
    const index_t last = std::min(q, cell.rows() - 1);
    for (index_t p = 0; p <= last; ++p) {
      a(cell.row_begin + p, cell.col_begin + q) =
          buffer_[static_cast<std::size_t>(p + q * block_size_)];
    }
  }
}

MatrixView WorkArray::view(index_t rows, index_t cols) {
  return {buffer_.data(), rows, cols, block_size_};
}

ConstMatrixView WorkArray::view(index_t rows, index_t cols) const {
  return {buffer_.data(), rows, cols, block_size_};
}

bool WorkArray::strict_lower_is_zero() const noexcept {
  for (index_t q = 0; q < block_size_; ++q) {
    for (index_t p = q + 1; p < block_size_; ++p) {
      if (buffer_[static_cast<std::size_t>(p + q * block_size_)] != 0.0) {
        return false;
      }
    }
  }
  return true;
}

std::vector<BlockStep> window_program(const WindowPlan& plan, index_t window) {
  const int n = plan.grid_dim();
  std::vector<BlockStep> steps;
  steps.push_back({StepKind::FactorDiag, window, 0, 0});
  for (int i = 1; i < n - 1; ++i) {
    if (!plan.cell(window, i, 0).present()) {
      return steps;
    }
    steps.push_back({StepKind::SolvePanel, window, i, 0});
    for (int j = 1; j < i; ++j) {
      steps.push_back({StepKind::UpdateGeneral, window, i, j});
    }
    steps.push_back({StepKind::UpdateSymmetric, window, i, i});
  }
  if (!plan.cell(window, n - 1, 0).present()) {
    return steps;
  }
  steps.push_back({StepKind::CopyIn, window, n - 1, 0});
  steps.push_back({StepKind::SolvePanel, window, n - 1, 0});
  for (int j = 1; j < n - 1; ++j) {
    steps.push_back({StepKind::UpdateGeneral, window, n - 1, j});
  }
  steps.push_back({StepKind::UpdateSymmetric, window, n - 1, n - 1});
  steps.push_back({StepKind::CopyBack, window, n - 1, 0});
  return steps;
}

namespace {

MatrixView band_block(BandedMatrix& a, const CellExtent& e) {
  return a.block(e.row_begin, e.col_begin, e.rows(), e.cols());
}

}  // namespace

void execute_step(BandedMatrix& a, const WindowPlan& plan,
                  const BlockStep& step, const KernelBackend& backend,
                  WorkArray& work) {
  const index_t t = step.window;
  const int bottom = plan.grid_dim() - 1;
  const CellExtent target = plan.cell(t, step.row, step.col);
  // Left operand of a bottom-row step lives in the work array.
  const auto left_panel = [&](int row) -> ConstMatrixView {
    const CellExtent e = plan.cell(t, row, 0);
    if (row == bottom) {
      return work.view(e.rows(), e.cols());
    }
    return band_block(a, e);
  };

  switch (step.kind) {
    case StepKind::FactorDiag:
      try {
        backend.factor_diag(band_block(a, target));
      } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(target.col_begin + e.column());
      }
      break;
    case StepKind::SolvePanel: {
      const ConstMatrixView diag = band_block(a, plan.cell(t, 0, 0));
      const MatrixView panel = step.row == bottom
                                   ? work.view(target.rows(), target.cols())
                                   : band_block(a, target);
      backend.solve_panel(panel, diag);
      break;
    }
    case StepKind::UpdateGeneral:
      backend.update_general(band_block(a, target), left_panel(step.row),
                             band_block(a, plan.cell(t, step.col, 0)));
      break;
    case StepKind::UpdateSymmetric:
      backend.update_symmetric(band_block(a, target), left_panel(step.row));
      break;
    case StepKind::CopyIn:
      work.load(a, target);
      break;
    case StepKind::CopyBack:
      work.store(a, target);
      break;
  }
}

void factor_blocked_serial(BandedMatrix& a, int grid_dim,
                           const KernelBackend& backend,
                           const StepObserver& observer) {
  const WindowPlan plan = plan_windows(a.dim(), a.bandwidth(), grid_dim);
  WorkArray work(plan.block_size());
  for (index_t t = 0; t < plan.window_count(); ++t) {
    for (const BlockStep& step : window_program(plan, t)) {
      if (observer) {
        observer(step, work);
      }
      execute_step(a, plan, step, backend, work);
    }
  }
}

}  // namespace bandchol
