#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "bandchol/blocked.hpp"

namespace bandchol {

/// Block (row, col) of window t. DepCell(t, i, j) and DepCell(t + 1, i - 1,
/// j - 1) name the same storage.
struct DepCell {
  index_t window = 0;
  int row = 0;
  int col = 0;

  /// Global block coordinates of the storage this cell names.
  index_t physical_row() const noexcept { return window + row; }
  index_t physical_col() const noexcept { return window + col; }

  /// The name of the same block in window t - 1.
  DepCell previous_alias() const noexcept { return {window - 1, row + 1, col + 1}; }

  friend auto operator<=>(const DepCell&, const DepCell&) = default;
};

struct BlockTask {
  StepKind kind = StepKind::FactorDiag;
  DepCell cell;
  std::vector<DepCell> reads;
  DepCell writes;
  /// Work-array slot used by bottom-row tasks (CopyIn .. CopyBack).
  int work_slot = -1;
};

/// Tasks in program order plus their dependency edges. Every edge points from
/// an earlier task to a later one, so program order is a topological order.
struct TaskGraph {
  WindowPlan plan;
  int work_slots = 0;
  std::vector<BlockTask> tasks;
  std::vector<std::vector<std::size_t>> predecessors;
  std::vector<std::vector<std::size_t>> successors;

  std::size_t edge_count() const noexcept;
  bool has_edge(std::size_t from, std::size_t to) const;
};

/// Number of work arrays in flight. CopyIn of window t waits for CopyBack of
/// window t - kDefaultWorkSlots before reusing its buffer.
inline constexpr int kDefaultWorkSlots = 2;

/// Builds the task graph for `plan`.
///
/// Each task reads the previous version of the block it writes (its alias in
/// window t - 1, if that window touched it) plus its operand panels:
///
///   FactorDiag(0,0)        reads (1,1) of t-1
///   SolvePanel(i,0)        reads (0,0) of t, (i+1,1) of t-1
///   SolvePanel(n-1,0)      reads (0,0) and the work array (n-1,0) of t
///   UpdateGeneral(i,j)     reads (i,0), (j,0) of t, (i+1,j+1) of t-1
///   UpdateSymmetric(i,i)   reads (i,0) of t, (i+1,i+1) of t-1
///   CopyIn(n-1,0)          writes the work array
///   CopyBack(n-1,0)        reads the work array after every bottom-row update
///
/// Edges are read-after-write and write-after-read on the physical block,
/// plus the work-slot reuse edge described above.
TaskGraph build_task_graph(const WindowPlan& plan,
                           int work_slots = kDefaultWorkSlots);

inline BlockStep to_step(const BlockTask& task) {
  return {task.kind, task.cell.window, task.cell.row, task.cell.col};
}

}  // namespace bandchol
