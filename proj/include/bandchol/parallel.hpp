#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bandchol/task_graph.hpp"

namespace bandchol {

struct ExecPolicy {
  int worker_count = 1;
  /// Each task sleeps a random duration in [0, max_start_jitter] before it
  /// runs. Test-only: perturbs the schedule without changing the graph.
  std::chrono::microseconds max_start_jitter{0};
  std::uint64_t jitter_seed = 0;

  /// Worker count from BANDCHOL_NUM_THREADS, else the hardware concurrency.
  static ExecPolicy from_environment();
};

/// One executed task. Timestamps are nanoseconds since the call started.
struct TaskRecord {
  std::size_t task = 0;
  StepKind kind = StepKind::FactorDiag;
  DepCell cell;
  int worker = 0;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
};

struct TaskTrace {
  std::vector<TaskRecord> records;

  /// Newline-delimited JSON, one object per task, in completion order.
  void write_ndjson(std::ostream& os) const;
  void write_ndjson(const std::filesystem::path& path) const;
};

/// Picks the grid dimension n with (n - 1) | k and 3 <= n <= max(3, cores)
/// whose block size k / (n - 1) is closest to 50, preferring the larger n on
/// ties. Odd bandwidths are rejected with BandwidthNotDivisible.
int select_grid_dim(index_t bandwidth, int cores);

/// Number of physical cores, falling back to the hardware concurrency.
int physical_core_count();

/// Task-parallel blocked factorization. Produces bytes identical to
/// factor_blocked_serial with the same backend for any worker count.
///
/// A failing task stops further scheduling; tasks already running finish and
/// the failure that comes first in program order is rethrown.
void factor_blocked_parallel(BandedMatrix& a, int grid_dim,
                             const ExecPolicy& policy,
                             const KernelBackend& backend = native_kernels(),
                             TaskTrace* trace = nullptr);

/// Executes a prebuilt graph. `graph.plan` must describe `a`.
void execute_task_graph(BandedMatrix& a, const TaskGraph& graph,
                        const ExecPolicy& policy, const KernelBackend& backend,
                        TaskTrace* trace = nullptr);

}  // namespace bandchol
