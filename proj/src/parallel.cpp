#include "bandchol/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <set>
#include <string>
#include <thread>
#include <utility>

#include <json.hpp>

namespace bandchol {

ExecPolicy ExecPolicy::from_environment() {
  ExecPolicy policy;
  policy.worker_count =
      std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("BANDCHOL_NUM_THREADS")) {
    try {
      const int value = std::stoi(env);
      if (value >= 1) {
        policy.worker_count = value;
      }
    } catch (const std::exception&) {
      // Unparseable values fall back to the hardware concurrency.
    }
  }
  return policy;
}

void TaskTrace::write_ndjson(std::ostream& os) const {
  for (const TaskRecord& r : records) {
    nlohmann::json rec = {
        {"task", r.task},
        {"kind", std::string(step_name(r.kind))},
        {"window", r.cell.window},
        {"row", r.cell.row},
        {"col", r.cell.col},
        {"worker", r.worker},
        {"start_ns", r.start_ns},
        {"end_ns", r.end_ns},
    };
    os << rec.dump() << '\n';
  }
}

void TaskTrace::write_ndjson(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) {
    throw IoError("cannot open trace file " + path.string());
  }
  write_ndjson(os);
  if (!os) {
    throw IoError("write to " + path.string() + " failed");
  }
}

int select_grid_dim(index_t bandwidth, int cores) {
  if (bandwidth < 2) {
    throw InvalidBandwidth("grid selection requires k >= 2");
  }
  if (bandwidth % 2 != 0) {
    throw BandwidthNotDivisible(
        "bandwidth " + std::to_string(bandwidth) +
        " is odd; pad the band to an even bandwidth (pad_bandwidth)");
  }
  const int upper = std::max(3, cores);
  int best = -1;
  index_t best_score = 0;
  for (int n = 3; n <= upper; ++n) {
    if (bandwidth % (n - 1) != 0) {
      continue;
    }
    const index_t block = bandwidth / (n - 1);
    const index_t score = block > 50 ? block - 50 : 50 - block;
    if (best < 0 || score <= best_score) {
      best = n;
      best_score = score;
    }
  }
  if (best < 0) {
    throw BandwidthNotDivisible(
        "no grid dimension n in [3, " + std::to_string(upper) +
        "] has n - 1 dividing k = " + std::to_string(bandwidth) +
        "; pad the band to an even bandwidth (pad_bandwidth)");
  }
  return best;
}

int physical_core_count() {
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::set<std::pair<std::string, std::string>> cores;
  std::string line;
  std::string physical_id;
  while (std::getline(cpuinfo, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      continue;
    }
    std::string key = line.substr(0, colon);
    key.erase(key.find_last_not_of(" \t") + 1);
    const std::string value =
        colon + 2 <= line.size() ? line.substr(colon + 2) : std::string();
    if (key == "physical id") {
      physical_id = value;
    } else if (key == "core id") {
      cores.emplace(physical_id, value);
    }
  }
  if (!cores.empty()) {
    return static_cast<int>(cores.size());
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Scheduler {
 public:
  Scheduler(BandedMatrix& a, const TaskGraph& graph, const ExecPolicy& policy,
            const KernelBackend& backend, TaskTrace* trace)
      : a_(a),
        graph_(graph),
        policy_(policy),
        backend_(backend),
        trace_(trace),
        pending_(std::make_unique<std::atomic<std::size_t>[]>(graph.tasks.size())),
        origin_(std::chrono::steady_clock::now()) {
    for (int s = 0; s < graph.work_slots; ++s) {
      work_.emplace_back(graph.plan.block_size());
    }
    for (std::size_t id = 0; id < graph.tasks.size(); ++id) {
      pending_[id].store(graph.predecessors[id].size(),
                         std::memory_order_relaxed);
      if (graph.predecessors[id].empty()) {
        ready_.push(id);
      }
    }
  }

  void run() {
    const int workers = std::max(1, policy_.worker_count);
    {
      std::vector<std::jthread> threads;
      threads.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w) {
        threads.emplace_back([this, w] { worker_loop(w); });
      }
    }
    if (!failures_.empty()) {
      std::rethrow_exception(failures_.begin()->second);
    }
  }

 private:
  void worker_loop(int worker) {
    for (;;) {
      std::size_t id = 0;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return finished() || !ready_.empty(); });
        if (finished()) {
          return;
        }
        id = ready_.top();
        ready_.pop();
        ++running_;
      }
      const bool ok = run_task(id, worker);
      std::vector<std::size_t> released;
      if (ok) {
        for (std::size_t s : graph_.successors[id]) {
          if (pending_[s].fetch_sub(1, std::memory_order_acq_rel) == 1) {
            released.push_back(s);
          }
        }
      }
      {
        std::lock_guard lock(mutex_);
        --running_;
        ++completed_;
        for (std::size_t s : released) {
          ready_.push(s);
        }
      }
      cv_.notify_all();
    }
  }

  // Caller holds mutex_.
  bool finished() const {
    if (!failures_.empty()) {
      return running_ == 0;
    }
    return completed_ == graph_.tasks.size();
  }

  bool run_task(std::size_t id, int worker) {
    const BlockTask& task = graph_.tasks[id];
    if (policy_.max_start_jitter.count() > 0) {
      const auto span =
          static_cast<std::uint64_t>(policy_.max_start_jitter.count()) + 1;
      std::this_thread::sleep_for(std::chrono::microseconds(
          mix(policy_.jitter_seed ^ (id * 0x632be59bd9b4e019ull)) % span));
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      WorkArray& work =
          work_[static_cast<std::size_t>(std::max(0, task.work_slot))];
      execute_step(a_, graph_.plan, to_step(task), backend_, work);
    } catch (...) {
      std::lock_guard lock(mutex_);
      failures_.emplace(id, std::current_exception());
      return false;
    }
    if (trace_ != nullptr) {
      const auto end = std::chrono::steady_clock::now();
      TaskRecord rec{id,
                     task.kind,
                     task.cell,
                     worker,
                     std::chrono::duration_cast<std::chrono::nanoseconds>(
                         start - origin_)
                         .count(),
                     std::chrono::duration_cast<std::chrono::nanoseconds>(
                         end - origin_)
                         .count()};
      std::lock_guard lock(mutex_);
      trace_->records.push_back(rec);
    }
    return true;
  }

  BandedMatrix& a_;
  const TaskGraph& graph_;
  const ExecPolicy& policy_;
  const KernelBackend& backend_;
  TaskTrace* trace_;

  std::unique_ptr<std::atomic<std::size_t>[]> pending_;
  std::vector<WorkArray> work_;
  std::chrono::steady_clock::time_point origin_;

  std::mutex mutex_;
  std::condition_variable cv_;
  // Lowest program-order index first keeps the window sweep moving.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>>
      ready_;
  std::size_t running_ = 0;
  std::size_t completed_ = 0;
  std::map<std::size_t, std::exception_ptr> failures_;
};

}  // namespace

void execute_task_graph(BandedMatrix& a, const TaskGraph& graph,
                        const ExecPolicy& policy, const KernelBackend& backend,
                        TaskTrace* trace) {
  if (graph.plan.dim() != a.dim() || graph.plan.bandwidth() != a.bandwidth()) {
    throw ShapeMismatch("task graph was planned for a different matrix");
  }
  if (trace != nullptr) {
    trace->records.clear();
    trace->records.reserve(graph.tasks.size());
  }
  Scheduler(a, graph, policy, backend, trace).run();
}

void factor_blocked_parallel(BandedMatrix& a, int grid_dim,
                             const ExecPolicy& policy,
                             const KernelBackend& backend, TaskTrace* trace) {
  const WindowPlan plan = plan_windows(a.dim(), a.bandwidth(), grid_dim);
  const TaskGraph graph = build_task_graph(plan);
  execute_task_graph(a, graph, policy, backend, trace);
}

}  // namespace bandchol
