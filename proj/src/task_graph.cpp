#include "bandchol/task_graph.hpp"

#include <algorithm>
#include <unordered_map>

namespace bandchol {

std::size_t TaskGraph::edge_count() const noexcept {
  std::size_t total = 0;
  for (const auto& preds : predecessors) {
    total += preds.size();
  }
  return total;
}

bool TaskGraph::has_edge(std::size_t from, std::size_t to) const {
  const auto& preds = predecessors.at(to);
  return std::binary_search(preds.begin(), preds.end(), from);
}

namespace {

struct BlockKey {
  index_t row;
  index_t col;
  friend bool operator==(const BlockKey&, const BlockKey&) = default;
};

struct BlockKeyHash {
  std::size_t operator()(const BlockKey& k) const noexcept {
    return std::hash<index_t>{}(k.row) * 0x9e3779b97f4a7c15ull ^
           std::hash<index_t>{}(k.col);
  }
};

BlockKey key_of(const DepCell& c) {
  return {c.physical_row(), c.physical_col()};
}

struct Access {
  std::ptrdiff_t last_writer = -1;
  std::vector<std::size_t> readers;  // since last write
};

BlockTask make_task(const BlockStep& step, int grid_dim) {
  const int bottom = grid_dim - 1;
  BlockTask task;
  task.kind = step.kind;
  task.cell = {step.window, step.row, step.col};
  task.writes = task.cell;
  const index_t t = step.window;
  const DepCell self = task.cell;
  // Previous version of the written block, if window t - 1 touched it.
  const auto add_previous = [&] {
    const DepCell prev = self.previous_alias();
    if (t > 0 && prev.row <= bottom) {
      task.reads.push_back(prev);
    }
  };
  switch (step.kind) {
    case StepKind::FactorDiag:
      add_previous();
      break;
    case StepKind::SolvePanel:
      task.reads.push_back({t, 0, 0});
      if (step.row == bottom) {
        task.reads.push_back(self);
      } else {
        add_previous();
      }
      break;
    case StepKind::UpdateGeneral:
      task.reads.push_back({t, step.row, 0});
      task.reads.push_back({t, step.col, 0});
      add_previous();
      break;
    case StepKind::UpdateSymmetric:
      task.reads.push_back({t, step.row, 0});
      add_previous();
      break;
    case StepKind::CopyIn:
      break;
    case StepKind::CopyBack:
      task.reads.push_back(self);
      break;
  }
  return task;
}

}  // namespace

TaskGraph build_task_graph(const WindowPlan& plan, int work_slots) {
  TaskGraph graph;
  graph.plan = plan;
  graph.work_slots = std::max(1, work_slots);

  for (index_t t = 0; t < plan.window_count(); ++t) {
    for (const BlockStep& step : window_program(plan, t)) {
      graph.tasks.push_back(make_task(step, plan.grid_dim()));
    }
  }
  const std::size_t count = graph.tasks.size();
  graph.predecessors.assign(count, {});
  graph.successors.assign(count, {});

  std::unordered_map<BlockKey, Access, BlockKeyHash> access;
  // CopyBack task index per window, for work-slot reuse.
  std::vector<std::ptrdiff_t> copy_back(
      static_cast<std::size_t>(plan.window_count()), -1);

  for (std::size_t id = 0; id < count; ++id) {
    BlockTask& task = graph.tasks[id];
    auto& preds = graph.predecessors[id];
    const bool bottom_row = task.cell.row == plan.grid_dim() - 1;
    if (bottom_row) {
      task.work_slot = static_cast<int>(task.cell.window % graph.work_slots);
    }

    for (const DepCell& r : task.reads) {
      const Access& acc = access[key_of(r)];
      if (acc.last_writer >= 0) {
        preds.push_back(static_cast<std::size_t>(acc.last_writer));
      }
    }
    Access& target = access[key_of(task.writes)];
    if (target.last_writer >= 0) {
      preds.push_back(static_cast<std::size_t>(target.last_writer));
    }
    for (std::size_t reader : target.readers) {
      if (reader != id) {
        preds.push_back(reader);
      }
    }
    if (task.kind == StepKind::CopyIn) {
      const index_t reused = task.cell.window - graph.work_slots;
      if (reused >= 0 && copy_back[static_cast<std::size_t>(reused)] >= 0) {
        preds.push_back(
            static_cast<std::size_t>(copy_back[static_cast<std::size_t>(reused)]));
      }
    }
    if (task.kind == StepKind::CopyBack) {
      copy_back[static_cast<std::size_t>(task.cell.window)] =
          static_cast<std::ptrdiff_t>(id);
    }

    for (const DepCell& r : task.reads) {
      if (key_of(r) == key_of(task.writes)) {
        continue;
      }
      access[key_of(r)].readers.push_back(id);
    }
    target.last_writer = static_cast<std::ptrdiff_t>(id);
    target.readers.clear();

    std::sort(preds.begin(), preds.end());
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
    for (std::size_t p : preds) {
      graph.successors[p].push_back(id);
    }
  }
  return graph;
}

}  // namespace bandchol
