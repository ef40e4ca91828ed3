#include "jss/oracles.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace jss {

namespace {

void check_size(const Instance& inst, const OracleLimits& limits) {
  require_valid(inst);
  if (inst.operation_count() > limits.max_operations) {
    throw OracleLimitError("instance has " + std::to_string(inst.operation_count()) + " operations, cap is " +
                           std::to_string(limits.max_operations));
  }
}

class BranchAndBound {
 public:
  BranchAndBound(const Instance& inst, const OracleLimits& limits)
      : inst_(inst), limits_(limits), stats_(aggregates(inst)) {
    next_.assign(inst.job_count, 0);
    job_ready_.assign(inst.job_count, 0);
    machine_ready_.assign(inst.machine_count, 0);
    job_left_.assign(stats_.job_totals.data(), stats_.job_totals.data() + inst.job_count);
    machine_left_.assign(stats_.machine_totals.data(), stats_.machine_totals.data() + inst.machine_count);
  }

  Time solve() {
    remaining_ = inst_.operation_count();
    search(0);
    return best_;
  }

 private:
  Time lower_bound(Time current) const {
    Time lb = current;
    for (int j = 0; j < inst_.job_count; ++j) {
      if (next_[j] == inst_.machine_count) continue;
      const auto m = inst_.op(j, next_[j]).machine;
      lb = std::max(lb, std::max(job_ready_[j], machine_ready_[m]) + job_left_[j]);
    }
    for (int m = 0; m < inst_.machine_count; ++m) lb = std::max(lb, machine_ready_[m] + machine_left_[m]);
    return lb;
  }

  void search(Time current) {
    if (++nodes_ > limits_.node_budget) throw OracleLimitError("branch-and-bound node budget exhausted");
    if (remaining_ == 0) {
      best_ = std::min(best_, current);
      return;
    }
    if (lower_bound(current) >= best_) return;

    // Earliest completion among schedulable operations fixes the conflict machine.
    Time min_ect = std::numeric_limits<Time>::max();
    MachineId conflict_machine = -1;
    for (int j = 0; j < inst_.job_count; ++j) {
      if (next_[j] == inst_.machine_count) continue;
      const auto& op = inst_.op(j, next_[j]);
      const Time ect = std::max(job_ready_[j], machine_ready_[op.machine]) + op.duration;
      if (ect < min_ect) {
        min_ect = ect;
        conflict_machine = op.machine;
      }
    }
    std::vector<std::pair<Time, int>> conflict;
    for (int j = 0; j < inst_.job_count; ++j) {
      if (next_[j] == inst_.machine_count) continue;
      const auto& op = inst_.op(j, next_[j]);
      if (op.machine != conflict_machine) continue;
      const Time est = std::max(job_ready_[j], machine_ready_[op.machine]);
      if (est < min_ect) conflict.emplace_back(est, j);
    }
    std::sort(conflict.begin(), conflict.end());

    for (const auto& [est, j] : conflict) {
      const auto& op = inst_.op(j, next_[j]);
      const Time saved_job = job_ready_[j];
      const Time saved_machine = machine_ready_[op.machine];
      const Time end = est + op.duration;
      job_ready_[j] = end;
      machine_ready_[op.machine] = end;
      job_left_[j] -= op.duration;
      machine_left_[op.machine] -= op.duration;
      ++next_[j];
      --remaining_;
      search(std::max(current, end));
      ++remaining_;
      --next_[j];
      job_left_[j] += op.duration;
      machine_left_[op.machine] += op.duration;
      job_ready_[j] = saved_job;
      machine_ready_[op.machine] = saved_machine;
      if (best_ == stats_.trivial_lower_bound) return;
    }
  }

  const Instance& inst_;
  OracleLimits limits_;
  InstanceStats stats_;
  std::vector<int> next_;
  std::vector<Time> job_ready_;
  std::vector<Time> machine_ready_;
  std::vector<Time> job_left_;
  std::vector<Time> machine_left_;
  int remaining_ = 0;
  std::uint64_t nodes_ = 0;
  Time best_ = std::numeric_limits<Time>::max();
};

/// Completion lower bound for any terminal state reachable from `s`: nothing
/// can start before the current clock.
Time env_lower_bound(const EnvState& s) {
  const auto& inst = s.instance();
  Time lb = s.clock();
  std::vector<Time> machine_work(inst.machine_count, 0);
  for (int j = 0; j < inst.job_count; ++j) {
    const auto status = s.job_status(j);
    Time rest = 0;
    for (int k = status.next_op; k < inst.machine_count; ++k) {
      rest += inst.op(j, k).duration;
      machine_work[inst.op(j, k).machine] += inst.op(j, k).duration;
    }
    lb = std::max(lb, std::max(s.clock(), status.op_busy_until) + rest);
  }
  for (int m = 0; m < inst.machine_count; ++m) {
    lb = std::max(lb, s.machine_status(m).busy_until + machine_work[m]);
  }
  return lb;
}

struct TreeSearch {
  const OracleLimits& limits;
  std::uint64_t nodes = 0;
  Time best = std::numeric_limits<Time>::max();

  void visit(const EnvState& s) {
    if (++nodes > limits.node_budget) throw OracleLimitError("env tree node budget exhausted");
    if (s.is_done()) {
      best = std::min(best, s.makespan());
      return;
    }
    if (limits.prune && env_lower_bound(s) >= best) return;
    const auto& mask = s.legal_actions();
    for (int a = 0; a < mask.size(); ++a) {
      if (!mask[a]) continue;
      EnvState child = s;
      child.step(a);
      visit(child);
    }
  }
};

}  // namespace

Time brute_force_optimal(const Instance& inst, const OracleLimits& limits) {
  check_size(inst, limits);
  return BranchAndBound(inst, limits).solve();
}

Time env_tree_best(const Instance& inst, const OracleLimits& limits, const EnvConfig& config) {
  check_size(inst, limits);
  TreeSearch search{limits};
  search.visit(reset(inst, config));
  return search.best;
}

}  // namespace jss
