#pragma once

#include <cstdint>

#include "jss/env.hpp"
#include "jss/instance.hpp"

namespace jss {

struct OracleLimits {
  int max_operations = 12;
  std::uint64_t node_budget = 50'000'000;
  /// Prune the env tree with a valid completion lower bound. The minimum is
  /// unchanged; only the node count shrinks.
  bool prune = true;
};

class OracleLimitError : public Error {
 public:
  using Error::Error;
};

/// Exact optimum by depth-first branch-and-bound over active schedules
/// (Giffler-Thompson conflict sets) with job/machine lower-bound pruning.
Time brute_force_optimal(const Instance& inst, const OracleLimits& limits = {});

/// Minimum terminal makespan over every action sequence the environment's
/// mask admits.
Time env_tree_best(const Instance& inst, const OracleLimits& limits = {}, const EnvConfig& config = {});

}  // namespace jss
