#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "jss/env.hpp"
#include "jss/random.hpp"
#include "jss/schedule.hpp"

namespace jss {

/// Chooses an action index (job, or job_count for No-Op) from an observation.
/// Implementations must only return actions flagged in obs.mask.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual int decide(const Observation& obs) = 0;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Agent> clone() const = 0;

  virtual bool stochastic() const { return false; }
  virtual void reseed(std::uint64_t /*seed*/) {}
  /// Deterministic policy this agent relaxes, if any.
  virtual std::unique_ptr<Agent> greedy_counterpart() const { return nullptr; }
};

/// Greedy dispatching rule: argmax of one feature column over legal jobs,
/// lowest job index on ties, No-Op only when no job is legal.
class PriorityRuleAgent : public Agent {
 public:
  PriorityRuleAgent(Feature feature, std::string name) : feature_(feature), name_(std::move(name)) {}

  int decide(const Observation& obs) override;
  std::string name() const override { return name_; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<PriorityRuleAgent>(*this); }
  Feature feature() const { return feature_; }

 private:
  Feature feature_;
  std::string name_;
};

/// Longest idle since last operation (a6).
std::unique_ptr<Agent> make_fifo_agent();
/// Most work remaining (a4).
std::unique_ptr<Agent> make_mwkr_agent();

/// Uniform over legal actions, No-Op included.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}

  int decide(const Observation& obs) override;
  std::string name() const override { return "random"; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<RandomAgent>(*this); }
  bool stochastic() const override { return true; }
  void reseed(std::uint64_t seed) override { rng_.seed(seed); }

 private:
  Rng rng_;
};

/// Softmax over scores where masked entries get the most negative finite
/// double. Throws Error if the mask has no legal entry or sizes differ.
Eigen::VectorXd masked_softmax(const Eigen::Ref<const Eigen::VectorXd>& scores, const ActionMask& mask);

/// Samples from masked_softmax(feature / temperature). No-Op competes with a
/// feature value of `noop_value`.
class PrioritySoftmaxAgent : public Agent {
 public:
  PrioritySoftmaxAgent(Feature feature, double temperature, std::uint64_t seed, double noop_value = 0.0);

  int decide(const Observation& obs) override;
  std::string name() const override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<PrioritySoftmaxAgent>(*this); }
  bool stochastic() const override { return true; }
  void reseed(std::uint64_t seed) override { rng_.seed(seed); }
  std::unique_ptr<Agent> greedy_counterpart() const override;

  Eigen::VectorXd probabilities(const Observation& obs) const;

 private:
  Feature feature_;
  double temperature_;
  double noop_value_;
  Rng rng_;
  Eigen::VectorXd scores_;
};

/// Builds an agent from `fifo`, `mwkr`, `random` or `softmax:<a4|a6>:<T>`.
std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed = 0);

struct RolloutResult {
  Schedule schedule;
  Time makespan = 0;
  /// Sum of unscaled step rewards.
  Time raw_reward = 0;
  double scaled_reward = 0.0;
  int steps = 0;
  int noops = 0;
};

/// Drives one episode from reset to completion. Throws IllegalActionError if
/// the agent picks a masked action; the returned schedule has been validated.
RolloutResult rollout(const Instance& inst, Agent& agent, const EnvConfig& config = {});
RolloutResult rollout(std::shared_ptr<const EnvModel> model, Agent& agent, TrajectoryRecorder* recorder = nullptr);

struct SearchOptions {
  double budget_seconds = 600.0;
  std::uint64_t seed = 0;
  /// Stop after this many episodes even if budget remains; 0 means unlimited.
  std::uint64_t max_episodes = 0;
  /// Parallel episode workers. Only a single worker is deterministic.
  int workers = 1;
  EnvConfig env;
};

struct SearchResult {
  Time best_makespan = 0;
  Schedule best_schedule;
  std::uint64_t episodes = 0;
  double wall_time = 0.0;
  std::uint64_t steps = 0;
  std::vector<Time> makespan_history;
};

/// Repeated rollouts under a wall-clock budget, keeping the best schedule.
/// The first episode uses the agent's greedy counterpart when it has one, so
/// the result never loses to that rule.
SearchResult best_of_search(const Instance& inst, const Agent& agent, const SearchOptions& options);

}  // namespace jss
