#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jss/instance.hpp"
#include "jss/types.hpp"

namespace jss {

struct EnvConfig {
  /// No-Op is illegal once this many machines have an allocatable job.
  int machines_cap = 4;
  /// No-Op is illegal once this many jobs are allocatable.
  int jobs_cap = 5;
  bool non_final_prioritization = true;
  bool allow_noop = true;
  bool noop_future_work_rule = true;
  bool noop_caps_rule = true;
  bool scale_reward = true;
};

/// One flag per job plus a trailing No-Op flag.
class ActionMask {
 public:
  ActionMask() = default;
  explicit ActionMask(int job_count) : flags_(job_count + 1, 0) {}

  bool operator[](int action) const { return flags_[action] != 0; }
  void set(int action, bool value) { flags_[action] = value ? 1 : 0; }
  int size() const { return static_cast<int>(flags_.size()); }
  int noop_index() const { return size() - 1; }
  bool any() const;
  int count() const;
  void clear();

  friend bool operator==(const ActionMask&, const ActionMask&) = default;

 private:
  std::vector<std::uint8_t> flags_;
};

/// Feature columns of the observation matrix.
enum Feature : int {
  kLegal = 0,         // allocatable now (post-reduction)
  kOpRemaining = 1,   // left-over time of the running op / max op duration
  kProgress = 2,      // fraction of ops allocated
  kWorkRemaining = 3, // left-over processing time / longest job total
  kMachineWait = 4,   // time until the next op's machine frees up / max op duration
  kIdleSinceLast = 5, // idle since last completed op / total duration
  kIdleTotal = 6,     // cumulative idle / total duration
};

struct Observation {
  FeatureMatrix features;
  ActionMask mask;
};

struct MachineStatus {
  Time busy_until = 0;
  std::optional<JobId> running_job;
  std::vector<JobId> paused_jobs;
};

struct JobStatus {
  int next_op = 0;
  /// Completion time of the current or most recent operation.
  Time op_busy_until = 0;
  Time last_completion = 0;
  Time idle_since_last = 0;
  Time idle_total = 0;
};

struct StepOutcome {
  Observation observation;
  double reward = 0.0;
  /// Allocated duration minus holes, before scaling.
  Time raw_reward = 0;
  bool done = false;
  /// Idle time charged to each machine during this transition.
  std::vector<Time> holes;
  Time elapsed = 0;
};

class IllegalActionError : public Error {
 public:
  using Error::Error;
};

/// Precomputed per-instance tables shared by every state of an episode.
struct EnvModel {
  Instance instance;
  InstanceStats stats;
  EnvConfig config;
  MachineMatrix machine;    // J x M
  TimeMatrix duration;      // J x M
  TimeMatrix suffix_work;   // J x (M + 1), work from position k to the end

  EnvModel(Instance inst, EnvConfig cfg);
};

/// Deterministic discrete-event state of one episode. Copying yields an
/// independent deep copy (tree search relies on this); the model is shared.
class EnvState {
 public:
  EnvState(std::shared_ptr<const EnvModel> model);

  const Instance& instance() const { return model_->instance; }
  const InstanceStats& stats() const { return model_->stats; }
  const EnvConfig& config() const { return model_->config; }
  int job_count() const { return model_->instance.job_count; }
  int machine_count() const { return model_->instance.machine_count; }
  int noop_action() const { return job_count(); }

  Time clock() const { return clock_; }
  const std::vector<Time>& future_times() const { return future_; }
  int ops_remaining() const { return ops_remaining_; }
  Time cumulative_raw_reward() const { return cumulative_raw_; }
  double cumulative_reward() const { return cumulative_scaled_; }

  /// Current mask; throws on a terminal state.
  const ActionMask& legal_actions() const;
  /// Current mask without the terminal check (all false once done).
  const ActionMask& mask() const { return mask_; }

  /// Applies a legal action. An illegal action throws IllegalActionError and
  /// leaves the state unchanged.
  StepOutcome step(int action);

  Observation observe() const;
  void observe_into(FeatureMatrix& features) const;

  bool is_done() const { return ops_remaining_ == 0 && future_.empty(); }
  /// Throws on a non-terminal state.
  Time makespan() const;

  MachineStatus machine_status(MachineId m) const;
  JobStatus job_status(JobId j) const;
  /// Start time per (job, position); -1 where not yet allocated.
  const TimeMatrix& start_times() const { return starts_; }

 private:
  bool allocatable(JobId j) const;
  bool paused(MachineId m, JobId j) const { return paused_[static_cast<std::size_t>(m) * job_count() + j] != 0; }
  bool base_legal(JobId j) const;
  bool any_base_legal() const;
  void refresh_mask();
  bool noop_legal() const;
  Time advance(std::vector<Time>& holes);
  Time settle(std::vector<Time>& holes);
  void clear_pauses(MachineId m);

  std::shared_ptr<const EnvModel> model_;
  Time clock_ = 0;
  std::vector<Time> future_;
  std::vector<Time> busy_until_;
  std::vector<JobId> running_;
  std::vector<std::uint8_t> paused_;  // M x J
  std::vector<int> paused_count_;
  std::vector<int> next_op_;
  std::vector<Time> ready_at_;
  std::vector<Time> idle_total_;
  std::vector<Time> last_gap_;
  TimeMatrix starts_;
  int ops_remaining_ = 0;
  Time cumulative_raw_ = 0;
  double cumulative_scaled_ = 0.0;
  ActionMask mask_;
};

/// Validates the instance and returns the initial state (clock 0, all
/// machines free, every job at its first operation).
EnvState reset(const Instance& inst, const EnvConfig& config = {});
EnvState reset(std::shared_ptr<const EnvModel> model);

/// JSON-lines trajectory dump: a reset record followed by one record per step.
class TrajectoryRecorder {
 public:
  explicit TrajectoryRecorder(bool with_features = false) : with_features_(with_features) {}

  void record_reset(const EnvState& state);
  void record_step(int step, int action, const StepOutcome& outcome, const EnvState& state);
  const std::string& text() const { return text_; }

 private:
  bool with_features_;
  std::string text_;
};

}  // namespace jss
