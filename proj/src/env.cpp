#include "jss/env.hpp"

#include <algorithm>
#include <limits>

#include "json.hpp"

namespace jss {

bool ActionMask::any() const {
  return std::any_of(flags_.begin(), flags_.end(), [](std::uint8_t f) { return f != 0; });
}

int ActionMask::count() const {
  return static_cast<int>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

void ActionMask::clear() { std::fill(flags_.begin(), flags_.end(), std::uint8_t{0}); }

EnvModel::EnvModel(Instance inst, EnvConfig cfg) : instance(std::move(inst)), config(cfg) {
  require_valid(instance);
  stats = aggregates(instance);
  const int jobs = instance.job_count;
  const int machines = instance.machine_count;
  machine.resize(jobs, machines);
  duration.resize(jobs, machines);
  suffix_work = TimeMatrix::Zero(jobs, machines + 1);
  for (int j = 0; j < jobs; ++j) {
    for (int k = 0; k < machines; ++k) {
      machine(j, k) = instance.op(j, k).machine;
      duration(j, k) = instance.op(j, k).duration;
    }
    for (int k = machines - 1; k >= 0; --k) suffix_work(j, k) = suffix_work(j, k + 1) + duration(j, k);
  }
}

EnvState::EnvState(std::shared_ptr<const EnvModel> model) : model_(std::move(model)) {
  const int jobs = job_count();
  const int machines = machine_count();
  busy_until_.assign(machines, 0);
  running_.assign(machines, -1);
  paused_.assign(static_cast<std::size_t>(machines) * jobs, 0);
  paused_count_.assign(machines, 0);
  next_op_.assign(jobs, 0);
  ready_at_.assign(jobs, 0);
  idle_total_.assign(jobs, 0);
  last_gap_.assign(jobs, 0);
  starts_ = TimeMatrix::Constant(jobs, machines, -1);
  ops_remaining_ = jobs * machines;
  future_.reserve(machines);
  mask_ = ActionMask(jobs);
  refresh_mask();
}

EnvState reset(std::shared_ptr<const EnvModel> model) { return EnvState(std::move(model)); }

EnvState reset(const Instance& inst, const EnvConfig& config) {
  return EnvState(std::make_shared<const EnvModel>(inst, config));
}

const ActionMask& EnvState::legal_actions() const {
  if (is_done()) throw Error("legal_actions called on a terminal state");
  return mask_;
}

bool EnvState::allocatable(JobId j) const {
  const int k = next_op_[j];
  if (k >= machine_count() || ready_at_[j] > clock_) return false;
  return busy_until_[model_->machine(j, k)] <= clock_;
}

bool EnvState::base_legal(JobId j) const {
  return allocatable(j) && !paused(model_->machine(j, next_op_[j]), j);
}

bool EnvState::any_base_legal() const {
  for (JobId j = 0; j < job_count(); ++j) {
    if (base_legal(j)) return true;
  }
  return false;
}

void EnvState::refresh_mask() {
  const int jobs = job_count();
  const int machines = machine_count();
  const auto& cfg = config();
  mask_.clear();
  if (ops_remaining_ == 0) return;

  std::vector<std::uint8_t> base(jobs, 0);
  std::vector<std::uint8_t> has_non_final(machines, 0);
  for (JobId j = 0; j < jobs; ++j) {
    if (!base_legal(j)) continue;
    base[j] = 1;
    if (next_op_[j] < machines - 1) has_non_final[model_->machine(j, next_op_[j])] = 1;
  }
  for (JobId j = 0; j < jobs; ++j) {
    if (!base[j]) continue;
    const bool final_op = next_op_[j] == machines - 1;
    const bool suppressed =
        cfg.non_final_prioritization && final_op && has_non_final[model_->machine(j, next_op_[j])];
    mask_.set(j, !suppressed);
  }
  mask_.set(jobs, noop_legal());
}

bool EnvState::noop_legal() const {
  const auto& cfg = config();
  if (!cfg.allow_noop || future_.empty()) return false;
  const int jobs = job_count();
  const int machines = machine_count();

  constexpr Time kNone = std::numeric_limits<Time>::max();
  std::vector<Time> min_duration(machines, kNone);
  for (JobId j = 0; j < jobs; ++j) {
    if (!base_legal(j)) continue;
    const int k = next_op_[j];
    auto& d = min_duration[model_->machine(j, k)];
    d = std::min(d, model_->duration(j, k));
  }
  const int machines_with_jobs =
      static_cast<int>(std::count_if(min_duration.begin(), min_duration.end(), [](Time d) { return d != kNone; }));
  if (machines_with_jobs == 0) return false;

  if (cfg.noop_caps_rule) {
    int legal_jobs = 0;
    std::vector<std::uint8_t> machine_has_legal(machines, 0);
    for (JobId j = 0; j < jobs; ++j) {
      if (mask_[j]) {
        ++legal_jobs;
        machine_has_legal[model_->machine(j, next_op_[j])] = 1;
      }
    }
    const int legal_machines = static_cast<int>(std::count(machine_has_legal.begin(), machine_has_legal.end(), 1));
    if (legal_machines >= cfg.machines_cap || legal_jobs >= cfg.jobs_cap) return false;
  }

  if (cfg.noop_future_work_rule) {
    // Every machine with candidates needs a non-final arrival strictly
    // sooner than its shortest candidate would take.
    std::vector<std::uint8_t> covered(machines, 0);
    for (JobId j = 0; j < jobs; ++j) {
      if (ready_at_[j] <= clock_) continue;  // not running
      const int k = next_op_[j];
      if (k >= machines - 1) continue;  // done, or arriving op is final
      const MachineId m = model_->machine(j, k);
      if (min_duration[m] != kNone && ready_at_[j] - clock_ < min_duration[m]) covered[m] = 1;
    }
    for (MachineId m = 0; m < machines; ++m) {
      if (min_duration[m] != kNone && !covered[m]) return false;
    }
  }
  return true;
}

Time EnvState::advance(std::vector<Time>& holes) {
  const Time next = future_.front();
  future_.erase(future_.begin());
  Time total = 0;
  for (MachineId m = 0; m < machine_count(); ++m) {
    const Time idle = std::max<Time>(0, next - std::max(clock_, busy_until_[m]));
    holes[m] += idle;
    total += idle;
    if (busy_until_[m] == next) running_[m] = -1;
  }
  clock_ = next;
  return total;
}

void EnvState::clear_pauses(MachineId m) {
  if (paused_count_[m] == 0) return;
  auto first = paused_.begin() + static_cast<std::ptrdiff_t>(m) * job_count();
  std::fill(first, first + job_count(), std::uint8_t{0});
  paused_count_[m] = 0;
}

Time EnvState::settle(std::vector<Time>& holes) {
  Time total = 0;
  while (!mask_.any() && !is_done()) {
    if (future_.empty()) {
      // Only reachable with the future-work rule disabled: paused jobs would
      // otherwise wait forever.
      bool released = false;
      for (MachineId m = 0; m < machine_count(); ++m) {
        released = released || paused_count_[m] > 0;
        clear_pauses(m);
      }
      if (!released) throw Error("environment stalled with no legal action");
      refresh_mask();
      continue;
    }
    total += advance(holes);
    refresh_mask();
  }
  return total;
}

StepOutcome EnvState::step(int action) {
  if (is_done()) throw Error("step called on a terminal state");
  if (action < 0 || action > job_count() || !mask_[action]) {
    throw IllegalActionError("illegal action " + std::to_string(action) + " at clock " + std::to_string(clock_));
  }
  StepOutcome out;
  out.holes.assign(machine_count(), 0);
  const Time start_clock = clock_;
  Time hole_total = 0;
  Time allocated = 0;

  if (action == noop_action()) {
    for (JobId j = 0; j < job_count(); ++j) {
      if (!base_legal(j)) continue;
      const MachineId m = model_->machine(j, next_op_[j]);
      paused_[static_cast<std::size_t>(m) * job_count() + j] = 1;
      ++paused_count_[m];
    }
    while (!future_.empty()) {
      hole_total += advance(out.holes);
      if (any_base_legal()) break;
    }
    refresh_mask();
  } else {
    const JobId j = action;
    const int k = next_op_[j];
    const MachineId m = model_->machine(j, k);
    const Time p = model_->duration(j, k);
    const Time gap = clock_ - ready_at_[j];
    idle_total_[j] += gap;
    last_gap_[j] = gap;
    starts_(j, k) = clock_;
    busy_until_[m] = clock_ + p;
    running_[m] = j;
    ready_at_[j] = clock_ + p;
    ++next_op_[j];
    --ops_remaining_;
    const auto it = std::lower_bound(future_.begin(), future_.end(), clock_ + p);
    if (it == future_.end() || *it != clock_ + p) future_.insert(it, clock_ + p);
    clear_pauses(m);
    allocated = p;
    refresh_mask();
  }
  hole_total += settle(out.holes);

  out.raw_reward = allocated - hole_total;
  out.reward = config().scale_reward
                   ? static_cast<double>(out.raw_reward) / static_cast<double>(stats().max_op_duration)
                   : static_cast<double>(out.raw_reward);
  out.elapsed = clock_ - start_clock;
  out.done = is_done();
  cumulative_raw_ += out.raw_reward;
  cumulative_scaled_ += out.reward;
  out.observation = observe();
  return out;
}

void EnvState::observe_into(FeatureMatrix& f) const {
  const int jobs = job_count();
  const int machines = machine_count();
  const auto& s = stats();
  const double max_op = static_cast<double>(s.max_op_duration);
  const double max_job = static_cast<double>(s.max_job_total);
  const double total = static_cast<double>(s.total_duration);
  f.resize(jobs, kFeatureCount);
  for (JobId j = 0; j < jobs; ++j) {
    const int k = next_op_[j];
    const bool done = k >= machines;
    const bool running = ready_at_[j] > clock_;
    const Time op_left = running ? ready_at_[j] - clock_ : 0;
    const Time wait = done ? 0 : std::max<Time>(0, busy_until_[model_->machine(j, k)] - clock_);
    const Time live_gap = (!done && !running) ? clock_ - ready_at_[j] : 0;
    const Time since_last = (!done && !running) ? live_gap : last_gap_[j];
    f(j, kLegal) = mask_[j] ? 1.0 : 0.0;
    f(j, kOpRemaining) = static_cast<double>(op_left) / max_op;
    f(j, kProgress) = static_cast<double>(k) / machines;
    f(j, kWorkRemaining) = static_cast<double>(model_->suffix_work(j, k) + op_left) / max_job;
    f(j, kMachineWait) = static_cast<double>(wait) / max_op;
    f(j, kIdleSinceLast) = static_cast<double>(since_last) / total;
    f(j, kIdleTotal) = static_cast<double>(idle_total_[j] + live_gap) / total;
  }
}

Observation EnvState::observe() const {
  Observation obs;
  observe_into(obs.features);
  obs.mask = mask_;
  return obs;
}

Time EnvState::makespan() const {
  if (!is_done()) throw Error("makespan requested on a non-terminal state");
  return *std::max_element(ready_at_.begin(), ready_at_.end());
}

MachineStatus EnvState::machine_status(MachineId m) const {
  MachineStatus s;
  s.busy_until = std::max(busy_until_[m], clock_);
  if (running_[m] >= 0 && busy_until_[m] > clock_) s.running_job = running_[m];
  for (JobId j = 0; j < job_count(); ++j) {
    if (paused(m, j)) s.paused_jobs.push_back(j);
  }
  return s;
}

JobStatus EnvState::job_status(JobId j) const {
  JobStatus s;
  s.next_op = next_op_[j];
  s.op_busy_until = ready_at_[j];
  const bool running = ready_at_[j] > clock_;
  s.last_completion = running ? starts_(j, next_op_[j] - 1) - last_gap_[j] : ready_at_[j];
  const bool waiting = next_op_[j] < machine_count() && ready_at_[j] <= clock_;
  s.idle_since_last = waiting ? clock_ - ready_at_[j] : last_gap_[j];
  s.idle_total = idle_total_[j] + (waiting ? clock_ - ready_at_[j] : 0);
  return s;
}

void TrajectoryRecorder::record_reset(const EnvState& state) {
  nlohmann::ordered_json rec;
  rec["step"] = 0;
  rec["action"] = nullptr;
  rec["reward"] = 0;
  rec["scaled_reward"] = 0.0;
  rec["clock"] = state.clock();
  rec["done"] = state.is_done();
  std::vector<int> mask(state.mask().size());
  for (int a = 0; a < state.mask().size(); ++a) mask[a] = state.mask()[a] ? 1 : 0;
  rec["mask"] = mask;
  if (with_features_) {
    const auto obs = state.observe();
    std::vector<std::vector<double>> rows(obs.features.rows());
    for (int r = 0; r < obs.features.rows(); ++r) {
      rows[r].assign(obs.features.row(r).data(), obs.features.row(r).data() + kFeatureCount);
    }
    rec["features"] = rows;
  }
  text_ += rec.dump();
  text_ += '\n';
}

void TrajectoryRecorder::record_step(int step, int action, const StepOutcome& outcome, const EnvState& state) {
  nlohmann::ordered_json rec;
  rec["step"] = step;
  rec["action"] = action;
  rec["reward"] = outcome.raw_reward;
  rec["scaled_reward"] = outcome.reward;
  rec["clock"] = state.clock();
  rec["done"] = outcome.done;
  std::vector<int> mask(outcome.observation.mask.size());
  for (int a = 0; a < outcome.observation.mask.size(); ++a) mask[a] = outcome.observation.mask[a] ? 1 : 0;
  rec["mask"] = mask;
  if (with_features_) {
    const auto& f = outcome.observation.features;
    std::vector<std::vector<double>> rows(f.rows());
    for (int r = 0; r < f.rows(); ++r) rows[r].assign(f.row(r).data(), f.row(r).data() + kFeatureCount);
    rec["features"] = rows;
  }
  if (outcome.done) rec["makespan"] = state.makespan();
  text_ += rec.dump();
  text_ += '\n';
}

}  // namespace jss
