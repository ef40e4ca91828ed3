#pragma once

#include <string>
#include <vector>

#include "jss/env.hpp"
#include "jss/instance.hpp"
#include "jss/types.hpp"

namespace jss {

/// Start time of every operation, indexed by (job, position in the job).
/// Durations are looked up in the instance. Unset entries hold -1.
struct Schedule {
  TimeMatrix starts;

  bool complete() const { return starts.size() > 0 && (starts.array() >= 0).all(); }

  friend bool operator==(const Schedule& a, const Schedule& b) {
    return a.starts.rows() == b.starts.rows() && a.starts.cols() == b.starts.cols() && a.starts == b.starts;
  }
};

struct ScheduleViolation {
  enum class Kind { kPrecedence, kOverlap };
  Kind kind;
  int job = -1;
  int position = -1;
  int other_job = -1;
  int other_position = -1;
  std::string detail;
};

struct ScheduleReport {
  bool valid = true;
  Time makespan = 0;
  std::vector<ScheduleViolation> violations;
};

/// Throws on a non-terminal state.
Schedule extract_schedule(const EnvState& state);

/// Checks job precedence and machine exclusivity. Throws if the schedule is
/// incomplete or its shape does not match the instance.
ScheduleReport validate_schedule(const Instance& inst, const Schedule& sched);

Time schedule_makespan(const Schedule& sched, const Instance& inst);

/// One row per machine, one block per operation labelled by job. Throws on an
/// invalid schedule.
std::string export_gantt_svg(const Instance& inst, const Schedule& sched);

/// {"instance_name", "makespan", "starts": [[...], ...]}
std::string export_json(const Instance& inst, const Schedule& sched);
/// Throws Error on schema mismatch, empty starts, a shape that differs from
/// the instance, or a makespan field that disagrees with recomputation.
Schedule import_json(const std::string& text, const Instance& inst);

}  // namespace jss
