#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "jss/types.hpp"

namespace jss {

struct Operation {
  MachineId machine = 0;
  Time duration = 1;

  friend bool operator==(const Operation&, const Operation&) = default;
};

/// Ordered precedence chain of one job.
struct JobSpec {
  std::vector<Operation> ops;

  friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

/// Immutable classic job-shop instance. Data members are public so tests can
/// build invalid instances and run them through validate().
struct Instance {
  std::string name;
  int job_count = 0;
  int machine_count = 0;
  std::vector<JobSpec> jobs;

  const Operation& op(JobId job, int position) const { return jobs[job].ops[position]; }
  int operation_count() const;

  /// Equality on the data model; the name is ignored.
  friend bool operator==(const Instance& a, const Instance& b) {
    return a.job_count == b.job_count && a.machine_count == b.machine_count && a.jobs == b.jobs;
  }
};

struct InstanceStats {
  Time max_op_duration = 0;
  Time total_duration = 0;
  TimeVector job_totals;
  TimeVector machine_totals;
  Time max_job_total = 0;
  Time trivial_lower_bound = 0;
};

struct Violation {
  enum class Kind { kHeader, kPairCount, kMachineRange, kDuration, kDuplicateMachine };
  Kind kind;
  int job = -1;
  int position = -1;
  MachineId machine = -1;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

struct ParseOptions {
  /// Input uses machine indices 1..M; shift to 0-based on ingest.
  bool one_based = false;
  std::string name;
};

/// Parses the standard text format: a `J M` header followed by J lines of M
/// `machine duration` pairs. Blank lines and lines starting with `#` are
/// skipped. Throws ParseError carrying the offending line number.
Instance parse_instance(std::string_view text, const ParseOptions& options = {});
Instance load_instance(const std::string& path, const ParseOptions& options = {});

/// Canonical text form. parse_instance(serialize_instance(x)) == x.
std::string serialize_instance(const Instance& inst);

ValidationReport validate(const Instance& inst);

/// Throws Error listing the first violation if the instance is not classic.
void require_valid(const Instance& inst);

struct DurationRange {
  Time lo = 1;
  Time hi = 99;
};

/// Taillard-style generator: each job visits a random permutation of the
/// machines with durations uniform in [lo, hi].
Instance generate_random(int job_count, int machine_count, DurationRange range, std::uint64_t seed);

InstanceStats aggregates(const Instance& inst);

}  // namespace jss
