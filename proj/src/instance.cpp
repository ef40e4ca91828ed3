#include "jss/instance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "jss/random.hpp"

namespace jss {

namespace {

std::vector<std::int64_t> tokenize(std::string_view line, int line_no) {
  std::vector<std::int64_t> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    std::int64_t value = 0;
    const auto token = line.substr(i, j - i);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ParseError(line_no, "not an integer: '" + std::string(token) + "'");
    }
    out.push_back(value);
    i = j;
  }
  return out;
}

bool skippable(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '#';
}

}  // namespace

int Instance::operation_count() const {
  int n = 0;
  for (const auto& j : jobs) n += static_cast<int>(j.ops.size());
  return n;
}

Instance parse_instance(std::string_view text, const ParseOptions& options) {
  Instance inst;
  inst.name = options.name;
  bool have_header = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (skippable(line)) {
      if (end == text.size()) break;
      continue;
    }
    const auto values = tokenize(line, line_no);
    if (!have_header) {
      if (values.size() != 2 || values[0] < 1 || values[1] < 1 || values[0] > INT32_MAX ||
          values[1] > INT32_MAX) {
        throw ParseError(line_no, "malformed header, expected 'jobs machines'");
      }
      inst.job_count = static_cast<int>(values[0]);
      inst.machine_count = static_cast<int>(values[1]);
      inst.jobs.reserve(inst.job_count);
      have_header = true;
    } else {
      if (static_cast<int>(inst.jobs.size()) == inst.job_count) {
        throw ParseError(line_no, "more job lines than declared in header");
      }
      const auto m = static_cast<std::size_t>(inst.machine_count);
      if (values.size() != 2 * m) {
        throw ParseError(line_no, "expected " + std::to_string(m) + " (machine duration) pairs, got " +
                                      std::to_string(values.size()) + " integers");
      }
      JobSpec job;
      job.ops.reserve(m);
      std::vector<bool> seen(m, false);
      for (std::size_t k = 0; k < m; ++k) {
        auto machine = values[2 * k] - (options.one_based ? 1 : 0);
        const auto duration = values[2 * k + 1];
        if (machine < 0 || machine >= inst.machine_count) {
          throw ParseError(line_no, "machine index " + std::to_string(values[2 * k]) + " out of range");
        }
        if (duration < 1) {
          throw ParseError(line_no, "duration " + std::to_string(duration) + " < 1");
        }
        if (seen[machine]) {
          throw ParseError(line_no, "job visits machine " + std::to_string(values[2 * k]) + " twice");
        }
        seen[machine] = true;
        job.ops.push_back({static_cast<MachineId>(machine), duration});
      }
      inst.jobs.push_back(std::move(job));
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  if (static_cast<int>(inst.jobs.size()) != inst.job_count) {
    throw ParseError(line_no, "expected " + std::to_string(inst.job_count) + " job lines, got " +
                                  std::to_string(inst.jobs.size()));
  }
  return inst;
}

Instance load_instance(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open instance file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto opts = options;
  if (opts.name.empty()) {
    auto base = path.substr(path.find_last_of('/') + 1);
    opts.name = base.substr(0, base.find('.'));
  }
  return parse_instance(buffer.str(), opts);
}

std::string serialize_instance(const Instance& inst) {
  std::string out = std::to_string(inst.job_count) + " " + std::to_string(inst.machine_count) + "\n";
  for (const auto& job : inst.jobs) {
    bool first = true;
    for (const auto& op : job.ops) {
      if (!first) out += ' ';
      first = false;
      out += std::to_string(op.machine);
      out += ' ';
      out += std::to_string(op.duration);
    }
    out += '\n';
  }
  return out;
}

ValidationReport validate(const Instance& inst) {
  ValidationReport report;
  auto add = [&](Violation::Kind kind, int job, int pos, MachineId m, std::string detail) {
    report.violations.push_back({kind, job, pos, m, std::move(detail)});
  };
  if (inst.job_count < 1 || inst.machine_count < 1) {
    add(Violation::Kind::kHeader, -1, -1, -1, "job_count and machine_count must be >= 1");
  }
  if (static_cast<int>(inst.jobs.size()) != inst.job_count) {
    add(Violation::Kind::kHeader, -1, -1, -1,
        "job_count " + std::to_string(inst.job_count) + " but " + std::to_string(inst.jobs.size()) + " jobs");
  }
  for (int j = 0; j < static_cast<int>(inst.jobs.size()); ++j) {
    const auto& ops = inst.jobs[j].ops;
    const std::string job = "job " + std::to_string(j);
    if (static_cast<int>(ops.size()) != inst.machine_count) {
      add(Violation::Kind::kPairCount, j, -1, -1,
          job + " has " + std::to_string(ops.size()) + " operations, expected " +
              std::to_string(inst.machine_count));
    }
    std::vector<int> visits(std::max(inst.machine_count, 0), 0);
    for (int k = 0; k < static_cast<int>(ops.size()); ++k) {
      const auto& op = ops[k];
      if (op.duration < 1) {
        add(Violation::Kind::kDuration, j, k, op.machine,
            job + " operation " + std::to_string(k) + " has duration " + std::to_string(op.duration));
      }
      if (op.machine < 0 || op.machine >= inst.machine_count) {
        add(Violation::Kind::kMachineRange, j, k, op.machine,
            job + " operation " + std::to_string(k) + " uses machine " + std::to_string(op.machine) +
                " out of range");
        continue;
      }
      if (++visits[op.machine] == 2) {
        add(Violation::Kind::kDuplicateMachine, j, k, op.machine,
            job + " visits machine " + std::to_string(op.machine) + " more than once");
      }
    }
  }
  return report;
}

void require_valid(const Instance& inst) {
  const auto report = validate(inst);
  if (!report.ok()) throw Error("invalid instance: " + report.violations.front().detail);
}

Instance generate_random(int job_count, int machine_count, DurationRange range, std::uint64_t seed) {
  if (job_count < 1 || machine_count < 1) throw Error("generate_random: job and machine counts must be >= 1");
  if (range.lo < 1 || range.hi < range.lo) throw Error("generate_random: empty or non-positive duration range");
  Rng rng(seed);
  Instance inst;
  inst.name = "rand_" + std::to_string(job_count) + "x" + std::to_string(machine_count) + "_s" +
              std::to_string(seed);
  inst.job_count = job_count;
  inst.machine_count = machine_count;
  inst.jobs.resize(job_count);
  const auto width = static_cast<std::uint64_t>(range.hi - range.lo + 1);
  for (auto& job : inst.jobs) {
    std::vector<MachineId> perm(machine_count);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = machine_count - 1; i > 0; --i) {
      const auto k = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[i], perm[k]);
    }
    job.ops.reserve(machine_count);
    for (auto m : perm) job.ops.push_back({m, range.lo + static_cast<Time>(rng.below(width))});
  }
  return inst;
}

InstanceStats aggregates(const Instance& inst) {
  InstanceStats s;
  s.job_totals = TimeVector::Zero(inst.job_count);
  s.machine_totals = TimeVector::Zero(inst.machine_count);
  for (int j = 0; j < inst.job_count; ++j) {
    for (const auto& op : inst.jobs[j].ops) {
      s.max_op_duration = std::max(s.max_op_duration, op.duration);
      s.job_totals[j] += op.duration;
      s.machine_totals[op.machine] += op.duration;
    }
  }
  s.total_duration = s.job_totals.sum();
  s.max_job_total = inst.job_count > 0 ? s.job_totals.maxCoeff() : 0;
  const Time max_machine = inst.machine_count > 0 ? s.machine_totals.maxCoeff() : 0;
  s.trivial_lower_bound = std::max(s.max_job_total, max_machine);
  return s;
}

}  // namespace jss
