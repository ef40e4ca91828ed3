#include "jss/schedule.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "json.hpp"

namespace jss {

namespace {

void require_shape(const Instance& inst, const Schedule& sched) {
  if (sched.starts.rows() != inst.job_count || sched.starts.cols() != inst.machine_count) {
    throw Error("schedule shape " + std::to_string(sched.starts.rows()) + "x" + std::to_string(sched.starts.cols()) +
                " does not match instance " + std::to_string(inst.job_count) + "x" +
                std::to_string(inst.machine_count));
  }
  if (!sched.complete()) throw Error("incomplete schedule");
}

std::string op_name(int job, int pos) { return "J" + std::to_string(job) + "/op" + std::to_string(pos); }

}  // namespace

Schedule extract_schedule(const EnvState& state) {
  if (!state.is_done()) throw Error("extract_schedule requires a terminal state");
  return Schedule{state.start_times()};
}

Time schedule_makespan(const Schedule& sched, const Instance& inst) {
  require_shape(inst, sched);
  Time best = 0;
  for (int j = 0; j < inst.job_count; ++j) {
    for (int k = 0; k < inst.machine_count; ++k) best = std::max(best, sched.starts(j, k) + inst.op(j, k).duration);
  }
  return best;
}

ScheduleReport validate_schedule(const Instance& inst, const Schedule& sched) {
  require_shape(inst, sched);
  ScheduleReport report;
  report.makespan = schedule_makespan(sched, inst);

  for (int j = 0; j < inst.job_count; ++j) {
    for (int k = 0; k + 1 < inst.machine_count; ++k) {
      const Time end = sched.starts(j, k) + inst.op(j, k).duration;
      if (sched.starts(j, k + 1) < end) {
        report.violations.push_back({ScheduleViolation::Kind::kPrecedence, j, k + 1, j, k,
                                     op_name(j, k + 1) + " starts at " + std::to_string(sched.starts(j, k + 1)) +
                                         " before " + op_name(j, k) + " ends at " + std::to_string(end)});
      }
    }
  }

  struct Interval {
    Time start, end;
    int job, pos;
  };
  std::vector<std::vector<Interval>> per_machine(inst.machine_count);
  for (int j = 0; j < inst.job_count; ++j) {
    for (int k = 0; k < inst.machine_count; ++k) {
      const auto& op = inst.op(j, k);
      per_machine[op.machine].push_back({sched.starts(j, k), sched.starts(j, k) + op.duration, j, k});
    }
  }
  for (int m = 0; m < inst.machine_count; ++m) {
    auto& ivs = per_machine[m];
    std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) {
      return std::tie(a.start, a.job) < std::tie(b.start, b.job);
    });
    // Compare each interval against every later one it reaches so that all
    // overlapping pairs are reported, not just adjacent ones.
    for (std::size_t a = 0; a < ivs.size(); ++a) {
      for (std::size_t b = a + 1; b < ivs.size() && ivs[b].start < ivs[a].end; ++b) {
        report.violations.push_back({ScheduleViolation::Kind::kOverlap, ivs[a].job, ivs[a].pos, ivs[b].job,
                                     ivs[b].pos,
                                     "machine " + std::to_string(m) + ": " + op_name(ivs[a].job, ivs[a].pos) + " [" +
                                         std::to_string(ivs[a].start) + "," + std::to_string(ivs[a].end) +
                                         ") overlaps " + op_name(ivs[b].job, ivs[b].pos) + " [" +
                                         std::to_string(ivs[b].start) + "," + std::to_string(ivs[b].end) + ")"});
      }
    }
  }
  report.valid = report.violations.empty();
  return report;
}

std::string export_gantt_svg(const Instance& inst, const Schedule& sched) {
  const auto report = validate_schedule(inst, sched);
  if (!report.valid) throw Error("cannot render invalid schedule: " + report.violations.front().detail);

  static constexpr std::array<const char*, 12> kPalette = {
      "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
      "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#1f77b4", "#d62728"};
  constexpr int kRowHeight = 30;
  constexpr int kLabelWidth = 50;
  constexpr int kPlotWidth = 1000;
  const Time span = std::max<Time>(report.makespan, 1);
  const int height = kRowHeight * (inst.machine_count + 1);
  auto x_of = [&](Time t) { return kLabelWidth + static_cast<double>(t) * kPlotWidth / static_cast<double>(span); };

  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kLabelWidth + kPlotWidth + 10 << "\" height=\""
      << height << "\" font-family=\"monospace\" font-size=\"10\">\n";
  if (!inst.name.empty()) svg << "<title>" << inst.name << " makespan " << report.makespan << "</title>\n";
  for (int m = 0; m < inst.machine_count; ++m) {
    svg << "<text x=\"2\" y=\"" << m * kRowHeight + 19 << "\">M" << m << "</text>\n";
  }
  for (int j = 0; j < inst.job_count; ++j) {
    for (int k = 0; k < inst.machine_count; ++k) {
      const auto& op = inst.op(j, k);
      const double x0 = x_of(sched.starts(j, k));
      const double x1 = x_of(sched.starts(j, k) + op.duration);
      const int y = op.machine * kRowHeight + 4;
      svg << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << x1 - x0 << "\" height=\"" << kRowHeight - 8
          << "\" fill=\"" << kPalette[j % kPalette.size()] << "\" stroke=\"#000\" stroke-width=\"0.5\"/>\n";
      svg << "<text x=\"" << x0 + 2 << "\" y=\"" << y + 15 << "\">J" << j << "</text>\n";
    }
  }
  const int axis_y = inst.machine_count * kRowHeight + 15;
  svg << "<text x=\"" << kLabelWidth << "\" y=\"" << axis_y << "\">0</text>\n";
  svg << "<text x=\"" << kLabelWidth + kPlotWidth - 30 << "\" y=\"" << axis_y << "\">" << report.makespan
      << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string export_json(const Instance& inst, const Schedule& sched) {
  nlohmann::ordered_json doc;
  doc["instance_name"] = inst.name;
  doc["makespan"] = schedule_makespan(sched, inst);
  auto rows = nlohmann::json::array();
  for (int j = 0; j < sched.starts.rows(); ++j) {
    auto row = nlohmann::json::array();
    for (int k = 0; k < sched.starts.cols(); ++k) row.push_back(sched.starts(j, k));
    rows.push_back(std::move(row));
  }
  doc["starts"] = std::move(rows);
  return doc.dump() + "\n";
}

Schedule import_json(const std::string& text, const Instance& inst) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("schedule JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("starts") || !doc.contains("makespan") || !doc.contains("instance_name")) {
    throw Error("schedule JSON: expected object with instance_name, makespan, starts");
  }
  const auto& rows = doc["starts"];
  if (!rows.is_array() || rows.empty()) throw Error("schedule JSON: starts must be a non-empty array");
  if (static_cast<int>(rows.size()) != inst.job_count) throw Error("schedule JSON: job count mismatch");
  Schedule sched{TimeMatrix(inst.job_count, inst.machine_count)};
  for (int j = 0; j < inst.job_count; ++j) {
    const auto& row = rows[j];
    if (!row.is_array() || static_cast<int>(row.size()) != inst.machine_count) {
      throw Error("schedule JSON: row " + std::to_string(j) + " has wrong length");
    }
    for (int k = 0; k < inst.machine_count; ++k) {
      if (!row[k].is_number_integer()) throw Error("schedule JSON: non-integer start");
      sched.starts(j, k) = row[k].get<Time>();
    }
  }
  if (!doc["makespan"].is_number_integer()) throw Error("schedule JSON: makespan must be an integer");
  const Time declared = doc["makespan"].get<Time>();
  const Time actual = schedule_makespan(sched, inst);
  if (declared != actual) {
    throw Error("schedule JSON: makespan " + std::to_string(declared) + " != recomputed " + std::to_string(actual));
  }
  return sched;
}

}  // namespace jss
