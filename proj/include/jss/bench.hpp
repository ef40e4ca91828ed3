#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jss/env.hpp"
#include "jss/instance.hpp"
#include "jss/schedule.hpp"

namespace jss {

/// Published makespans for one benchmark instance.
struct BoundsEntry {
  std::string instance;
  std::string dataset;
  Time upper_bound = 0;
  std::optional<Time> fifo_paper;
  std::optional<Time> mwkr_paper;
  std::optional<Time> ours_paper;
  std::optional<Time> ortools_paper;
};

/// Published per-dataset averages (Taillard ta41-ta50, Demirkol dmu16-dmu20).
struct DatasetAverages {
  std::string dataset;
  double ours = 0, fifo = 0, mwkr = 0, ortools = 0, upper_bound = 0;
};

const std::vector<BoundsEntry>& embedded_bounds();
const std::vector<DatasetAverages>& embedded_averages();
std::optional<BoundsEntry> lookup_bounds(const std::vector<BoundsEntry>& table, const std::string& instance);

/// "Taillard" for ta*, "Demirkol" for dmu*, otherwise "Other".
std::string dataset_of(const std::string& instance);

struct RunRecord {
  std::string instance;
  std::string agent;
  std::uint64_t seed = 0;
  double wall_budget = 0.0;
  Time makespan = 0;
  std::uint64_t episodes = 0;
  double wall_time = 0.0;
  double engine_steps_per_second = 0.0;
  Time lower_bound = 0;
  bool valid = false;
  std::string error;
  Schedule schedule;
};

struct GridOptions {
  double budget_seconds = 600.0;
  std::vector<std::uint64_t> seeds{0};
  int parallelism = 1;
  EnvConfig env;
};

/// Runs every (instance, agent, seed) cell. Deterministic agents run one
/// episode per instance and ignore seeds. Failed cells are recorded with
/// valid=false and an error message; an unknown agent spec throws before
/// anything runs. Records come back sorted by
/// (instance, agent, seed).
std::vector<RunRecord> run_grid(const std::vector<Instance>& instances, const std::vector<std::string>& agents,
                                const GridOptions& options);

struct Report {
  std::string markdown;
  std::string csv;
  std::string json;
};

/// Table-1 style summary: one row per instance, one column per agent (best
/// makespan over seeds), gap to the upper bound, and per-dataset averages.
/// Throws on an empty record list.
Report report(const std::vector<RunRecord>& records, const std::vector<BoundsEntry>& bounds);

inline constexpr const char* kCsvSchema = "jss-bench-v1";

/// Schedules are not included; the CLI stores them as separate files.
std::string records_to_json(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_json(const std::string& text);

}  // namespace jss
