#include "jss/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "jss/agents.hpp"
#include "json.hpp"

namespace jss {

const std::vector<BoundsEntry>& embedded_bounds() {
  // instance, dataset, upper bound, FIFO, MWKR, learned agent, OR-Tools
  static const std::vector<BoundsEntry> table = {
      {"ta41", "Taillard", 2005, 2543, 2632, 2208, 2144},
      {"ta42", "Taillard", 1937, 2578, 2401, 2168, 2071},
      {"ta43", "Taillard", 1846, 2506, 2385, 2086, 1967},
      {"ta44", "Taillard", 1979, 2555, 2532, 2261, 2094},
      {"ta45", "Taillard", 2000, 2565, 2431, 2227, 2032},
      {"ta46", "Taillard", 2004, 2617, 2485, 2349, 2129},
      {"ta47", "Taillard", 1889, 2508, 2301, 2101, 1952},
      {"ta48", "Taillard", 1941, 2541, 2350, 2267, 2091},
      {"ta49", "Taillard", 1961, 2550, 2474, 2154, 2089},
      {"ta50", "Taillard", 1923, 2531, 2496, 2216, 2010},
      {"dmu16", "Demirkol", 3751, 4934, 4550, 4188, 3903},
      {"dmu17", "Demirkol", 3814, 5014, 4874, 4274, 3960},
      {"dmu18", "Demirkol", 3844, 4936, 4792, 4326, 4073},
      {"dmu19", "Demirkol", 3764, 4902, 4842, 4195, 3922},
      {"dmu20", "Demirkol", 3703, 4539, 4500, 4074, 3913},
  };
  return table;
}

const std::vector<DatasetAverages>& embedded_averages() {
  static const std::vector<DatasetAverages> table = {
      {"Taillard", 2203, 2549, 2449, 2058, 1948},
      {"Demirkol", 4211, 4865, 4712, 3954, 3775},
  };
  return table;
}

std::optional<BoundsEntry> lookup_bounds(const std::vector<BoundsEntry>& table, const std::string& instance) {
  for (const auto& e : table) {
    if (e.instance == instance) return e;
  }
  return std::nullopt;
}

std::string dataset_of(const std::string& instance) {
  if (instance.rfind("dmu", 0) == 0) return "Demirkol";
  if (instance.rfind("ta", 0) == 0) return "Taillard";
  return "Other";
}

namespace {

struct Cell {
  std::size_t instance;
  std::string agent;
  std::uint64_t seed;
  bool deterministic;
};

RunRecord run_cell(const Instance& inst, const Cell& cell, const GridOptions& options) {
  RunRecord rec;
  rec.instance = inst.name;
  rec.agent = cell.agent;
  rec.seed = cell.seed;
  rec.wall_budget = options.budget_seconds;
  try {
    rec.lower_bound = aggregates(inst).trivial_lower_bound;
    auto agent = make_agent(cell.agent, cell.seed);
    if (cell.deterministic) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = rollout(inst, *agent, options.env);
      rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rec.makespan = r.makespan;
      rec.episodes = 1;
      rec.engine_steps_per_second = rec.wall_time > 0 ? r.steps / rec.wall_time : 0.0;
      rec.schedule = r.schedule;
    } else {
      SearchOptions so;
      so.budget_seconds = options.budget_seconds;
      so.seed = cell.seed;
      so.env = options.env;
      const auto r = best_of_search(inst, *agent, so);
      rec.wall_time = r.wall_time;
      rec.makespan = r.best_makespan;
      rec.episodes = r.episodes;
      rec.engine_steps_per_second = r.wall_time > 0 ? static_cast<double>(r.steps) / r.wall_time : 0.0;
      rec.schedule = r.best_schedule;
    }
    const auto check = validate_schedule(inst, rec.schedule);
    rec.valid = check.valid && check.makespan == rec.makespan && rec.makespan >= rec.lower_bound;
    if (!rec.valid) rec.error = check.violations.empty() ? "makespan mismatch" : check.violations.front().detail;
  } catch (const std::exception& e) {
    rec.valid = false;
    rec.error = e.what();
  }
  return rec;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<RunRecord> run_grid(const std::vector<Instance>& instances, const std::vector<std::string>& agents,
                                const GridOptions& options) {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    require_valid(instances[i]);
    for (const auto& spec : agents) {
      const bool deterministic = !make_agent(spec)->stochastic();
      if (deterministic) {
        cells.push_back({i, spec, 0, true});
      } else {
        for (auto seed : options.seeds) cells.push_back({i, spec, seed, false});
      }
    }
  }
  std::vector<RunRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      records[c] = run_cell(instances[cells[c].instance], cells[c], options);
    }
  };
  const int workers = std::clamp(options.parallelism, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.instance, a.agent, a.seed) < std::tie(b.instance, b.agent, b.seed);
  });
  return records;
}

Report report(const std::vector<RunRecord>& records, const std::vector<BoundsEntry>& bounds) {
  if (records.empty()) throw Error("report: no records");

  std::vector<std::string> agents;
  std::map<std::string, std::map<std::string, Time>> best;  // instance -> agent -> makespan
  std::vector<std::string> instances;
  for (const auto& r : records) {
    if (std::find(agents.begin(), agents.end(), r.agent) == agents.end()) agents.push_back(r.agent);
    if (std::find(instances.begin(), instances.end(), r.instance) == instances.end()) instances.push_back(r.instance);
    if (!r.valid) continue;
    auto& cell = best[r.instance];
    auto it = cell.find(r.agent);
    if (it == cell.end() || r.makespan < it->second) cell[r.agent] = r.makespan;
  }
  std::sort(agents.begin(), agents.end());
  std::stable_sort(instances.begin(), instances.end(), [](const std::string& a, const std::string& b) {
    return std::make_pair(dataset_of(a), a) < std::make_pair(dataset_of(b), b);
  });

  auto gap = [](Time value, Time ub) { return 100.0 * static_cast<double>(value - ub) / static_cast<double>(ub); };

  std::ostringstream md;
  md << "| Dataset | Instance |";
  for (const auto& a : agents) md << ' ' << a << " |";
  md << " Upper Bound | FIFO (ref) | MWKR (ref) | Learned (ref) | OR-Tools (ref) |\n";
  md << "|---|---|";
  for (std::size_t i = 0; i < agents.size(); ++i) md << "---:|";
  md << "---:|---:|---:|---:|---:|\n";

  nlohmann::ordered_json rows = nlohmann::json::array();
  auto ref = [](const std::optional<Time>& v) { return v ? std::to_string(*v) : std::string("-"); };

  struct Sums {
    std::map<std::string, std::pair<double, int>> agent;
    double ub = 0;
    int ub_n = 0;
  };
  std::map<std::string, Sums> per_dataset;
  std::vector<std::string> dataset_order;

  for (const auto& name : instances) {
    const auto ds = dataset_of(name);
    if (std::find(dataset_order.begin(), dataset_order.end(), ds) == dataset_order.end()) dataset_order.push_back(ds);
    const auto bound = lookup_bounds(bounds, name);
    auto& sums = per_dataset[ds];
    md << "| " << ds << " | " << name << " |";
    nlohmann::ordered_json row;
    row["dataset"] = ds;
    row["instance"] = name;
    nlohmann::ordered_json cells = nlohmann::json::object();
    for (const auto& a : agents) {
      const auto& per = best[name];
      const auto it = per.find(a);
      if (it == per.end()) {
        md << " - |";
        cells[a] = nullptr;
        continue;
      }
      auto& [sum, n] = sums.agent[a];
      sum += static_cast<double>(it->second);
      ++n;
      md << ' ' << it->second;
      nlohmann::ordered_json c;
      c["makespan"] = it->second;
      if (bound) {
        md << " (" << fixed(gap(it->second, bound->upper_bound), 1) << "%)";
        c["gap_percent"] = std::stod(fixed(gap(it->second, bound->upper_bound), 3));
      }
      md << " |";
      cells[a] = c;
    }
    row["agents"] = cells;
    if (bound) {
      sums.ub += static_cast<double>(bound->upper_bound);
      ++sums.ub_n;
      md << ' ' << bound->upper_bound << " | " << ref(bound->fifo_paper) << " | " << ref(bound->mwkr_paper) << " | "
         << ref(bound->ours_paper) << " | " << ref(bound->ortools_paper) << " |\n";
      row["upper_bound"] = bound->upper_bound;
    } else {
      md << " - | - | - | - | - |\n";
      row["upper_bound"] = nullptr;
    }
    rows.push_back(row);
  }

  nlohmann::ordered_json averages = nlohmann::json::array();
  for (const auto& ds : dataset_order) {
    const auto& sums = per_dataset[ds];
    md << "| " << ds << " | **Average** |";
    nlohmann::ordered_json avg;
    avg["dataset"] = ds;
    nlohmann::ordered_json cells = nlohmann::json::object();
    for (const auto& a : agents) {
      const auto it = sums.agent.find(a);
      if (it == sums.agent.end()) {
        md << " - |";
        cells[a] = nullptr;
        continue;
      }
      const double mean = it->second.first / it->second.second;
      md << ' ' << fixed(mean, 1) << " |";
      cells[a] = std::stod(fixed(mean, 3));
    }
    avg["agents"] = cells;
    if (sums.ub_n > 0) {
      md << ' ' << fixed(sums.ub / sums.ub_n, 1) << " | | | | |\n";
      avg["upper_bound"] = std::stod(fixed(sums.ub / sums.ub_n, 3));
    } else {
      md << " - | | | | |\n";
      avg["upper_bound"] = nullptr;
    }
    averages.push_back(avg);
  }

  std::ostringstream csv;
  csv << "schema,instance,dataset,agent,seed,wall_budget,makespan,episodes,wall_time,engine_steps_per_second,"
         "lower_bound,upper_bound,gap_percent,valid,error\n";
  for (const auto& r : records) {
    const auto bound = lookup_bounds(bounds, r.instance);
    csv << kCsvSchema << ',' << csv_escape(r.instance) << ',' << dataset_of(r.instance) << ',' << csv_escape(r.agent)
        << ',' << r.seed << ',' << fixed(r.wall_budget, 3) << ',' << r.makespan << ',' << r.episodes << ','
        << fixed(r.wall_time, 6) << ',' << fixed(r.engine_steps_per_second, 1) << ',' << r.lower_bound << ',';
    if (bound) {
      csv << bound->upper_bound << ',' << (r.valid ? fixed(gap(r.makespan, bound->upper_bound), 3) : "");
    } else {
      csv << ',';
    }
    csv << ',' << (r.valid ? "true" : "false") << ',' << csv_escape(r.error) << '\n';
  }

  nlohmann::ordered_json doc;
  doc["schema"] = kCsvSchema;
  doc["rows"] = rows;
  doc["averages"] = averages;
  return {md.str(), csv.str(), doc.dump(2) + "\n"};
}

std::string records_to_json(const std::vector<RunRecord>& records) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["instance"] = r.instance;
    j["agent"] = r.agent;
    j["seed"] = r.seed;
    j["wall_budget"] = r.wall_budget;
    j["makespan"] = r.makespan;
    j["episodes"] = r.episodes;
    j["wall_time"] = r.wall_time;
    j["engine_steps_per_second"] = r.engine_steps_per_second;
    j["lower_bound"] = r.lower_bound;
    j["valid"] = r.valid;
    j["error"] = r.error;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::vector<RunRecord> records_from_json(const std::string& text) {
  std::vector<RunRecord> out;
  try {
    const auto arr = nlohmann::json::parse(text);
    for (const auto& j : arr) {
      RunRecord r;
      r.instance = j.at("instance").get<std::string>();
      r.agent = j.at("agent").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.wall_budget = j.at("wall_budget").get<double>();
      r.makespan = j.at("makespan").get<Time>();
      r.episodes = j.at("episodes").get<std::uint64_t>();
      r.wall_time = j.at("wall_time").get<double>();
      r.engine_steps_per_second = j.at("engine_steps_per_second").get<double>();
      r.lower_bound = j.at("lower_bound").get<Time>();
      r.valid = j.at("valid").get<bool>();
      r.error = j.at("error").get<std::string>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("records JSON: ") + e.what());
  }
  return out;
}

}  // namespace jss
