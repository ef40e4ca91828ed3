// Command-line front end: instance inspection, rollouts, trajectory dumps,
// schedule validation and rendering, exact solvers, and the benchmark grid.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "jss/agents.hpp"
#include "jss/bench.hpp"
#include "jss/oracles.hpp"

namespace fs = std::filesystem;
using namespace jss;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const auto lo = std::stoull(spec.substr(0, dots));
    const auto hi = std::stoull(spec.substr(dots + 2));
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  return seeds;
}

std::vector<std::string> split_list(const std::string& spec) {
  std::vector<std::string> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Instance> load_instances(const std::string& path, bool one_based) {
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
  } else {
    files = split_list(path);
  }
  std::vector<Instance> out;
  for (const auto& f : files) {
    ParseOptions opts;
    opts.one_based = one_based;
    out.push_back(load_instance(f, opts));
  }
  return out;
}

nlohmann::ordered_json stats_json(const Instance& inst) {
  const auto s = aggregates(inst);
  nlohmann::ordered_json j;
  j["name"] = inst.name;
  j["jobs"] = inst.job_count;
  j["machines"] = inst.machine_count;
  j["operations"] = inst.operation_count();
  j["max_op_duration"] = s.max_op_duration;
  j["total_duration"] = s.total_duration;
  j["max_job_total"] = s.max_job_total;
  j["trivial_lower_bound"] = s.trivial_lower_bound;
  j["job_totals"] = std::vector<Time>(s.job_totals.data(), s.job_totals.data() + s.job_totals.size());
  j["machine_totals"] = std::vector<Time>(s.machine_totals.data(), s.machine_totals.data() + s.machine_totals.size());
  return j;
}

int env_workers() {
  if (const char* w = std::getenv("JSS_WORKERS")) return std::max(1, std::atoi(w));
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Job-shop scheduling environment and solver toolkit"};
  app.require_subcommand(1);

  // inspect
  std::string inspect_file;
  bool one_based = false;
  auto* inspect = app.add_subcommand("inspect", "Print instance statistics and validation report as JSON");
  inspect->add_option("file", inspect_file)->required();
  inspect->add_flag("--one-based", one_based, "Machine indices in the file start at 1");

  // generate
  int gen_jobs = 0, gen_machines = 0;
  std::uint64_t gen_seed = 0;
  Time gen_lo = 1, gen_hi = 99;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Generate a random Taillard-style instance");
  generate->add_option("jobs", gen_jobs)->required();
  generate->add_option("machines", gen_machines)->required();
  generate->add_option("--seed", gen_seed);
  generate->add_option("--min", gen_lo);
  generate->add_option("--max", gen_hi);
  generate->add_option("-o,--out", gen_out);

  // rollout
  std::string ro_instance, ro_agent = "fifo", ro_out, ro_trace, ro_actions;
  std::uint64_t ro_seed = 0;
  double ro_budget = 0.0;
  bool ro_features = false;
  auto* roll = app.add_subcommand("rollout", "Run an agent (or a best-of search with --budget) and emit the schedule");
  roll->add_option("instance", ro_instance)->required();
  roll->add_option("--agent", ro_agent);
  roll->add_option("--seed", ro_seed);
  roll->add_option("--budget", ro_budget, "Seconds of best-of search for stochastic agents");
  roll->add_option("-o,--out", ro_out, "Schedule JSON output");
  roll->add_flag("--one-based", one_based);

  // trace
  auto* trace = app.add_subcommand("trace", "Dump a deterministic JSON-lines trajectory");
  trace->add_option("instance", ro_instance)->required();
  trace->add_option("--agent", ro_agent);
  trace->add_option("--seed", ro_seed);
  trace->add_option("--actions", ro_actions, "Comma-separated scripted actions instead of an agent");
  trace->add_flag("--features", ro_features, "Include the feature matrix in every record");
  trace->add_option("-o,--out", ro_trace);
  trace->add_flag("--one-based", one_based);

  // validate / gantt
  std::string sched_instance, sched_file, svg_out;
  auto* validate_cmd = app.add_subcommand("validate", "Validate a schedule against an instance");
  validate_cmd->add_option("instance", sched_instance)->required();
  validate_cmd->add_option("schedule", sched_file)->required();
  auto* gantt = app.add_subcommand("gantt", "Render a schedule as an SVG Gantt chart");
  gantt->add_option("instance", sched_instance)->required();
  gantt->add_option("schedule", sched_file)->required();
  gantt->add_option("-o,--out", svg_out)->required();

  // optimal
  std::string opt_instance;
  int opt_cap = 12;
  auto* optimal = app.add_subcommand("optimal", "Exact optimum and best env-reachable makespan for tiny instances");
  optimal->add_option("instance", opt_instance)->required();
  optimal->add_option("--max-ops", opt_cap);

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark grid and reports");
  bench->require_subcommand(1);
  std::string bench_instances, bench_agents = "fifo,mwkr", bench_seeds = "0", bench_out = "results";
  double bench_budget = 600.0;
  int bench_workers = 0;
  auto* run = bench->add_subcommand("run", "Run agents over instances");
  run->add_option("--instances", bench_instances, "Directory or comma-separated files")->required();
  run->add_option("--agents", bench_agents);
  run->add_option("--budget", bench_budget, "Seconds per (instance, agent, seed) cell");
  run->add_option("--seeds", bench_seeds, "e.g. 0..4 or 1,5,9");
  run->add_option("--out", bench_out);
  run->add_option("--workers", bench_workers, "Parallel cells (default: $JSS_WORKERS or 1)");
  run->add_flag("--one-based", one_based);
  std::string report_dir, report_bounds = "builtin", report_out;
  auto* rep = bench->add_subcommand("report", "Summarise a results directory");
  rep->add_option("results", report_dir)->required();
  rep->add_option("--bounds", report_bounds, "builtin or none");
  rep->add_option("--out", report_out, "Output directory (default: the results directory)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*inspect) {
      ParseOptions opts;
      opts.one_based = one_based;
      const auto inst = load_instance(inspect_file, opts);
      auto j = stats_json(inst);
      const auto report = validate(inst);
      j["valid"] = report.ok();
      auto v = nlohmann::json::array();
      for (const auto& viol : report.violations) v.push_back(viol.detail);
      j["violations"] = v;
      std::cout << j.dump(2) << "\n";
      return report.ok() ? 0 : 1;
    }
    if (*generate) {
      const auto inst = generate_random(gen_jobs, gen_machines, {gen_lo, gen_hi}, gen_seed);
      write_file(gen_out, serialize_instance(inst));
      return 0;
    }
    if (*roll) {
      ParseOptions opts;
      opts.one_based = one_based;
      const auto inst = load_instance(ro_instance, opts);
      auto agent = make_agent(ro_agent, ro_seed);
      Schedule sched;
      Time makespan = 0;
      if (agent->stochastic() && ro_budget > 0) {
        SearchOptions so;
        so.budget_seconds = ro_budget;
        so.seed = ro_seed;
        so.workers = env_workers();
        const auto r = best_of_search(inst, *agent, so);
        sched = r.best_schedule;
        makespan = r.best_makespan;
        std::cerr << "episodes " << r.episodes << " wall " << r.wall_time << "s\n";
      } else {
        const auto r = rollout(inst, *agent);
        sched = r.schedule;
        makespan = r.makespan;
        std::cerr << "steps " << r.steps << " noops " << r.noops << " reward " << r.raw_reward << "\n";
      }
      std::cerr << inst.name << " " << agent->name() << " makespan " << makespan << "\n";
      write_file(ro_out, export_json(inst, sched));
      return 0;
    }
    if (*trace) {
      ParseOptions opts;
      opts.one_based = one_based;
      const auto inst = load_instance(ro_instance, opts);
      const auto model = std::make_shared<const EnvModel>(inst, EnvConfig{});
      TrajectoryRecorder recorder(ro_features);
      if (!ro_actions.empty()) {
        EnvState state(model);
        recorder.record_reset(state);
        int step = 0;
        for (const auto& a : split_list(ro_actions)) {
          if (state.is_done()) break;
          const auto outcome = state.step(std::stoi(a));
          recorder.record_step(++step, std::stoi(a), outcome, state);
        }
      } else {
        auto agent = make_agent(ro_agent, ro_seed);
        rollout(model, *agent, &recorder);
      }
      write_file(ro_trace, recorder.text());
      return 0;
    }
    if (*validate_cmd || *gantt) {
      const auto inst = load_instance(sched_instance);
      const auto sched = import_json(read_file(sched_file), inst);
      const auto report = validate_schedule(inst, sched);
      if (*gantt) {
        write_file(svg_out, export_gantt_svg(inst, sched));
        return 0;
      }
      nlohmann::ordered_json j;
      j["valid"] = report.valid;
      j["makespan"] = report.makespan;
      auto v = nlohmann::json::array();
      for (const auto& viol : report.violations) {
        v.push_back({{"kind", viol.kind == ScheduleViolation::Kind::kPrecedence ? "precedence" : "overlap"},
                     {"detail", viol.detail}});
      }
      j["violations"] = v;
      std::cout << j.dump(2) << "\n";
      return report.valid ? 0 : 1;
    }
    if (*optimal) {
      const auto inst = load_instance(opt_instance);
      OracleLimits limits;
      limits.max_operations = opt_cap;
      nlohmann::ordered_json j;
      j["brute_force_optimal"] = brute_force_optimal(inst, limits);
      j["env_tree_best"] = env_tree_best(inst, limits);
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*run) {
      const auto instances = load_instances(bench_instances, one_based);
      GridOptions go;
      go.budget_seconds = bench_budget;
      go.seeds = parse_seeds(bench_seeds);
      go.parallelism = bench_workers > 0 ? bench_workers : env_workers();
      const auto records = run_grid(instances, split_list(bench_agents), go);
      fs::create_directories(fs::path(bench_out) / "schedules");
      write_file((fs::path(bench_out) / "records.json").string(), records_to_json(records));
      bool all_valid = true;
      for (const auto& r : records) {
        all_valid = all_valid && r.valid;
        std::cerr << r.instance << " " << r.agent << " seed " << r.seed << " makespan " << r.makespan << " episodes "
                  << r.episodes << (r.valid ? "" : "  INVALID: " + r.error) << "\n";
        if (!r.valid) continue;
        const auto inst_it = std::find_if(instances.begin(), instances.end(),
                                          [&](const Instance& i) { return i.name == r.instance; });
        auto agent_tag = r.agent;
        std::replace(agent_tag.begin(), agent_tag.end(), ':', '_');
        const auto file = r.instance + "__" + agent_tag + "__" + std::to_string(r.seed) + ".json";
        write_file((fs::path(bench_out) / "schedules" / file).string(), export_json(*inst_it, r.schedule));
      }
      if (!records.empty()) {
        const auto rep_out = report(records, embedded_bounds());
        write_file((fs::path(bench_out) / "report.md").string(), rep_out.markdown);
        write_file((fs::path(bench_out) / "report.csv").string(), rep_out.csv);
        write_file((fs::path(bench_out) / "report.json").string(), rep_out.json);
      }
      return all_valid ? 0 : 2;
    }
    if (*rep) {
      const auto records = records_from_json(read_file((fs::path(report_dir) / "records.json").string()));
      if (records.empty()) {
        std::cerr << "no records\n";
        return 0;
      }
      std::vector<BoundsEntry> bounds;
      if (report_bounds == "builtin") {
        bounds = embedded_bounds();
      } else if (report_bounds != "none") {
        throw Error("--bounds must be builtin or none");
      }
      const auto out = report(records, bounds);
      const auto dir = report_out.empty() ? report_dir : report_out;
      fs::create_directories(dir);
      write_file((fs::path(dir) / "report.md").string(), out.markdown);
      write_file((fs::path(dir) / "report.csv").string(), out.csv);
      write_file((fs::path(dir) / "report.json").string(), out.json);
      std::cout << out.markdown;
      const bool all_valid = std::all_of(records.begin(), records.end(), [](const RunRecord& r) { return r.valid; });
      return all_valid ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
