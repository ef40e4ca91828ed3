// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure. `acceptance --budget S` shortens the search criterion for local
// runs; ctest uses the default. The same lines are written to
// acceptance_report.txt next to the binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "jss/agents.hpp"
#include "jss/oracles.hpp"
#include "jss/random.hpp"
#include "jss/schedule.hpp"
#include "test_support.hpp"

namespace {

using namespace jss;
using jss::testing::benchmark_names;
using jss::testing::data_path;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Every schedule any criterion produces goes through here; criterion 2
// reports the tally.
struct ValidityLedger {
  int checked = 0;
  int invalid = 0;
  void check(const Instance& inst, const Schedule& s) {
    ++checked;
    if (!validate_schedule(inst, s).valid) ++invalid;
  }
} g_validity;

Time raw_reward_of(const Instance& inst, Agent& agent) {
  const auto r = rollout(inst, agent);
  g_validity.check(inst, r.schedule);
  const Time expected = 2 * aggregates(inst).total_duration - inst.machine_count * r.makespan;
  return r.raw_reward - expected;
}

Verdict reward_identity() {
  const auto t0 = Clock::now();
  int cases = 0, broken = 0;
  auto fifo = make_fifo_agent();
  auto mwkr = make_mwkr_agent();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int jobs = 2 + static_cast<int>(seed % 5);
    const int machines = 2 + static_cast<int>((seed / 5) % 5);
    const auto inst = generate_random(jobs, machines, {1, 99}, 10'000 + seed);
    RandomAgent random(seed);
    for (Agent* a : {fifo.get(), mwkr.get(), static_cast<Agent*>(&random)}) {
      ++cases;
      broken += raw_reward_of(inst, *a) != 0;
    }
  }
  const auto ta41 = load_instance(data_path("ta41"));
  for (Agent* a : {fifo.get(), mwkr.get()}) {
    ++cases;
    broken += raw_reward_of(ta41, *a) != 0;
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomAgent random(seed);
    ++cases;
    broken += raw_reward_of(ta41, random) != 0;
  }
  const double t = seconds_since(t0);
  std::ostringstream d;
  d << cases - broken << "/" << cases << " episodes exact, " << t << " s (limit 10 s)";
  return {broken == 0 && t < 10.0, d.str()};
}

// Injects one violation into a valid schedule: either an operation starts
// before its predecessor ends, or it starts on top of another job's
// operation on the same machine.
Schedule inject_violation(const Instance& inst, const Schedule& base, Rng& rng, bool precedence) {
  Schedule s = base;
  const int J = inst.job_count, M = inst.machine_count;
  if (precedence) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(J)));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(M - 1)));
    const Time prev_end = s.starts(j, k - 1) + inst.op(j, k - 1).duration;
    s.starts(j, k) = prev_end - 1 - static_cast<Time>(rng.below(static_cast<std::uint64_t>(inst.op(j, k - 1).duration)));
  } else {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(J)));
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(M)));
    int other = static_cast<int>(rng.below(static_cast<std::uint64_t>(J - 1)));
    if (other >= j) ++other;
    int pos = 0;
    while (inst.op(other, pos).machine != inst.op(j, k).machine) ++pos;
    s.starts(j, k) = s.starts(other, pos);
  }
  return s;
}

Verdict schedule_validity() {
  Rng rng(77);
  int detected = 0;
  const int total = 100;
  std::vector<Instance> pool;
  for (const char* name : {"ta41", "dmu18"}) pool.push_back(load_instance(data_path(name)));
  for (std::uint64_t s = 0; s < 8; ++s) pool.push_back(generate_random(6, 5, {1, 99}, 20'000 + s));
  for (int i = 0; i < total; ++i) {
    const auto& inst = pool[static_cast<std::size_t>(i) % pool.size()];
    auto agent = make_agent(i % 3 == 0 ? "fifo" : i % 3 == 1 ? "mwkr" : "random", static_cast<std::uint64_t>(i));
    const auto base = rollout(inst, *agent).schedule;
    g_validity.check(inst, base);
    const auto bad = inject_violation(inst, base, rng, i % 2 == 0);
    detected += !validate_schedule(inst, bad).valid;
  }
  std::ostringstream d;
  d << g_validity.checked - g_validity.invalid << "/" << g_validity.checked << " produced schedules valid, " << detected
    << "/" << total << " injected violations detected";
  return {g_validity.invalid == 0 && detected == total, d.str()};
}

Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  int cases = 0, differ = 0;
  std::ostringstream findings;
  auto run = [&](int jobs, int count, std::uint64_t base) {
    for (int i = 0; i < count; ++i) {
      const auto inst = generate_random(jobs, 3, {1, 99}, base + static_cast<std::uint64_t>(i));
      const Time opt = brute_force_optimal(inst);
      const Time env = env_tree_best(inst);
      ++cases;
      if (env != opt) {
        ++differ;
        findings << " [" << jobs << "x3 seed " << base + static_cast<std::uint64_t>(i) << ": env " << env << " vs opt "
                 << opt << "]";
      }
    }
  };
  run(3, 50, 1000);
  run(4, 25, 2000);
  const double t = seconds_since(t0);
  std::ostringstream d;
  d << cases - differ << "/" << cases << " equal, " << t << " s (limit 300 s)" << findings.str();
  return {differ * 10 <= cases && t < 300.0, d.str()};
}

Verdict baseline_reproduction() {
  const auto t0 = Clock::now();
  // Published FIFO / MWKR makespans per instance.
  const std::map<std::string, std::pair<Time, Time>> published = {
      {"ta41", {2543, 2632}},  {"ta42", {2578, 2401}},  {"ta43", {2506, 2385}},  {"ta44", {2555, 2532}},
      {"ta45", {2565, 2431}},  {"ta46", {2617, 2485}},  {"ta47", {2508, 2301}},  {"ta48", {2541, 2350}},
      {"ta49", {2550, 2474}},  {"ta50", {2531, 2496}},  {"dmu16", {4934, 4550}}, {"dmu17", {5014, 4874}},
      {"dmu18", {4936, 4792}}, {"dmu19", {4902, 4842}}, {"dmu20", {4539, 4500}}};
  bool ok = true;
  double worst = 0.0;
  std::string worst_at;
  std::map<std::string, std::pair<double, double>> sums;
  for (const auto& name : benchmark_names()) {
    const auto inst = load_instance(data_path(name));
    auto fifo = make_fifo_agent();
    auto mwkr = make_mwkr_agent();
    const auto rf = rollout(inst, *fifo);
    const auto rm = rollout(inst, *mwkr);
    g_validity.check(inst, rf.schedule);
    g_validity.check(inst, rm.schedule);
    const auto [pf, pm] = published.at(name);
    for (auto [got, want, rule] : {std::tuple{rf.makespan, pf, "FIFO"}, std::tuple{rm.makespan, pm, "MWKR"}}) {
      const double dev = std::abs(double(got - want)) / double(want);
      if (dev > worst) {
        worst = dev;
        worst_at = name + " " + rule;
      }
      ok = ok && dev <= 0.05;
    }
    auto& s = sums[name.rfind("ta", 0) == 0 ? "Taillard" : "Demirkol"];
    s.first += double(rf.makespan) / 5.0 / (name.rfind("ta", 0) == 0 ? 2.0 : 1.0);
    s.second += double(rm.makespan) / 5.0 / (name.rfind("ta", 0) == 0 ? 2.0 : 1.0);
  }
  const std::map<std::string, std::pair<double, double>> published_avg = {{"Taillard", {2549, 2449}},
                                                                          {"Demirkol", {4865, 4712}}};
  std::ostringstream d;
  d.precision(1);
  d << std::fixed << "worst per-instance deviation " << 100 * worst << "% (" << worst_at << ", limit 5%)";
  for (const auto& [ds, avg] : sums) {
    const auto [wf, wm] = published_avg.at(ds);
    const double df = std::abs(avg.first - wf) / wf, dm = std::abs(avg.second - wm) / wm;
    ok = ok && df <= 0.03 && dm <= 0.03;
    d << "; " << ds << " avg FIFO " << avg.first << " (" << 100 * df << "%) MWKR " << avg.second << " (" << 100 * dm
      << "%)";
  }
  const double ta_mwkr = sums["Taillard"].second;
  ok = ok && ta_mwkr < 3000.0;
  const double t = seconds_since(t0);
  ok = ok && t < 60.0;
  d << "; Taillard MWKR avg < 3000; " << t << " s";
  return {ok, d.str()};
}

Verdict search_dominance(double budget) {
  int strictly = 0, dominated = 0, reruns = 0;
  std::ostringstream per;
  for (int i = 0; i < 10; ++i) {
    const auto name = benchmark_names()[static_cast<std::size_t>(i)];
    const auto inst = load_instance(data_path(name));
    auto mwkr = make_mwkr_agent();
    const Time greedy = rollout(inst, *mwkr).makespan;
    PrioritySoftmaxAgent agent(kWorkRemaining, 0.05, 0);
    SearchOptions opt;
    opt.budget_seconds = budget;
    opt.seed = static_cast<std::uint64_t>(i);
    auto r = best_of_search(inst, agent, opt);
    if (r.best_makespan == greedy) {
      // A fresh seed is allowed once when the search failed to improve.
      ++reruns;
      opt.seed += 1000;
      r = best_of_search(inst, agent, opt);
    }
    g_validity.check(inst, r.best_schedule);
    dominated += r.best_makespan <= greedy;
    strictly += r.best_makespan < greedy;
    per << " " << name << " " << r.best_makespan << "<=" << greedy;
  }
  std::ostringstream d;
  d << "budget " << budget << " s, softmax:a4:0.05; " << dominated << "/10 <= MWKR, " << strictly
    << "/10 strictly better (need 8), reruns " << reruns << ";" << per.str();
  return {dominated == 10 && strictly >= 8, d.str()};
}

Verdict throughput() {
  const auto inst = load_instance(data_path("ta41"));
  const auto model = std::make_shared<const EnvModel>(inst, EnvConfig{});
  auto fifo = make_fifo_agent();
  std::vector<double> ms;
  for (int i = 0; i < 51; ++i) {
    const auto t0 = Clock::now();
    const auto r = rollout(model, *fifo);
    ms.push_back(1000.0 * seconds_since(t0));
    if (r.steps < 600) return {false, "episode had fewer than 600 allocations"};
  }
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2];

  PrioritySoftmaxAgent agent(kWorkRemaining, 0.05, 5);
  SearchOptions opt;
  opt.budget_seconds = 5.0;
  const auto r = best_of_search(inst, agent, opt);
  g_validity.check(inst, r.best_schedule);
  const double per_minute = 60.0 * double(r.episodes) / r.wall_time;
  std::ostringstream d;
  d.precision(2);
  d << std::fixed << "FIFO ta41 episode median " << median << " ms (limit 10 ms); search " << per_minute
    << " episodes/min (need 1000)";
  return {median <= 10.0 && per_minute >= 1000.0, d.str()};
}

struct DumpCase {
  std::string instance;
  std::string agent;
  std::uint64_t seed;
};

const std::vector<DumpCase>& dump_cases() {
  static const std::vector<DumpCase> cases = {{"ta41", "fifo", 0},
                                              {"ta41", "softmax:a4:0.05", 7},
                                              {"dmu16", "mwkr", 0},
                                              {"dmu16", "random", 3},
                                              {"random:6x5", "softmax:a6:0.5", 11}};
  return cases;
}

std::string trajectory_dump(const DumpCase& c) {
  const auto inst = c.instance == "random:6x5" ? generate_random(6, 5, {1, 99}, 42) : load_instance(data_path(c.instance));
  auto agent = make_agent(c.agent, c.seed);
  TrajectoryRecorder rec(true);
  rollout(std::make_shared<const EnvModel>(inst, EnvConfig{}), *agent, &rec);
  return rec.text();
}

std::string run_child(int index) {
  const auto self = std::filesystem::read_symlink("/proc/self/exe").string();
  const std::string cmd = "'" + self + "' --dump " + std::to_string(index);
  std::string out;
  if (FILE* pipe = popen(cmd.c_str(), "r")) {
    char buf[1 << 16];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    if (pclose(pipe) != 0) out = "<child failed>";
  }
  return out;
}

Verdict determinism() {
  int stable = 0;
  std::size_t bytes = 0;
  const auto& cases = dump_cases();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto reference = trajectory_dump(cases[i]);
    bool same = !reference.empty();
    for (int run = 1; run < 5; ++run) same = same && trajectory_dump(cases[i]) == reference;
    for (int restart = 0; restart < 2; ++restart) same = same && run_child(static_cast<int>(i)) == reference;
    stable += same;
    bytes += reference.size();
  }
  std::ostringstream d;
  d << stable << "/" << cases.size() << " (instance, agent, seed) dumps byte-identical over 5 runs and 2 process restarts ("
    << bytes << " bytes)";
  return {stable == static_cast<int>(cases.size()), d.str()};
}

// Recomputes aggregates straight from the file tokens, without parse_instance.
struct RawAggregates {
  Time total = 0, max_op = 0, max_job = 0, max_machine = 0;
};

RawAggregates raw_aggregates(const std::string& text) {
  std::istringstream in(text);
  int jobs = 0, machines = 0;
  in >> jobs >> machines;
  RawAggregates a;
  std::vector<Time> per_machine(static_cast<std::size_t>(machines), 0);
  for (int j = 0; j < jobs; ++j) {
    Time job = 0;
    for (int k = 0; k < machines; ++k) {
      int m;
      Time p;
      in >> m >> p;
      job += p;
      per_machine[static_cast<std::size_t>(m)] += p;
      a.max_op = std::max(a.max_op, p);
    }
    a.total += job;
    a.max_job = std::max(a.max_job, job);
  }
  a.max_machine = *std::max_element(per_machine.begin(), per_machine.end());
  return a;
}

Verdict parser_golden() {
  int ok = 0;
  std::string failed;
  for (const auto& name : benchmark_names()) {
    const auto text = jss::testing::read_text(data_path(name));
    bool good = false;
    try {
      const auto inst = parse_instance(text);
      const auto stats = aggregates(inst);
      const auto raw = raw_aggregates(text);
      good = validate(inst).ok() && parse_instance(serialize_instance(inst)) == inst &&
             stats.total_duration == raw.total && stats.total_duration == jss::testing::raw_duration_sum(text) &&
             stats.max_op_duration == raw.max_op && stats.max_job_total == raw.max_job &&
             stats.trivial_lower_bound == std::max(raw.max_job, raw.max_machine);
    } catch (const std::exception& e) {
      failed += " " + name + ": " + e.what();
    }
    if (good) {
      ++ok;
    } else if (failed.find(name) == std::string::npos) {
      failed += " " + name;
    }
  }
  std::ostringstream d;
  d << ok << "/15 files parse, validate, round-trip and match raw aggregates" << failed;
  return {ok == 15, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  double budget = 60.0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--dump" && i + 1 < argc) {
      std::cout << trajectory_dump(dump_cases().at(std::stoul(argv[i + 1])));
      return 0;
    }
    if (arg == "--budget" && i + 1 < argc) budget = std::stod(argv[++i]);
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 reward identity", reward_identity},
      {"8 parser golden", parser_golden},
      {"3 oracle equivalence", oracle_equivalence},
      {"4 baseline reproduction", baseline_reproduction},
      {"6 throughput", throughput},
      {"7 determinism", determinism},
      {"5 search dominance", [budget] { return search_dominance(budget); }},
      // Last, so it covers schedules produced by every other criterion.
      {"2 schedule validity", schedule_validity},
  };
  std::ofstream report(std::filesystem::read_symlink("/proc/self/exe").parent_path() / "acceptance_report.txt");
  auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    report << line << std::endl;
  };
  int failures = 0;
  for (const auto& [label, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    emit(std::string(v.pass ? "PASS" : "FAIL") + "  criterion " + label + ": " + v.detail);
  }
  emit(failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed");
  return failures == 0 ? 0 : 1;
}
