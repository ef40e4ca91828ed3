#include <gtest/gtest.h>

#include "jss/bench.hpp"
#include "test_support.hpp"

namespace jss {
namespace {

using testing::data_path;

TEST(Bounds, EmbeddedTableLookups) {
  const auto& table = embedded_bounds();
  EXPECT_EQ(table.size(), 15u);
  const auto ta41 = lookup_bounds(table, "ta41");
  ASSERT_TRUE(ta41);
  EXPECT_EQ(ta41->upper_bound, 2005);
  EXPECT_EQ(ta41->dataset, "Taillard");
  const auto dmu16 = lookup_bounds(table, "dmu16");
  ASSERT_TRUE(dmu16);
  EXPECT_EQ(dmu16->fifo_paper, 4934);
  EXPECT_FALSE(lookup_bounds(table, "ft10"));
}

TEST(Bounds, AveragesAgreeWithRows) {
  for (const auto& avg : embedded_averages()) {
    double fifo = 0, mwkr = 0, ub = 0;
    int n = 0;
    for (const auto& row : embedded_bounds()) {
      if (row.dataset != avg.dataset) continue;
      fifo += static_cast<double>(*row.fifo_paper);
      mwkr += static_cast<double>(*row.mwkr_paper);
      ub += static_cast<double>(row.upper_bound);
      ++n;
    }
    ASSERT_EQ(n, 5 + 5 * (avg.dataset == "Taillard"));
    // Published averages are rounded to integers.
    EXPECT_NEAR(fifo / n, avg.fifo, 0.5 + 1e-9) << avg.dataset;
    EXPECT_NEAR(mwkr / n, avg.mwkr, 0.5 + 1e-9) << avg.dataset;
    EXPECT_NEAR(ub / n, avg.upper_bound, 0.5 + 1e-9) << avg.dataset;
  }
}

TEST(Bounds, DatasetNames) {
  EXPECT_EQ(dataset_of("ta47"), "Taillard");
  EXPECT_EQ(dataset_of("dmu20"), "Demirkol");
  EXPECT_EQ(dataset_of("mine"), "Other");
}

GridOptions quick_options() {
  GridOptions opt;
  opt.budget_seconds = 0.2;
  opt.seeds = {0, 1};
  return opt;
}

TEST(RunGrid, DeterministicAgentsRunOnce) {
  const auto ta41 = load_instance(data_path("ta41"));
  const auto records = run_grid({ta41}, {"fifo", "mwkr"}, quick_options());
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].agent, "fifo");
  EXPECT_EQ(records[0].makespan, 2543);
  EXPECT_EQ(records[1].agent, "mwkr");
  for (const auto& r : records) {
    EXPECT_TRUE(r.valid);
    EXPECT_EQ(r.episodes, 1u);
    EXPECT_EQ(r.lower_bound, aggregates(ta41).trivial_lower_bound);
  }
}

TEST(RunGrid, StochasticAgentsRunPerSeed) {
  const auto inst = generate_random(5, 4, {1, 20}, 2);
  auto opt = quick_options();
  opt.budget_seconds = 0.05;
  const auto records = run_grid({inst}, {"random"}, opt);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].seed, 0u);
  EXPECT_EQ(records[1].seed, 1u);
  EXPECT_TRUE(records[0].valid && records[1].valid);
}

TEST(RunGrid, EmptyAgentListAndBadSpec) {
  const auto inst = generate_random(3, 3, {1, 9}, 1);
  EXPECT_TRUE(run_grid({inst}, {}, quick_options()).empty());
  EXPECT_THROW(run_grid({inst}, {"nonsense"}, quick_options()), Error);
}

TEST(RunGrid, ParallelMatchesSerialForDeterministicAgents) {
  std::vector<Instance> instances;
  for (const char* name : {"ta42", "ta43", "dmu17"}) instances.push_back(load_instance(data_path(name)));
  auto serial = quick_options();
  auto parallel = serial;
  parallel.parallelism = 4;
  const auto a = run_grid(instances, {"fifo", "mwkr"}, serial);
  const auto b = run_grid(instances, {"fifo", "mwkr"}, parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].instance, b[i].instance);
    EXPECT_EQ(a[i].agent, b[i].agent);
    EXPECT_EQ(a[i].makespan, b[i].makespan);
    EXPECT_EQ(a[i].schedule, b[i].schedule);
  }
}

std::vector<RunRecord> fake_records() {
  std::vector<RunRecord> out;
  auto add = [&](std::string inst, std::string agent, std::uint64_t seed, Time ms) {
    RunRecord r;
    r.instance = std::move(inst);
    r.agent = std::move(agent);
    r.seed = seed;
    r.makespan = ms;
    r.valid = true;
    out.push_back(r);
  };
  add("ta41", "fifo", 0, 2543);
  add("ta42", "fifo", 0, 2535);
  add("dmu16", "fifo", 0, 4711);
  add("ta41", "softmax:a4:0.05", 0, 2400);
  add("ta41", "softmax:a4:0.05", 1, 2390);
  return out;
}

TEST(Report, DeterministicWithAverageRows) {
  const auto records = fake_records();
  const auto a = report(records, embedded_bounds());
  const auto b = report(records, embedded_bounds());
  EXPECT_EQ(a.markdown, b.markdown);
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.json, b.json);
  EXPECT_NE(a.markdown.find("| Taillard | **Average** | 2539"), std::string::npos) << a.markdown;
  EXPECT_NE(a.markdown.find("| Demirkol | **Average** |"), std::string::npos);
  EXPECT_NE(a.markdown.find(" 2390 "), std::string::npos);  // best over seeds
  EXPECT_EQ(a.csv.rfind("schema,instance,", 0), 0u);
  EXPECT_NE(a.csv.find(std::string("\n") + kCsvSchema + ",ta41,"), std::string::npos);
}

TEST(Report, EmptyRecordsThrow) { EXPECT_THROW(report({}, embedded_bounds()), Error); }

TEST(Records, JsonRoundTrip) {
  auto records = fake_records();
  records[0].error = "none";
  records[1].valid = false;
  const auto back = records_from_json(records_to_json(records));
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].instance, records[i].instance);
    EXPECT_EQ(back[i].agent, records[i].agent);
    EXPECT_EQ(back[i].seed, records[i].seed);
    EXPECT_EQ(back[i].makespan, records[i].makespan);
    EXPECT_EQ(back[i].valid, records[i].valid);
    EXPECT_EQ(back[i].error, records[i].error);
  }
  EXPECT_THROW(records_from_json("{"), Error);
}

}  // namespace
}  // namespace jss
