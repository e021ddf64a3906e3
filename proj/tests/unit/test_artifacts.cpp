#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "disnets/experiments.hpp"

using namespace disnets;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SimConfig quick(const std::string& scheduler) {
  auto cfg = desk_defaults();
  cfg.scenario.num_ues = 8;
  cfg.timing.sim_time_s = 0.2;
  cfg.scheduler.kind = scheduler;
  return cfg;
}
}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(NAN) == "");
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("simulate writes consistent, provenance-stamped artifacts") {
  const fs::path dir = fs::temp_directory_path() / "disnets_artifacts_test";
  fs::remove_all(dir);
  const auto cfg = quick("disnets");
  const auto r = simulate_to_dir(cfg, dir);
  const std::string header = provenance(cfg).header_line();
  for (const char* f : {"packets.csv", "sus.csv", "training.csv", "channel_usage.csv"}) {
    CAPTURE(f);
    const auto text = slurp(dir / f);
    CHECK(text.rfind(header + "\n", 0) == 0);
  }
  for (const char* f : {"config.json", "layout.json", "summary.json", "agents/ue_0.json"}) {
    CAPTURE(f);
    CHECK(fs::exists(dir / f));
  }

  // The mean latency recomputed from the packet CSV matches the summary.
  const auto rows = read_csv_rows(dir / "packets.csv");
  CHECK(static_cast<std::int64_t>(rows.size()) == r.stats.generated_packets);
  double sum = 0;
  long delivered = 0;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 16);
    if (row[4] == "1") {
      sum += std::stod(row[15]);
      ++delivered;
    } else {
      CHECK(row[15].empty());
    }
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  REQUIRE(delivered > 0);
  CHECK(std::abs(sum / delivered - summary["mean_latency_s"].get<double>()) <=
        1e-12 * summary["mean_latency_s"].get<double>());
  CHECK(summary["config_hash"] == config_hash(cfg));

  // The stored config reproduces the run.
  const auto again = load_config(dir / "config.json");
  CHECK(config_hash(again) == config_hash(cfg));
  CHECK(again.seed == cfg.seed);
  fs::remove_all(dir);
}

TEST_CASE("sweeps and K* search") {
  auto base = quick("gbs");
  SweepSpec spec;
  spec.axis = SweepAxis::NumUes;
  spec.values = {"4", "6", "8"};
  spec.schedulers = {"gbs", "randomk:2"};
  spec.seeds = {1, 2, 3};
  spec.workers = 2;
  const auto rows = run_sweep(base, spec);
  CHECK(rows.size() == 18);
  CHECK(rows[0].value == "4");
  CHECK(rows[0].scheduler == "gbs");
  CHECK(rows[1].seed == 2);

  spec.axis = SweepAxis::Scheduler;
  spec.values = {"disnets", "nlts", "randomk:2", "gbs", "sps"};
  spec.seeds = {1};
  base.timing.sim_time_s = 0.05;
  CHECK(run_sweep(base, spec).size() == 5);
  CHECK_THROWS(parse_sweep_axis("bandwidth"));
  CHECK(apply_axis(base, SweepAxis::TMin, "3").traffic.t_min_ms == 3.0);
  CHECK(apply_axis(base, SweepAxis::AperiodicFraction, "0.25").traffic.model == "mixed");

  const auto one = optimize_kstar(base, {3}, {1, 2});
  CHECK(one.best == 3);
  const auto many = optimize_kstar(base, {1, 2, 3, 4}, {1, 2}, 2);
  REQUIRE(many.table.size() == 4);
  double best = INFINITY;
  for (const auto& p : many.table) best = std::min(best, p.mean_latency_s);
  for (const auto& p : many.table)
    if (p.k_star == many.best) CHECK(p.mean_latency_s == best);
}

TEST_CASE("overhead table") {
  const auto csv = overhead_csv({10, 100}, 500, {20, 60}, FciSizeVariant::NPlus3);
  CHECK(csv.find("100,500,60,897.44") != std::string::npos);
  CHECK_THROWS_AS(overhead_csv({}, 500, {20}, FciSizeVariant::NPlus3), ConfigError);
  CHECK_THROWS_AS(overhead_csv({10}, 500, {}, FciSizeVariant::NPlus3), ConfigError);
}

TEST_CASE("parallel_for forwards the first failure") {
  std::atomic<int> done{0};
  CHECK_THROWS_WITH(parallel_for(8, 3,
                                 [&](std::size_t i) {
                                   ++done;
                                   if (i == 5) throw std::runtime_error("boom");
                                 }),
                    "boom");
  CHECK(done == 8);
}
