#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "disnets/artifacts.hpp"
#include "disnets/config.hpp"
#include "disnets/simulator.hpp"

namespace disnets {

/// Layout, links and timing for `cfg` (the layout and shadowing depend on cfg.seed).
World build_world(const SimConfig& cfg);

struct RunResult {
  World world;
  MetricsLog log;
  SummaryStats stats;
  std::string scheduler;
  std::unique_ptr<Scheduler> scheduler_state;
};

/// Builds everything from `cfg` and runs T_S. Throws ConfigInfeasible for impossible SPS setups.
RunResult run_simulation(const SimConfig& cfg);

Provenance provenance(const SimConfig& cfg);

/// Runs `cfg` and writes its artifacts into `out_dir`:
///   config.json, layout.json, packets.csv, sus.csv, training.csv, channel_usage.csv,
///   summary.json and agents/ue_<n>.json for learning schedulers.
RunResult simulate_to_dir(const SimConfig& cfg, const std::filesystem::path& out_dir);

enum class SweepAxis { NumUes, TMin, AperiodicFraction, Scheduler };
SweepAxis parse_sweep_axis(const std::string& text);
std::string sweep_axis_name(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::NumUes;
  std::vector<std::string> values;
  /// Ignored when the axis is the scheduler itself.
  std::vector<std::string> schedulers;
  std::vector<std::uint64_t> seeds;
  int workers = 1;
};

struct SweepRow {
  std::string value;
  std::string scheduler;
  std::uint64_t seed = 0;
  double mean_latency_s = 0.0;
  double latency_std_s = 0.0;
  double reliability = 0.0;
  double collision_rate = 0.0;
  std::int64_t generated_packets = 0;
  std::int64_t delivered_packets = 0;
};

/// Applies one axis value to a copy of `base`.
SimConfig apply_axis(const SimConfig& base, SweepAxis axis, const std::string& value);

/// One row per (value, scheduler, seed), in that nesting order.
std::vector<SweepRow> run_sweep(const SimConfig& base, const SweepSpec& spec);
std::string sweep_csv(const std::vector<SweepRow>& rows, SweepAxis axis, const Provenance& prov);
/// mean and sample std across seeds per (value, scheduler).
std::string sweep_aggregate_csv(const std::vector<SweepRow>& rows, SweepAxis axis, const Provenance& prov);

struct KStarPoint {
  int k_star = 0;
  double mean_latency_s = 0.0;
  double std_latency_s = 0.0;
};

struct KStarResult {
  int best = 0;
  std::vector<KStarPoint> table;
};

/// Exhaustive search over RandomK candidates; argmin of the seed-averaged censored mean latency
/// (undelivered packets count with their age at the horizon), ties to the smaller K*.
KStarResult optimize_kstar(const SimConfig& base, const std::vector<int>& candidates,
                           const std::vector<std::uint64_t>& seeds, int workers = 1);
std::string kstar_csv(const KStarResult& result, const Provenance& prov);

/// FCI / DCI_m / DCI_M sizes over the (K, N_a) grid at fixed N; float and ceiled columns.
std::string overhead_csv(const std::vector<int>& channels, int num_ues, const std::vector<int>& active_ues,
                         FciSizeVariant variant);

/// Runs `jobs` tasks on `workers` threads; the first exception is rethrown after all finish.
void parallel_for(std::size_t jobs, int workers, const std::function<void(std::size_t)>& task);

}  // namespace disnets
