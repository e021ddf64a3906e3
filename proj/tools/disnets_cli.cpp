#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "disnets/config.hpp"
#include "disnets/experiments.hpp"

namespace fs = std::filesystem;
using namespace disnets;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

/// "1,2,5" or "start:stop[:step]" (inclusive).
std::vector<std::string> expand_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      const auto c1 = item.find(':');
      if (c1 == std::string::npos) {
        out.push_back(item);
      } else {
        const auto c2 = item.find(':', c1 + 1);
        const long a = std::stol(item.substr(0, c1));
        const long b = std::stol(item.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
        const long step = c2 == std::string::npos ? 1 : std::stol(item.substr(c2 + 1));
        if (step <= 0) throw ConfigError("range", "step must be positive in '" + item + "'");
        for (long v = a; v <= b; v += step) out.push_back(std::to_string(v));
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <class T>
std::vector<T> expand_numbers(const std::string& text, const std::string& field) {
  std::vector<T> out;
  try {
    for (const auto& s : expand_list(text)) {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, std::uint64_t>) {
        out.push_back(std::stoull(s, &used));
      } else {
        out.push_back(static_cast<T>(std::stol(s, &used)));
      }
      if (used != s.size()) throw std::invalid_argument(s);
    }
  } catch (const std::logic_error&) {
    throw ConfigError(field, "cannot parse '" + text + "'");
  }
  return out;
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string scheduler;
  bool no_shadowing = false;
  std::string fci_variant;
  std::optional<double> sim_time_s;
  int workers = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON config file (desk defaults when omitted)")->envname("DISNETS_CONFIG");
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)")->envname("DISNETS_SEED");
  cmd->add_option("--scheduler", c.scheduler, "disnets|nlts|randomk[:K*]|gbs|sps")->envname("DISNETS_SCHEDULER");
  cmd->add_flag("--no-shadowing", c.no_shadowing, "disable log-normal shadowing")->envname("DISNETS_NO_SHADOWING");
  cmd->add_option("--fci-size-variant", c.fci_variant, "n+3|n+2")->envname("DISNETS_FCI_SIZE_VARIANT");
  cmd->add_option("--sim-time-s", c.sim_time_s, "simulated time T_S in seconds")->envname("DISNETS_SIM_TIME_S");
  cmd->add_option("--workers", c.workers, "worker threads")->envname("DISNETS_WORKERS")->check(CLI::PositiveNumber);
}

SimConfig load(const Common& c) {
  SimConfig cfg = c.config_path.empty() ? desk_defaults() : load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.scheduler.empty()) cfg.scheduler.kind = c.scheduler;
  if (c.no_shadowing) cfg.radio.shadowing = false;
  if (!c.fci_variant.empty()) cfg.metrics.fci_size_variant = c.fci_variant;
  if (c.sim_time_s) cfg.timing.sim_time_s = *c.sim_time_s;
  cfg.validate();
  return cfg;
}

void print_summary(const RunResult& r) {
  std::printf("scheduler=%s packets=%lld delivered=%lld mean_latency_ms=%.4f reliability=%.4f collision_rate=%.4f\n",
              r.scheduler.c_str(), static_cast<long long>(r.stats.generated_packets),
              static_cast<long long>(r.stats.delivered_packets), r.stats.mean_latency_s * 1e3, r.stats.reliability,
              r.stats.collision_rate);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DISNETS uplink scheduling simulator"};
  app.require_subcommand(1);

  Common common;
  std::string out_dir = "out";

  auto* simulate = app.add_subcommand("simulate", "run one seeded simulation and write its artifacts");
  add_common(simulate, common);
  simulate->add_option("--out", out_dir, "output directory")->envname("DISNETS_OUT");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep over one axis");
  add_common(sweep, common);
  std::string axis = "num_ues", values, schedulers, seeds = "1,2,3";
  sweep->add_option("--out", out_dir, "output directory")->envname("DISNETS_OUT");
  sweep->add_option("--axis", axis, "num_ues|t_min|aperiodic_fraction|scheduler");
  sweep->add_option("--values", values, "comma list or start:stop[:step]; t_min in ms")->required();
  sweep->add_option("--schedulers", schedulers, "comma list of schedulers (default: the config's)");
  sweep->add_option("--seeds", seeds, "comma list or range of seeds");

  auto* kstar = app.add_subcommand("kstar", "exhaustive search of the RandomK channel count");
  add_common(kstar, common);
  std::string candidates;
  kstar->add_option("--out", out_dir, "output directory")->envname("DISNETS_OUT");
  kstar->add_option("--candidates", candidates, "K* candidates (default 1:K)");
  kstar->add_option("--seeds", seeds, "comma list or range of seeds");

  auto* overhead_cmd = app.add_subcommand("overhead", "FCI/DCI size table");
  std::string k_range = "10:100:10", na_range = "20,40,60", variant = "n+3", out_file;
  int n_ues = 500;
  overhead_cmd->add_option("--k", k_range, "channel counts");
  overhead_cmd->add_option("--n", n_ues, "number of UEs");
  overhead_cmd->add_option("--n-active", na_range, "active UE counts");
  overhead_cmd->add_option("--fci-size-variant", variant, "n+3|n+2")->envname("DISNETS_FCI_SIZE_VARIANT");
  overhead_cmd->add_option("--out", out_file, "CSV path (stdout when omitted)");

  auto* defaults = app.add_subcommand("defaults", "print a complete default config");
  bool paper = false;
  defaults->add_flag("--paper", paper, "full scale (84 channels, 7 s)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const SimConfig cfg = load(common);
      const auto r = simulate_to_dir(cfg, out_dir);
      print_summary(r);
    } else if (*sweep) {
      const SimConfig cfg = load(common);
      SweepSpec spec;
      spec.axis = parse_sweep_axis(axis);
      spec.values = expand_list(values);
      if (spec.values.empty()) throw ConfigError("values", "empty value list");
      spec.schedulers = expand_list(schedulers);
      spec.seeds = expand_numbers<std::uint64_t>(seeds, "seeds");
      spec.workers = common.workers;
      const auto rows = run_sweep(cfg, spec);
      const auto prov = provenance(cfg);
      write_file_atomic(fs::path(out_dir) / "sweep.csv", sweep_csv(rows, spec.axis, prov));
      write_file_atomic(fs::path(out_dir) / "sweep_aggregate.csv", sweep_aggregate_csv(rows, spec.axis, prov));
      std::printf("%zu runs written to %s\n", rows.size(), out_dir.c_str());
    } else if (*kstar) {
      const SimConfig cfg = load(common);
      const auto list = candidates.empty() ? expand_numbers<int>("1:" + std::to_string(cfg.num_channels()), "candidates")
                                           : expand_numbers<int>(candidates, "candidates");
      const auto result = optimize_kstar(cfg, list, expand_numbers<std::uint64_t>(seeds, "seeds"), common.workers);
      write_file_atomic(fs::path(out_dir) / "kstar.csv", kstar_csv(result, provenance(cfg)));
      std::printf("k_star=%d\n", result.best);
    } else if (*overhead_cmd) {
      const auto ks = expand_numbers<int>(k_range, "k");
      const auto nas = expand_numbers<int>(na_range, "n_active");
      if (ks.empty()) throw ConfigError("k", "empty K range");
      if (nas.empty()) throw ConfigError("n_active", "empty N_a range");
      if (n_ues < 1) throw ConfigError("n", "must be >= 1");
      for (int k : ks) {
        if (k < 1) throw ConfigError("k", "must be >= 1");
      }
      for (int na : nas) {
        if (na < 0) throw ConfigError("n_active", "must be >= 0");
      }
      const auto csv = overhead_csv(ks, n_ues, nas, parse_fci_variant(variant));
      if (out_file.empty()) {
        std::cout << csv;
      } else {
        write_file_atomic(out_file, csv);
      }
    } else if (*defaults) {
      std::cout << config_to_json(paper ? paper_defaults() : desk_defaults()).dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ConfigInfeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const PlacementInfeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
