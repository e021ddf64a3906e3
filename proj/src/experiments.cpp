#include "disnets/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace disnets {

World build_world(const SimConfig& cfg) {
  World w;
  auto layout_rng = make_stream(cfg.seed, Stream::Layout);
  w.layout = generate_layout(cfg.scenario_config(), layout_rng);
  w.links = compute_links(w.layout, cfg.radio_config(), cfg.seed);
  w.timing = cfg.timing_config();
  w.num_channels = cfg.num_channels();
  w.outage_reward = cfg.scheduler.outage_reward;
  w.history_rows = cfg.agent.history_rows;
  return w;
}

Provenance provenance(const SimConfig& cfg) { return {config_hash(cfg), cfg.seed}; }

RunResult run_simulation(const SimConfig& cfg) {
  cfg.validate();
  RunResult r;
  r.world = build_world(cfg);
  const auto traffic_cfg = cfg.traffic_config();
  const auto settings = cfg.scheduler_settings();
  r.scheduler_state = make_scheduler(settings, r.world.num_ues(), r.world.num_channels,
                                     traffic_cfg.nominal_interarrival_s(), r.world.timing.su_duration(), cfg.seed);
  r.scheduler = r.scheduler_state->name();
  ScheduledTraffic traffic(TrafficGenerator(r.world.layout, traffic_cfg, r.world.timing.sim_time_s, cfg.seed));
  r.log = run(r.world, traffic, *r.scheduler_state);
  r.stats = summarize(r.log, r.world.timing.latency_threshold_s);
  r.stats.reward_curve = reward_curve(r.log, cfg.metrics.reward_block);
  return r;
}

RunResult simulate_to_dir(const SimConfig& cfg, const std::filesystem::path& out_dir) {
  RunResult r = run_simulation(cfg);
  const Provenance prov = provenance(cfg);
  std::filesystem::create_directories(out_dir);
  write_file_atomic(out_dir / "config.json", config_to_json(cfg).dump(2) + "\n");
  write_file_atomic(out_dir / "layout.json", layout_json(r.world.layout, r.world.links, prov).dump(2) + "\n");
  write_file_atomic(out_dir / "packets.csv", packets_csv(r.log, prov));
  write_file_atomic(out_dir / "sus.csv", sus_csv(r.log, prov));
  write_file_atomic(out_dir / "training.csv", training_csv(r.log, prov));
  const auto cdf = channel_usage_cdf(r.log, cfg.metrics.channel_usage_window_packets, r.world.num_channels);
  write_file_atomic(out_dir / "channel_usage.csv", channel_usage_csv(cdf, prov));
  write_file_atomic(out_dir / "summary.json",
                    summary_json(r.log, r.stats, prov, r.scheduler, cfg.metrics.reward_block).dump(2) + "\n");
  if (cfg.metrics.write_checkpoints) {
    if (const auto* agents = dynamic_cast<const AgentScheduler*>(r.scheduler_state.get())) {
      for (std::size_t ue = 0; ue < agents->agents().size(); ++ue) {
        write_file_atomic(out_dir / "agents" / ("ue_" + std::to_string(ue) + ".json"),
                          agent_checkpoint(agents->agents()[ue], static_cast<int>(ue), prov).dump() + "\n");
      }
    }
  }
  return r;
}

void parallel_for(std::size_t jobs, int workers, const std::function<void(std::size_t)>& task) {
  const auto threads = static_cast<std::size_t>(std::max(1, std::min<int>(workers, static_cast<int>(jobs))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "num_ues") return SweepAxis::NumUes;
  if (text == "t_min") return SweepAxis::TMin;
  if (text == "aperiodic_fraction") return SweepAxis::AperiodicFraction;
  if (text == "scheduler") return SweepAxis::Scheduler;
  throw ConfigError("axis", "unknown sweep axis '" + text + "' (expected num_ues|t_min|aperiodic_fraction|scheduler)");
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::NumUes:
      return "num_ues";
    case SweepAxis::TMin:
      return "t_min_ms";
    case SweepAxis::AperiodicFraction:
      return "aperiodic_fraction";
    case SweepAxis::Scheduler:
      return "scheduler";
  }
  return "value";
}

SimConfig apply_axis(const SimConfig& base, SweepAxis axis, const std::string& value) {
  SimConfig c = base;
  try {
    switch (axis) {
      case SweepAxis::NumUes:
        c.scenario.num_ues = std::stoi(value);
        break;
      case SweepAxis::TMin:
        c.traffic.t_min_ms = std::stod(value);
        break;
      case SweepAxis::AperiodicFraction:
        c.traffic.model = "mixed";
        c.traffic.aperiodic_fraction = std::stod(value);
        break;
      case SweepAxis::Scheduler:
        c.scheduler.kind = value;
        break;
    }
  } catch (const std::logic_error&) {
    throw ConfigError("values", "cannot parse '" + value + "' for axis " + sweep_axis_name(axis));
  }
  c.validate();
  return c;
}

std::vector<SweepRow> run_sweep(const SimConfig& base, const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("values", "empty sweep");
  if (spec.seeds.empty()) throw ConfigError("seeds", "no seeds");
  struct Job {
    std::string value;
    std::string scheduler;
    SimConfig cfg;
  };
  std::vector<Job> jobs;
  const std::vector<std::string> schedulers =
      spec.axis == SweepAxis::Scheduler || spec.schedulers.empty() ? std::vector<std::string>{""} : spec.schedulers;
  for (const auto& v : spec.values) {
    for (const auto& s : schedulers) {
      for (auto seed : spec.seeds) {
        SimConfig c = apply_axis(base, spec.axis, v);
        if (!s.empty()) c.scheduler.kind = s;
        c.seed = seed;
        c.validate();
        jobs.push_back({v, c.scheduler_settings().kind.name(), c});
      }
    }
  }
  std::vector<SweepRow> rows(jobs.size());
  parallel_for(jobs.size(), spec.workers, [&](std::size_t i) {
    const auto r = run_simulation(jobs[i].cfg);
    auto& row = rows[i];
    row.value = jobs[i].value;
    row.scheduler = r.scheduler;
    row.seed = jobs[i].cfg.seed;
    row.mean_latency_s = r.stats.mean_latency_s;
    row.latency_std_s = r.stats.latency_std_s;
    row.reliability = r.stats.reliability;
    row.collision_rate = r.stats.collision_rate;
    row.generated_packets = r.stats.generated_packets;
    row.delivered_packets = r.stats.delivered_packets;
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, SweepAxis axis, const Provenance& prov) {
  std::ostringstream out;
  out << prov.header_line() << '\n';
  out << sweep_axis_name(axis)
      << ",scheduler,seed,mean_latency_s,latency_std_s,reliability,collision_rate,generated_packets,delivered_packets\n";
  for (const auto& r : rows) {
    out << r.value << ',' << r.scheduler << ',' << r.seed << ',' << format_double(r.mean_latency_s) << ','
        << format_double(r.latency_std_s) << ',' << format_double(r.reliability) << ','
        << format_double(r.collision_rate) << ',' << r.generated_packets << ',' << r.delivered_packets << '\n';
  }
  return out.str();
}

namespace {
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return {std::nan(""), std::nan("")};
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}
}  // namespace

std::string sweep_aggregate_csv(const std::vector<SweepRow>& rows, SweepAxis axis, const Provenance& prov) {
  // Keep first-appearance order of (value, scheduler).
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.value, r.scheduler);
    if (!groups.contains(key)) keys.push_back(key);
    groups[key].push_back(&r);
  }
  std::ostringstream out;
  out << prov.header_line() << '\n';
  out << sweep_axis_name(axis)
      << ",scheduler,seeds,mean_latency_s,mean_latency_std_s,reliability,reliability_std,collision_rate,"
         "collision_rate_std\n";
  for (const auto& key : keys) {
    std::vector<double> lat, rel, col;
    for (const auto* r : groups[key]) {
      if (std::isfinite(r->mean_latency_s)) lat.push_back(r->mean_latency_s);
      rel.push_back(r->reliability);
      col.push_back(r->collision_rate);
    }
    const auto l = mean_std(lat), e = mean_std(rel), c = mean_std(col);
    out << key.first << ',' << key.second << ',' << groups[key].size() << ',' << format_double(l.mean) << ','
        << format_double(l.std) << ',' << format_double(e.mean) << ',' << format_double(e.std) << ','
        << format_double(c.mean) << ',' << format_double(c.std) << '\n';
  }
  return out.str();
}

KStarResult optimize_kstar(const SimConfig& base, const std::vector<int>& candidates,
                           const std::vector<std::uint64_t>& seeds, int workers) {
  if (candidates.empty()) throw ConfigError("candidates", "no K* candidates");
  if (seeds.empty()) throw ConfigError("seeds", "no seeds");
  const int k = base.num_channels();
  for (int c : candidates) {
    if (c < 1 || c > k) throw ConfigError("candidates", "K* must lie in [1, " + std::to_string(k) + "]");
  }
  std::vector<double> latency(candidates.size() * seeds.size());
  parallel_for(latency.size(), workers, [&](std::size_t i) {
    SimConfig c = base;
    c.scheduler.kind = "randomk:" + std::to_string(candidates[i / seeds.size()]);
    c.seed = seeds[i % seeds.size()];
    // Delivered-only means reward saturated candidates that deliver a handful of lucky packets.
    latency[i] = censored_mean_latency(run_simulation(c).log);
  });
  KStarResult result;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    std::vector<double> xs;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const double v = latency[ci * seeds.size() + si];
      // A run without deliveries has no latency sample; treat it as unboundedly slow.
      xs.push_back(std::isfinite(v) ? v : std::numeric_limits<double>::infinity());
    }
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double sd = 0.0;
    if (xs.size() > 1 && std::isfinite(mean)) {
      for (double x : xs) sd += (x - mean) * (x - mean);
      sd = std::sqrt(sd / static_cast<double>(xs.size() - 1));
    }
    result.table.push_back({candidates[ci], mean, sd});
    if (mean < best || (mean == best && candidates[ci] < result.best)) {
      best = mean;
      result.best = candidates[ci];
    }
  }
  if (result.best == 0) result.best = *std::min_element(candidates.begin(), candidates.end());
  return result;
}

std::string kstar_csv(const KStarResult& result, const Provenance& prov) {
  std::ostringstream out;
  out << prov.header_line() << '\n';
  out << "k_star,censored_mean_latency_s,std_latency_s,selected\n";
  for (const auto& p : result.table) {
    out << p.k_star << ',' << format_double(p.mean_latency_s) << ',' << format_double(p.std_latency_s) << ','
        << (p.k_star == result.best ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string overhead_csv(const std::vector<int>& channels, int num_ues, const std::vector<int>& active_ues,
                         FciSizeVariant variant) {
  if (channels.empty()) throw ConfigError("k", "empty K range");
  if (active_ues.empty()) throw ConfigError("n_active", "empty N_a range");
  std::ostringstream out;
  out << "k,n,n_active,fci_bits_float,fci_bits,dci_m_bits_float,dci_m_bits,dci_M_bits_float,dci_M_bits\n";
  for (int k : channels) {
    for (int na : active_ues) {
      const auto r = overhead(k, num_ues, na, variant);
      out << k << ',' << num_ues << ',' << na << ',' << format_double(r.fci_bits_exact) << ',' << r.fci_bits << ','
          << format_double(r.dci_m_bits_exact) << ',' << r.dci_m_bits << ',' << format_double(r.dci_M_bits_exact)
          << ',' << r.dci_M_bits << '\n';
    }
  }
  return out.str();
}

}  // namespace disnets
