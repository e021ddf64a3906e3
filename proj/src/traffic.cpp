#include "disnets/traffic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace disnets {

namespace {
constexpr double kSlotEps = 1e-9;
}

double TrafficConfig::nominal_interarrival_s() const {
  switch (model) {
    case TrafficModel::Periodic:
      return period_s;
    case TrafficModel::UniformAperiodic:
    case TrafficModel::UeSpecificAperiodic:
      return 0.5 * (t_min_s + t_max_s);
    case TrafficModel::Mixed:
      return aperiodic_fraction * 0.5 * (t_min_s + t_max_s) + (1.0 - aperiodic_fraction) * period_s;
  }
  return period_s;
}

void TrafficConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
  };
  const bool aperiodic = model != TrafficModel::Periodic;
  const bool periodic = model == TrafficModel::Periodic || model == TrafficModel::Mixed;
  if (periodic) require(period_s > 0, "period_ms", "must be > 0");
  if (aperiodic) {
    require(t_min_s > 0, "t_min_ms", "must be > 0");
    require(t_max_s >= t_min_s, "t_max_ms", "must be >= t_min_ms");
  }
  require(activation_period_s > 0, "activation_period_ms", "must be > 0");
  require(packet_size_bytes > 0, "packet_size_bytes", "must be > 0");
  require(header_bytes >= 0, "header_bytes", "must be >= 0");
  require(aperiodic_fraction >= 0 && aperiodic_fraction <= 1, "aperiodic_fraction", "must lie in [0, 1]");
}

std::vector<int> ActivationSchedule::active_at(double t) const {
  std::vector<int> active;
  for (const auto& line : per_line) {
    for (const auto& a : line) {
      if (t >= a.start && t < a.end) {
        active.push_back(a.machine);
        break;
      }
    }
  }
  return active;
}

ActivationSchedule build_schedule(const FactoryLayout& layout, double activation_period_s, double horizon_s) {
  if (!(horizon_s > 0)) throw std::invalid_argument("horizon must be > 0");
  ActivationSchedule sched;
  sched.activation_period_s = activation_period_s;
  sched.horizon_s = horizon_s;
  for (const auto& order : layout.activation_order) {
    std::vector<Activation> entries;
    if (order.size() == 1) {
      entries.push_back({order.front(), 0.0, horizon_s});
    } else {
      for (long i = 0; static_cast<double>(i) * activation_period_s < horizon_s - kSlotEps; ++i) {
        const int m = order[static_cast<std::size_t>(i) % order.size()];
        entries.push_back({m, static_cast<double>(i) * activation_period_s, static_cast<double>(i + 1) * activation_period_s});
      }
    }
    sched.per_line.push_back(std::move(entries));
  }
  return sched;
}

Activation next_window(const FactoryLayout& layout, double tau_a, int machine, double t) {
  const int line = layout.line_of_machine.at(machine);
  const auto n = static_cast<long>(layout.activation_order.at(line).size());
  if (n == 1) {
    if (t <= 0.0) return {machine, 0.0, std::numeric_limits<double>::infinity()};
    return {machine, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  const long p = layout.position_in_line(machine);
  const double x = (t / tau_a - static_cast<double>(p)) / static_cast<double>(n);
  const long j = std::max(0L, static_cast<long>(std::ceil(x - kSlotEps)));
  const long slot = p + j * n;
  return {machine, static_cast<double>(slot) * tau_a, static_cast<double>(slot + 1) * tau_a};
}

bool machine_active(const FactoryLayout& layout, double tau_a, int machine, double t) {
  const int line = layout.line_of_machine.at(machine);
  const auto n = static_cast<long>(layout.activation_order.at(line).size());
  if (n == 1) return t >= 0.0;
  const long slot = static_cast<long>(std::floor(t / tau_a));
  return slot >= 0 && slot % n == layout.position_in_line(machine);
}

std::pair<double, double> draw_ue_bounds(Rng& rng, double t_min, double t_max) {
  if (t_min > t_max) throw std::invalid_argument("t_min must not exceed t_max");
  if (t_min == t_max) return {t_min, t_max};
  const double lo = std::uniform_real_distribution<double>(t_min, t_max)(rng);
  const double hi = lo == t_max ? t_max : std::uniform_real_distribution<double>(lo, t_max)(rng);
  return {lo, hi};
}

double next_interarrival(const UeTrafficState& state, const TrafficConfig& cfg, Rng& rng) {
  auto uniform = [&rng](double lo, double hi) {
    return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  switch (cfg.model) {
    case TrafficModel::Periodic:
      return cfg.period_s;
    case TrafficModel::UniformAperiodic:
      return uniform(cfg.t_min_s, cfg.t_max_s);
    case TrafficModel::UeSpecificAperiodic:
      return uniform(state.t_min_n, state.t_max_n);
    case TrafficModel::Mixed:
      return state.is_aperiodic ? uniform(cfg.t_min_s, cfg.t_max_s) : cfg.period_s;
  }
  return cfg.period_s;
}

TrafficGenerator::TrafficGenerator(const FactoryLayout& layout, const TrafficConfig& cfg, double horizon_s,
                                   std::uint64_t master_seed)
    : layout_(&layout), cfg_(cfg), horizon_s_(horizon_s) {
  cfg_.validate();
  for (int ue = 0; ue < layout.num_ues(); ++ue) {
    UeTrafficState s;
    s.ue = ue;
    s.machine = layout.ue_machine[ue];
    Rng bounds = make_stream(master_seed, Stream::TrafficBounds, static_cast<std::uint64_t>(ue));
    std::tie(s.t_min_n, s.t_max_n) = draw_ue_bounds(bounds, cfg_.t_min_s, cfg_.t_max_s);
    if (cfg_.model == TrafficModel::Mixed) {
      Rng mix = make_stream(master_seed, Stream::TrafficMix, static_cast<std::uint64_t>(ue));
      s.is_aperiodic = std::bernoulli_distribution(cfg_.aperiodic_fraction)(mix);
    } else {
      s.is_aperiodic = cfg_.model != TrafficModel::Periodic;
    }
    states_.push_back(s);
    rngs_.push_back(make_stream(master_seed, Stream::TrafficArrivals, static_cast<std::uint64_t>(ue)));
  }
}

std::vector<Packet> TrafficGenerator::arrivals_until(int ue, double t_end) {
  std::vector<Packet> out;
  auto& s = states_.at(ue);
  auto& rng = rngs_.at(ue);
  const double stop = std::min(t_end, horizon_s_);
  while (true) {
    if (!s.next_arrival) {
      const Activation w = next_window(*layout_, cfg_.activation_period_s, s.machine, s.cursor);
      if (!(w.start < stop)) return out;
      s.window_end = w.end;
      s.next_arrival = w.start + next_interarrival(s, cfg_, rng);
    }
    if (*s.next_arrival >= s.window_end) {
      s.cursor = s.window_end;
      s.next_arrival.reset();
      continue;
    }
    if (*s.next_arrival >= stop) return out;
    Packet p;
    p.id = next_packet_id_++;
    p.ue = ue;
    p.t_gen = *s.next_arrival;
    p.total_bytes = cfg_.packet_total_bytes();
    p.remaining_bytes = p.total_bytes;
    out.push_back(p);
    *s.next_arrival += next_interarrival(s, cfg_, rng);
  }
}

}  // namespace disnets
