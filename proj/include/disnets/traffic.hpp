#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "disnets/packet.hpp"
#include "disnets/rng.hpp"
#include "disnets/scenario.hpp"

namespace disnets {

enum class TrafficModel { Periodic, UniformAperiodic, UeSpecificAperiodic, Mixed };

struct TrafficConfig {
  TrafficModel model = TrafficModel::UniformAperiodic;
  double period_s = 2e-3;
  double t_min_s = 2e-3;
  double t_max_s = 6e-3;
  double activation_period_s = 8e-3;
  int packet_size_bytes = 616;
  int header_bytes = 72;
  double aperiodic_fraction = 0.5;

  int packet_total_bytes() const { return packet_size_bytes + header_bytes; }
  /// Mean inter-arrival of the nominal model (used by SPS sizing).
  double nominal_interarrival_s() const;
  void validate() const;
};

struct Activation {
  int machine = 0;
  double start = 0.0;
  double end = 0.0;
};

struct ActivationSchedule {
  double activation_period_s = 0.0;
  double horizon_s = 0.0;
  std::vector<std::vector<Activation>> per_line;

  /// Machines active at instant t (one per line).
  std::vector<int> active_at(double t) const;
};

ActivationSchedule build_schedule(const FactoryLayout& layout, double activation_period_s, double horizon_s);

/// First activation window of `machine` starting at or after `t` (closed form over the cycle).
Activation next_window(const FactoryLayout& layout, double activation_period_s, int machine, double t);

bool machine_active(const FactoryLayout& layout, double activation_period_s, int machine, double t);

std::pair<double, double> draw_ue_bounds(Rng& rng, double t_min, double t_max);

struct UeTrafficState {
  int ue = 0;
  int machine = 0;
  double t_min_n = 0.0;
  double t_max_n = 0.0;
  bool is_aperiodic = true;
  std::optional<double> next_arrival;
  double window_end = 0.0;
  double cursor = 0.0;
};

double next_interarrival(const UeTrafficState& state, const TrafficConfig& cfg, Rng& rng);

/// Per-UE packet generators driven by the activation schedule. Arrivals restart fresh
/// at each activation (first packet one inter-arrival after the start) and stop at
/// deactivation.
class TrafficGenerator {
 public:
  TrafficGenerator(const FactoryLayout& layout, const TrafficConfig& cfg, double horizon_s,
                   std::uint64_t master_seed);

  /// Packets generated since the previous call and strictly before t_end, in time order.
  std::vector<Packet> arrivals_until(int ue, double t_end);

  /// Arrivals of SU `su_index`; SUs must be visited in increasing order.
  std::vector<Packet> arrivals_in_su(int ue, std::int64_t su_index, double su_duration_s) {
    return arrivals_until(ue, static_cast<double>(su_index + 1) * su_duration_s);
  }

  const UeTrafficState& state(int ue) const { return states_.at(ue); }
  const TrafficConfig& config() const { return cfg_; }

 private:
  const FactoryLayout* layout_;
  TrafficConfig cfg_;
  double horizon_s_;
  std::vector<UeTrafficState> states_;
  std::vector<Rng> rngs_;
  std::int64_t next_packet_id_ = 0;
};

}  // namespace disnets
