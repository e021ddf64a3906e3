#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "disnets/channel.hpp"
#include "disnets/mac.hpp"
#include "disnets/metrics.hpp"
#include "disnets/scenario.hpp"
#include "disnets/schedulers.hpp"
#include "disnets/traffic.hpp"

namespace disnets {

/// Static part of a run: geometry, radio links and the SU grid.
struct World {
  FactoryLayout layout;
  std::vector<LinkState> links;
  TimingConfig timing;
  int num_channels = 0;
  double outage_reward = 0.0;
  int history_rows = 10;

  int num_ues() const { return static_cast<int>(links.size()); }
};

class PacketSource {
 public:
  virtual ~PacketSource() = default;
  /// Packets of `ue` generated strictly before `t_end`, not returned by an earlier call.
  virtual std::vector<Packet> arrivals_until(int ue, double t_end) = 0;
};

class ScheduledTraffic : public PacketSource {
 public:
  explicit ScheduledTraffic(TrafficGenerator gen) : gen_(std::move(gen)) {}
  std::vector<Packet> arrivals_until(int ue, double t_end) override { return gen_.arrivals_until(ue, t_end); }

 private:
  TrafficGenerator gen_;
};

/// Fixed list of packets; handy for hand-traced scenarios.
class ScriptedTraffic : public PacketSource {
 public:
  explicit ScriptedTraffic(std::vector<Packet> packets);
  std::vector<Packet> arrivals_until(int ue, double t_end) override;

 private:
  std::vector<Packet> packets_;
  std::vector<std::size_t> cursor_;
};

/// Runs `num_sus` scheduling units (all of T_S when negative).
MetricsLog run(const World& world, PacketSource& traffic, Scheduler& scheduler, std::int64_t num_sus = -1);

PacketRecord make_packet_record(const Packet& p, const TimingConfig& timing);

}  // namespace disnets
