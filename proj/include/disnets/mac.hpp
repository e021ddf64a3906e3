#pragma once

#include <climits>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "disnets/packet.hpp"

namespace disnets {

class NotDelivered : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Timing of the SU grid and the fixed components of the end-to-end latency.
struct TimingConfig {
  double symbol_duration_s = 1.0 / 60e3;
  int symbols_per_su = 7;
  int data_symbols = 4;
  int fci_symbols = 2;
  int processing_ue_symbols = 7;   // T_P
  int processing_gnb_symbols = 7;  // T_gNB
  double das_delay_s = 0.05e-3;
  double core_delay_s = 0.1e-3;
  double propagation_s = 0.0;
  double fronthaul_s = 0.0;
  double sim_time_s = 2.0;
  double latency_threshold_s = 1e-3;

  static TimingConfig from_subcarrier_spacing(double subcarrier_spacing_hz);

  double su_duration() const { return symbols_per_su * symbol_duration_s; }
  double data_duration() const { return data_symbols * symbol_duration_s; }
  double t_p() const { return processing_ue_symbols * symbol_duration_s; }
  double t_gnb() const { return processing_gnb_symbols * symbol_duration_s; }
  double su_start(std::int64_t su) const { return static_cast<double>(su) * su_duration(); }
  double data_end(std::int64_t su) const { return su_start(su) + data_duration(); }
  std::int64_t num_sus() const;
  void validate() const;
};

/// Per-channel outcome codes carried by the FCI; successes carry the UE id (1-based).
namespace fci {
inline constexpr int kUnused = 0;
inline constexpr int kOutage = -1;
inline constexpr int kCollision = -2;
inline constexpr int success_code(int ue) { return ue + 1; }
inline constexpr int ue_of(int code) { return code - 1; }
}  // namespace fci

struct FciRecord {
  std::int64_t su_index = -1;
  std::vector<int> outcomes;
};

struct Transmission {
  int ue = 0;
  int channel = 0;
  int bytes = 0;
  int modulation_order = 0;
};

struct SuAssignment {
  int num_channels = 0;
  std::vector<Transmission> transmissions;
};

struct TxResult {
  bool delivered = false;
  bool collided = false;
  double reward = 0.0;
};

struct SuOutcome {
  FciRecord fci;
  /// Aligned with SuAssignment::transmissions.
  std::vector<TxResult> results;
};

/// Collision (>= 2 transmitters: reward -1), outage (lone transmitter with m = 0:
/// reward `outage_reward`), or delivery (reward = bytes / max bytes per RB).
SuOutcome resolve_su(const SuAssignment& assignment, std::int64_t su_index, double outage_reward = 0.0);

struct Segment {
  std::int64_t packet_id = 0;
  int bytes = 0;
};

struct ChannelLoad {
  int channel = 0;
  int bytes = 0;
  std::vector<Segment> segments;
};

/// FIFO packet queue of one UE.
class UeQueue {
 public:
  void push(const Packet& p) { packets_.push_back(p); }
  bool empty() const { return packets_.empty(); }
  std::size_t size() const { return packets_.size(); }
  const std::deque<Packet>& packets() const { return packets_; }

  /// Undelivered bytes of packets whose processing (T_P) completed by `su_start`.
  int eligible_bytes(double su_start, double t_p) const;
  /// Bytes of all packets that ever became eligible by `su_start` (delivered or not).
  std::int64_t cumulative_eligible_bytes(double su_start, double t_p) const;
  int queued_bytes() const;

  /// Packs eligible bytes FIFO across the channels (ascending), up to `bytes_per_rb` each and
  /// at most `byte_cap` in total. Every channel gets a load, possibly empty (padding).
  std::vector<ChannelLoad> drain(std::span<const int> channels, int bytes_per_rb, double su_start, double t_p,
                                 int byte_cap = INT_MAX) const;

  /// Marks packets touched by `loads` as transmitted, removes delivered bytes, and pops
  /// completed packets into `completed`. Lost bytes stay queued for retransmission.
  void commit(std::span<const ChannelLoad> loads, std::span<const bool> delivered, std::int64_t su, double su_start,
              double data_end, std::vector<Packet>& completed);

  std::int64_t delivered_bytes_total() const { return delivered_bytes_total_; }

 private:
  std::deque<Packet> packets_;
  std::int64_t delivered_bytes_total_ = 0;
};

struct LatencyBreakdown {
  double t_p = 0.0;
  double t_ran = 0.0;
  double t_tx = 0.0;
  double tau_p = 0.0;
  double t_das = 0.0;
  double tau_f = 0.0;
  double t_gnb = 0.0;
  double t_cn = 0.0;

  double total() const { return t_p + t_ran + t_tx + tau_p + t_das + tau_f + t_gnb + t_cn; }
};

LatencyBreakdown packet_latency(const Packet& p, const TimingConfig& timing);

}  // namespace disnets
