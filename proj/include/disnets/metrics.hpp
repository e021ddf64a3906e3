#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "disnets/mac.hpp"

namespace disnets {

struct PacketRecord {
  std::int64_t id = 0;
  int ue = 0;
  double t_gen = 0.0;
  int bytes = 0;
  bool delivered = false;
  double t_first_tx = std::numeric_limits<double>::quiet_NaN();
  double t_delivered = std::numeric_limits<double>::quiet_NaN();
  LatencyBreakdown components;
  double latency_s = std::numeric_limits<double>::quiet_NaN();
};

struct SuRecord {
  std::int64_t su = 0;
  int transmitting_ues = 0;
  int collisions = 0;
  int successes = 0;
  int outages = 0;
  int unused = 0;
  int channels_used = 0;
  std::int64_t delivered_bytes = 0;
  std::int64_t lost_bytes = 0;
  /// (ue, |θ|) for every UE that transmitted.
  std::vector<std::pair<int, int>> ue_channels;
};

struct DecisionRecord {
  std::int64_t su = 0;
  int ue = 0;
  int num_channels = 0;
  double mean_reward = 0.0;
  std::int64_t head_packet_id = -1;
};

struct TrainingRecord {
  std::int64_t su = 0;
  double t = 0.0;
  int ue = 0;
  double loss = 0.0;
  std::size_t buffer_size = 0;
};

struct MetricsLog {
  TimingConfig timing;
  int num_channels = 0;
  int num_ues = 0;
  std::int64_t num_sus = 0;
  std::vector<PacketRecord> packets;
  std::vector<SuRecord> sus;
  std::vector<DecisionRecord> decisions;
  std::vector<TrainingRecord> training;
  std::int64_t generated_packets = 0;
  std::int64_t generated_bytes = 0;
  std::int64_t delivered_bytes = 0;
  std::int64_t queued_bytes_at_end = 0;

  std::int64_t delivered_packets() const;
  std::int64_t total_collisions() const;
};

struct CurvePoint {
  double x = 0.0;
  double value = 0.0;
};

struct SummaryStats {
  double mean_latency_s = 0.0;
  double latency_std_s = 0.0;
  double reliability = 1.0;
  bool reliability_vacuous = false;
  std::int64_t generated_packets = 0;
  std::int64_t delivered_packets = 0;
  std::int64_t undelivered_packets = 0;
  double collision_rate = 0.0;
  std::int64_t collisions = 0;
  std::vector<CurvePoint> reward_curve;
  std::vector<CurvePoint> loss_curve;
};

double mean_latency(const MetricsLog& log);
double latency_std(const MetricsLog& log);
/// Mean over every generated packet; an undelivered one contributes its age at the horizon.
double censored_mean_latency(const MetricsLog& log);

struct Reliability {
  double value = 1.0;
  bool vacuous = false;
};
/// Delivered packets with L <= threshold over all generated packets (undelivered count as failures).
Reliability reliability(const MetricsLog& log, double latency_threshold_s);

/// Collision outcomes per (SU, channel).
double collision_rate(const MetricsLog& log);

/// Mean reward over consecutive blocks of `block` decisions; x is the decision count at block end.
std::vector<CurvePoint> reward_curve(const MetricsLog& log, int block = 100);
/// One point per retraining event (x = time in s), averaged across UEs that retrained in the same SU.
std::vector<CurvePoint> loss_curve(const MetricsLog& log);

SummaryStats summarize(const MetricsLog& log, double latency_threshold_s);

struct CdfPoint {
  int channels = 0;
  double probability = 0.0;
};
/// Empirical CDF of |θ| over the transmissions serving each UE's last `window_packets`
/// packets, pooled across UEs. Evaluated at 0..max_channels.
std::vector<CdfPoint> channel_usage_cdf(const MetricsLog& log, int window_packets, int max_channels);

enum class FciSizeVariant { NPlus3, NPlus2 };

/// Real-valued size formulas.
double fci_size_bits_exact(int num_channels, int num_ues, FciSizeVariant variant = FciSizeVariant::NPlus3);
double dci_size_bits_exact(int active_ues, int num_channels, bool large_format);

/// Realizable sizes: per-entry bit fields rounded up.
long fci_size_bits(int num_channels, int num_ues, FciSizeVariant variant = FciSizeVariant::NPlus3);
long dci_size_bits(int active_ues, int num_channels, bool large_format);

struct OverheadReport {
  int num_channels = 0;
  int num_ues = 0;
  int active_ues = 0;
  double fci_bits_exact = 0.0;
  long fci_bits = 0;
  double dci_m_bits_exact = 0.0;
  long dci_m_bits = 0;
  double dci_M_bits_exact = 0.0;
  long dci_M_bits = 0;
};

OverheadReport overhead(int num_channels, int num_ues, int active_ues, FciSizeVariant variant = FciSizeVariant::NPlus3);

}  // namespace disnets
