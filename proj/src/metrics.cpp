#include "disnets/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace disnets {

std::int64_t MetricsLog::delivered_packets() const {
  return std::count_if(packets.begin(), packets.end(), [](const PacketRecord& p) { return p.delivered; });
}

std::int64_t MetricsLog::total_collisions() const {
  std::int64_t total = 0;
  for (const auto& s : sus) total += s.collisions;
  return total;
}

double mean_latency(const MetricsLog& log) {
  double sum = 0.0;
  long n = 0;
  for (const auto& p : log.packets) {
    if (!p.delivered) continue;
    sum += p.latency_s;
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

double censored_mean_latency(const MetricsLog& log) {
  const double horizon = log.timing.su_start(log.num_sus);
  double sum = 0.0;
  for (const auto& p : log.packets) sum += p.delivered ? p.latency_s : horizon - p.t_gen;
  return log.packets.empty() ? std::numeric_limits<double>::quiet_NaN()
                             : sum / static_cast<double>(log.packets.size());
}

double latency_std(const MetricsLog& log) {
  const double mean = mean_latency(log);
  double ss = 0.0;
  long n = 0;
  for (const auto& p : log.packets) {
    if (!p.delivered) continue;
    ss += (p.latency_s - mean) * (p.latency_s - mean);
    ++n;
  }
  return n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

Reliability reliability(const MetricsLog& log, double threshold) {
  if (log.packets.empty()) return {1.0, true};
  const auto ok = std::count_if(log.packets.begin(), log.packets.end(),
                                [&](const PacketRecord& p) { return p.delivered && p.latency_s <= threshold; });
  return {static_cast<double>(ok) / static_cast<double>(log.packets.size()), false};
}

double collision_rate(const MetricsLog& log) {
  if (log.sus.empty() || log.num_channels == 0) return 0.0;
  return static_cast<double>(log.total_collisions()) /
         (static_cast<double>(log.sus.size()) * static_cast<double>(log.num_channels));
}

std::vector<CurvePoint> reward_curve(const MetricsLog& log, int block) {
  std::vector<CurvePoint> curve;
  double sum = 0.0;
  int n = 0;
  std::size_t count = 0;
  for (const auto& d : log.decisions) {
    sum += d.mean_reward;
    ++n;
    ++count;
    if (n == block) {
      curve.push_back({static_cast<double>(count), sum / n});
      sum = 0.0;
      n = 0;
    }
  }
  return curve;
}

std::vector<CurvePoint> loss_curve(const MetricsLog& log) {
  std::vector<CurvePoint> curve;
  std::size_t i = 0;
  while (i < log.training.size()) {
    const auto su = log.training[i].su;
    double sum = 0.0;
    int n = 0;
    for (; i < log.training.size() && log.training[i].su == su; ++i) {
      sum += log.training[i].loss;
      ++n;
    }
    curve.push_back({log.timing.su_start(su), sum / n});
  }
  return curve;
}

SummaryStats summarize(const MetricsLog& log, double threshold) {
  SummaryStats s;
  s.mean_latency_s = mean_latency(log);
  s.latency_std_s = latency_std(log);
  const auto rel = reliability(log, threshold);
  s.reliability = rel.value;
  s.reliability_vacuous = rel.vacuous;
  s.generated_packets = static_cast<std::int64_t>(log.packets.size());
  s.delivered_packets = log.delivered_packets();
  s.undelivered_packets = s.generated_packets - s.delivered_packets;
  s.collisions = log.total_collisions();
  s.collision_rate = collision_rate(log);
  s.reward_curve = reward_curve(log, 100);
  s.loss_curve = loss_curve(log);
  return s;
}

std::vector<CdfPoint> channel_usage_cdf(const MetricsLog& log, int window_packets, int max_channels) {
  // Last `window_packets` packet ids per UE.
  std::map<int, std::vector<std::int64_t>> per_ue;
  for (const auto& p : log.packets) per_ue[p.ue].push_back(p.id);
  std::unordered_set<std::int64_t> window;
  for (auto& [ue, ids] : per_ue) {
    std::sort(ids.begin(), ids.end());
    const std::size_t from = ids.size() > static_cast<std::size_t>(window_packets) ? ids.size() - window_packets : 0;
    for (std::size_t i = from; i < ids.size(); ++i) window.insert(ids[i]);
  }
  std::vector<long> hist(static_cast<std::size_t>(max_channels) + 1, 0);
  long total = 0;
  for (const auto& d : log.decisions) {
    if (!window.contains(d.head_packet_id)) continue;
    ++hist[static_cast<std::size_t>(std::clamp(d.num_channels, 0, max_channels))];
    ++total;
  }
  std::vector<CdfPoint> cdf;
  long running = 0;
  for (int c = 0; c <= max_channels; ++c) {
    running += hist[static_cast<std::size_t>(c)];
    cdf.push_back({c, total > 0 ? static_cast<double>(running) / static_cast<double>(total) : 1.0});
  }
  return cdf;
}

double fci_size_bits_exact(int num_channels, int num_ues, FciSizeVariant variant) {
  const int symbols = num_ues + (variant == FciSizeVariant::NPlus3 ? 3 : 2);
  return num_channels * std::log2(static_cast<double>(symbols));
}

double dci_size_bits_exact(int active_ues, int num_channels, bool large_format) {
  return active_ues * (std::log2(static_cast<double>(num_channels)) + (large_format ? 37.0 : 10.0));
}

namespace {
long ceil_log2(long n) {
  long bits = 0;
  while ((1L << bits) < n) ++bits;
  return bits;
}
}  // namespace

long fci_size_bits(int num_channels, int num_ues, FciSizeVariant variant) {
  if (num_channels < 1 || num_ues < 1) throw std::invalid_argument("K and N must be >= 1");
  const long symbols = num_ues + (variant == FciSizeVariant::NPlus3 ? 3 : 2);
  return num_channels * ceil_log2(symbols);
}

long dci_size_bits(int active_ues, int num_channels, bool large_format) {
  if (active_ues < 0 || num_channels < 1) throw std::invalid_argument("N_a must be >= 0 and K >= 1");
  return active_ues * (ceil_log2(num_channels) + (large_format ? 37 : 10));
}

OverheadReport overhead(int num_channels, int num_ues, int active_ues, FciSizeVariant variant) {
  OverheadReport r;
  r.num_channels = num_channels;
  r.num_ues = num_ues;
  r.active_ues = active_ues;
  r.fci_bits_exact = fci_size_bits_exact(num_channels, num_ues, variant);
  r.fci_bits = fci_size_bits(num_channels, num_ues, variant);
  r.dci_m_bits_exact = dci_size_bits_exact(active_ues, num_channels, false);
  r.dci_m_bits = dci_size_bits(active_ues, num_channels, false);
  r.dci_M_bits_exact = dci_size_bits_exact(active_ues, num_channels, true);
  r.dci_M_bits = dci_size_bits(active_ues, num_channels, true);
  return r;
}

}  // namespace disnets
