#include "disnets/mac.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "disnets/channel.hpp"

namespace disnets {

namespace {
// SU boundaries and generation instants are doubles; readiness compares with slack.
constexpr double kTimeEps = 1e-12;

bool ready(const Packet& p, double su_start, double t_p) { return p.t_gen + t_p <= su_start + kTimeEps; }
}  // namespace

TimingConfig TimingConfig::from_subcarrier_spacing(double subcarrier_spacing_hz) {
  TimingConfig t;
  t.symbol_duration_s = 1.0 / subcarrier_spacing_hz;
  return t;
}

std::int64_t TimingConfig::num_sus() const {
  return static_cast<std::int64_t>(std::floor(sim_time_s / su_duration() + 1e-9));
}

void TimingConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
  };
  require(symbol_duration_s > 0, "subcarrier_spacing_khz", "must be > 0");
  require(symbols_per_su >= data_symbols + fci_symbols, "symbols_per_su", "must hold data and FCI symbols");
  require(data_symbols >= 1, "data_symbols", "must be >= 1");
  require(processing_ue_symbols >= 0, "processing_ue_symbols", "must be >= 0");
  require(processing_gnb_symbols >= 0, "processing_gnb_symbols", "must be >= 0");
  require(das_delay_s >= 0, "das_delay_ms", "must be >= 0");
  require(core_delay_s >= 0, "core_delay_ms", "must be >= 0");
  require(sim_time_s > 0, "sim_time_s", "must be > 0");
  require(latency_threshold_s > 0, "latency_threshold_ms", "must be > 0");
}

SuOutcome resolve_su(const SuAssignment& assignment, std::int64_t su_index, double outage_reward) {
  SuOutcome out;
  out.fci.su_index = su_index;
  out.fci.outcomes.assign(static_cast<std::size_t>(assignment.num_channels), fci::kUnused);
  out.results.resize(assignment.transmissions.size());

  std::vector<int> transmitters(static_cast<std::size_t>(assignment.num_channels), 0);
  for (const auto& tx : assignment.transmissions) ++transmitters.at(static_cast<std::size_t>(tx.channel));

  const double max_bytes = max_bytes_per_rb();
  for (std::size_t i = 0; i < assignment.transmissions.size(); ++i) {
    const auto& tx = assignment.transmissions[i];
    auto& res = out.results[i];
    auto& code = out.fci.outcomes[static_cast<std::size_t>(tx.channel)];
    if (transmitters[static_cast<std::size_t>(tx.channel)] >= 2) {
      code = fci::kCollision;
      res.collided = true;
      res.reward = -1.0;
    } else if (tx.modulation_order == 0) {
      code = fci::kOutage;
      res.reward = outage_reward;
    } else {
      code = fci::success_code(tx.ue);
      res.delivered = true;
      res.reward = tx.bytes / max_bytes;
    }
  }
  return out;
}

int UeQueue::eligible_bytes(double su_start, double t_p) const {
  int total = 0;
  for (const auto& p : packets_) {
    if (!ready(p, su_start, t_p)) break;
    total += p.remaining_bytes;
  }
  return total;
}

std::int64_t UeQueue::cumulative_eligible_bytes(double su_start, double t_p) const {
  std::int64_t total = delivered_bytes_total_;
  for (const auto& p : packets_) {
    if (!ready(p, su_start, t_p)) break;
    total += p.remaining_bytes;
  }
  return total;
}

int UeQueue::queued_bytes() const {
  int total = 0;
  for (const auto& p : packets_) total += p.remaining_bytes;
  return total;
}

std::vector<ChannelLoad> UeQueue::drain(std::span<const int> channels, int bytes_per_rb, double su_start, double t_p,
                                        int byte_cap) const {
  std::vector<ChannelLoad> loads;
  loads.reserve(channels.size());
  std::vector<int> sorted(channels.begin(), channels.end());
  std::sort(sorted.begin(), sorted.end());

  std::size_t head = 0;
  int head_left = packets_.empty() ? 0 : packets_.front().remaining_bytes;
  int budget = byte_cap;
  for (int ch : sorted) {
    ChannelLoad load;
    load.channel = ch;
    int room = std::min(bytes_per_rb, budget);
    while (room > 0 && head < packets_.size() && ready(packets_[head], su_start, t_p)) {
      const int take = std::min(room, head_left);
      if (take > 0) {
        load.segments.push_back({packets_[head].id, take});
        load.bytes += take;
        room -= take;
        budget -= take;
        head_left -= take;
      }
      if (head_left == 0) {
        ++head;
        head_left = head < packets_.size() ? packets_[head].remaining_bytes : 0;
      }
    }
    loads.push_back(std::move(load));
  }
  return loads;
}

void UeQueue::commit(std::span<const ChannelLoad> loads, std::span<const bool> delivered, std::int64_t su,
                     double su_start, double data_end, std::vector<Packet>& completed) {
  for (std::size_t i = 0; i < loads.size(); ++i) {
    for (const auto& seg : loads[i].segments) {
      auto it = std::find_if(packets_.begin(), packets_.end(), [&](const Packet& p) { return p.id == seg.packet_id; });
      if (it == packets_.end()) continue;
      if (!it->t_first_tx) it->t_first_tx = su_start;
      if (delivered[i]) {
        it->remaining_bytes -= seg.bytes;
        delivered_bytes_total_ += seg.bytes;
      }
    }
  }
  while (!packets_.empty() && packets_.front().remaining_bytes == 0) {
    Packet p = packets_.front();
    packets_.pop_front();
    p.t_delivered = data_end;
    p.su_delivered = su;
    completed.push_back(p);
  }
  // A later packet can complete before an earlier one whose head bytes collided.
  for (auto it = packets_.begin(); it != packets_.end();) {
    if (it->remaining_bytes == 0) {
      Packet p = *it;
      p.t_delivered = data_end;
      p.su_delivered = su;
      completed.push_back(p);
      it = packets_.erase(it);
    } else {
      ++it;
    }
  }
}

LatencyBreakdown packet_latency(const Packet& p, const TimingConfig& timing) {
  if (!p.t_delivered || !p.t_first_tx) throw NotDelivered("packet " + std::to_string(p.id) + " was not delivered");
  LatencyBreakdown l;
  l.t_p = timing.t_p();
  l.t_ran = *p.t_first_tx - (p.t_gen + l.t_p);
  l.t_tx = *p.t_delivered - *p.t_first_tx;
  l.tau_p = timing.propagation_s;
  l.t_das = timing.das_delay_s;
  l.tau_f = timing.fronthaul_s;
  l.t_gnb = timing.t_gnb();
  l.t_cn = timing.core_delay_s;
  return l;
}

}  // namespace disnets
