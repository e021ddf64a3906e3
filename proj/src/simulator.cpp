#include "disnets/simulator.hpp"

#include <algorithm>
#include <numeric>

namespace disnets {

ScriptedTraffic::ScriptedTraffic(std::vector<Packet> packets) : packets_(std::move(packets)) {
  std::stable_sort(packets_.begin(), packets_.end(), [](const Packet& a, const Packet& b) { return a.t_gen < b.t_gen; });
  for (auto& p : packets_) {
    if (p.remaining_bytes == 0) p.remaining_bytes = p.total_bytes;
    if (static_cast<std::size_t>(p.ue) >= cursor_.size()) cursor_.resize(static_cast<std::size_t>(p.ue) + 1, 0);
  }
}

std::vector<Packet> ScriptedTraffic::arrivals_until(int ue, double t_end) {
  std::vector<Packet> out;
  if (static_cast<std::size_t>(ue) >= cursor_.size()) return out;
  auto& cur = cursor_[static_cast<std::size_t>(ue)];
  for (; cur < packets_.size(); ++cur) {
    const auto& p = packets_[cur];
    if (p.ue != ue) continue;
    if (p.t_gen >= t_end) break;
    out.push_back(p);
  }
  return out;
}

PacketRecord make_packet_record(const Packet& p, const TimingConfig& timing) {
  PacketRecord r;
  r.id = p.id;
  r.ue = p.ue;
  r.t_gen = p.t_gen;
  r.bytes = p.total_bytes;
  if (p.t_first_tx) r.t_first_tx = *p.t_first_tx;
  if (p.t_delivered) {
    r.delivered = true;
    r.t_delivered = *p.t_delivered;
    r.components = packet_latency(p, timing);
    r.latency_s = r.components.total();
  }
  return r;
}

MetricsLog run(const World& world, PacketSource& traffic, Scheduler& scheduler, std::int64_t num_sus) {
  const auto& timing = world.timing;
  const int n = world.num_ues();
  const int k = world.num_channels;
  if (num_sus < 0) num_sus = timing.num_sus();

  MetricsLog log;
  log.timing = timing;
  log.num_channels = k;
  log.num_ues = n;
  log.num_sus = num_sus;
  log.sus.reserve(static_cast<std::size_t>(num_sus));

  std::vector<UeQueue> queues(static_cast<std::size_t>(n));
  ContextWindow history(world.history_rows);
  std::vector<int> eligible(static_cast<std::size_t>(n));
  std::vector<std::int64_t> cumulative(static_cast<std::size_t>(n));
  std::vector<Decision> decisions(static_cast<std::size_t>(n));
  std::vector<UeFeedback> feedback(static_cast<std::size_t>(n));
  std::vector<Packet> completed;

  // Per-transmission bookkeeping: owner UE and the index of its load.
  struct TxRef {
    int ue;
    std::size_t load;
  };
  std::vector<std::vector<ChannelLoad>> loads(static_cast<std::size_t>(n));
  std::vector<TxRef> refs;

  for (std::int64_t su = 0; su < num_sus; ++su) {
    const double su_start = timing.su_start(su);
    const double data_end = timing.data_end(su);

    for (int ue = 0; ue < n; ++ue) {
      for (auto& p : traffic.arrivals_until(ue, timing.su_start(su + 1))) {
        p.ue = ue;
        if (p.remaining_bytes == 0) p.remaining_bytes = p.total_bytes;
        log.generated_packets += 1;
        log.generated_bytes += p.total_bytes;
        queues[static_cast<std::size_t>(ue)].push(p);
      }
      eligible[static_cast<std::size_t>(ue)] = queues[static_cast<std::size_t>(ue)].eligible_bytes(su_start, timing.t_p());
      cumulative[static_cast<std::size_t>(ue)] =
          queues[static_cast<std::size_t>(ue)].cumulative_eligible_bytes(su_start, timing.t_p());
    }

    SuView view{su, su_start, k, eligible, cumulative, world.links, &history};
    for (auto& d : decisions) {
      d.channels.clear();
      d.byte_cap = INT_MAX;
    }
    scheduler.decide(view, decisions);

    SuAssignment assignment;
    assignment.num_channels = k;
    refs.clear();
    std::vector<std::int64_t> head_ids(static_cast<std::size_t>(n), -1);
    for (int ue = 0; ue < n; ++ue) {
      auto& ue_loads = loads[static_cast<std::size_t>(ue)];
      ue_loads.clear();
      const auto& dec = decisions[static_cast<std::size_t>(ue)];
      if (dec.channels.empty()) continue;
      const int m = world.links[static_cast<std::size_t>(ue)].modulation_order;
      const auto& q = queues[static_cast<std::size_t>(ue)];
      if (!q.empty()) head_ids[static_cast<std::size_t>(ue)] = q.packets().front().id;
      ue_loads = q.drain(dec.channels, bytes_per_rb(m), su_start, timing.t_p(), dec.byte_cap);
      for (std::size_t i = 0; i < ue_loads.size(); ++i) {
        assignment.transmissions.push_back({ue, ue_loads[i].channel, ue_loads[i].bytes, m});
        refs.push_back({ue, i});
      }
    }

    const SuOutcome outcome = resolve_su(assignment, su, world.outage_reward);

    SuRecord rec;
    rec.su = su;
    for (auto& fb : feedback) {
      fb.channels.clear();
      fb.rewards.clear();
    }
    // Transmissions of one UE are contiguous, so a flat flag array indexed like `refs` suffices.
    std::unique_ptr<bool[]> delivered(new bool[refs.size() + 1]());
    std::vector<std::size_t> first_ref(static_cast<std::size_t>(n), 0);
    for (std::size_t i = refs.size(); i-- > 0;) first_ref[static_cast<std::size_t>(refs[i].ue)] = i;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      const auto& res = outcome.results[i];
      const auto& tx = assignment.transmissions[i];
      delivered[i] = res.delivered;
      auto& fb = feedback[static_cast<std::size_t>(refs[i].ue)];
      fb.channels.push_back(tx.channel);
      fb.rewards.push_back(res.reward);
      if (res.delivered) {
        rec.delivered_bytes += tx.bytes;
      } else {
        rec.lost_bytes += tx.bytes;
      }
    }
    for (int code : outcome.fci.outcomes) {
      if (code == fci::kUnused) {
        ++rec.unused;
      } else if (code == fci::kCollision) {
        ++rec.collisions;
      } else if (code == fci::kOutage) {
        ++rec.outages;
      } else {
        ++rec.successes;
      }
    }
    rec.channels_used = k - rec.unused;

    for (int ue = 0; ue < n; ++ue) {
      const auto& ue_loads = loads[static_cast<std::size_t>(ue)];
      if (ue_loads.empty()) continue;
      completed.clear();
      queues[static_cast<std::size_t>(ue)].commit(
          ue_loads, std::span<const bool>(delivered.get() + first_ref[static_cast<std::size_t>(ue)], ue_loads.size()), su,
          su_start, data_end, completed);
      for (const auto& p : completed) log.packets.push_back(make_packet_record(p, timing));

      const auto& fb = feedback[static_cast<std::size_t>(ue)];
      rec.transmitting_ues += 1;
      rec.ue_channels.emplace_back(ue, static_cast<int>(fb.channels.size()));
      const double mean_reward =
          std::accumulate(fb.rewards.begin(), fb.rewards.end(), 0.0) / static_cast<double>(fb.rewards.size());
      log.decisions.push_back({su, ue, static_cast<int>(fb.channels.size()), mean_reward, head_ids[static_cast<std::size_t>(ue)]});
    }
    log.delivered_bytes += rec.delivered_bytes;

    scheduler.feedback(view, outcome.fci, feedback, log);
    history.push(outcome.fci);
    log.sus.push_back(std::move(rec));
  }

  // Packets generated before the horizon that never completed.
  const double horizon = timing.su_start(num_sus);
  for (int ue = 0; ue < n; ++ue) {
    auto& q = queues[static_cast<std::size_t>(ue)];
    for (auto& p : traffic.arrivals_until(ue, horizon)) {
      p.ue = ue;
      if (p.remaining_bytes == 0) p.remaining_bytes = p.total_bytes;
      log.generated_packets += 1;
      log.generated_bytes += p.total_bytes;
      q.push(p);
    }
    log.queued_bytes_at_end += q.queued_bytes();
    for (const auto& p : q.packets()) log.packets.push_back(make_packet_record(p, timing));
  }
  std::stable_sort(log.packets.begin(), log.packets.end(),
                   [](const PacketRecord& a, const PacketRecord& b) { return a.id < b.id; });
  return log;
}

}  // namespace disnets
