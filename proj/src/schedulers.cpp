#include "disnets/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace disnets {

std::string SchedulerKind::name() const {
  switch (type) {
    case SchedulerType::Disnets:
      return "disnets";
    case SchedulerType::NltsSingle:
      return "nlts";
    case SchedulerType::RandomK:
      return "randomk:" + std::to_string(k_star);
    case SchedulerType::Gbs:
      return "gbs";
    case SchedulerType::Sps:
      return "sps";
  }
  return "unknown";
}

SchedulerKind SchedulerKind::parse(const std::string& text) {
  if (text == "disnets") return {SchedulerType::Disnets, 1};
  if (text == "nlts") return {SchedulerType::NltsSingle, 1};
  if (text == "gbs") return {SchedulerType::Gbs, 1};
  if (text == "sps") return {SchedulerType::Sps, 1};
  if (text.rfind("randomk", 0) == 0) {
    SchedulerKind kind{SchedulerType::RandomK, 1};
    if (text.size() > 8 && text[7] == ':') {
      std::size_t used = 0;
      kind.k_star = std::stoi(text.substr(8), &used);
      if (used != text.size() - 8) throw std::invalid_argument("bad K* in scheduler '" + text + "'");
    } else if (text.size() != 7) {
      throw std::invalid_argument("unknown scheduler '" + text + "'");
    }
    return kind;
  }
  throw std::invalid_argument("unknown scheduler '" + text + "' (expected disnets|nlts|randomk[:K*]|gbs|sps)");
}

std::vector<SchedulerKind> SchedulerKind::all(int k_star) {
  return {{SchedulerType::Disnets, 1},
          {SchedulerType::NltsSingle, 1},
          {SchedulerType::RandomK, k_star},
          {SchedulerType::Gbs, 1},
          {SchedulerType::Sps, 1}};
}

std::vector<int> randomk_select(int k_star, int num_channels, Rng& rng) {
  if (k_star < 1 || k_star > num_channels) throw std::invalid_argument("K* must lie in [1, K]");
  std::vector<int> all(static_cast<std::size_t>(num_channels));
  std::iota(all.begin(), all.end(), 0);
  if (k_star == num_channels) return all;
  for (int i = 0; i < k_star; ++i) {
    std::uniform_int_distribution<int> pick(i, num_channels - 1);
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
  }
  all.resize(static_cast<std::size_t>(k_star));
  std::sort(all.begin(), all.end());
  return all;
}

RandomKScheduler::RandomKScheduler(int k_star, int num_ues, std::uint64_t master_seed) : k_star_(k_star) {
  for (int ue = 0; ue < num_ues; ++ue) rngs_.push_back(make_stream(master_seed, Stream::RandomK, static_cast<std::uint64_t>(ue)));
}

std::string RandomKScheduler::name() const { return "randomk:" + std::to_string(k_star_); }

void RandomKScheduler::decide(const SuView& view, std::vector<Decision>& out) {
  for (std::size_t ue = 0; ue < out.size(); ++ue) {
    if (view.eligible_bytes[ue] <= 0) continue;
    out[ue].channels = randomk_select(std::min(k_star_, view.num_channels), view.num_channels, rngs_[ue]);
  }
}

GbsScheduler::GbsScheduler(int num_ues, int grant_delay_su)
    : num_ues_(num_ues), grant_delay_su_(grant_delay_su), requested_(static_cast<std::size_t>(num_ues), 0) {}

void GbsScheduler::decide(const SuView& view, std::vector<Decision>& out) {
  // Scheduling requests for bytes that became ready since the previous request.
  for (int ue = 0; ue < num_ues_; ++ue) {
    const std::int64_t fresh = view.cumulative_eligible_bytes[static_cast<std::size_t>(ue)] - requested_[static_cast<std::size_t>(ue)];
    if (fresh > 0) {
      pending_.push_back({ue, view.su, fresh});
      requested_[static_cast<std::size_t>(ue)] += fresh;
    }
  }

  std::vector<std::size_t> grantable;
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    if (pending_[i].su + grant_delay_su_ <= view.su) grantable.push_back(i);
  }
  const int cursor = cursor_;
  const int n = num_ues_;
  std::stable_sort(grantable.begin(), grantable.end(), [&](std::size_t a, std::size_t b) {
    if (pending_[a].su != pending_[b].su) return pending_[a].su < pending_[b].su;
    return (pending_[a].ue - cursor + n) % n < (pending_[b].ue - cursor + n) % n;
  });

  int used = 0;
  int last_served = -1;
  for (std::size_t idx : grantable) {
    if (used >= view.num_channels) break;
    auto& req = pending_[idx];
    const int bpr = bytes_per_rb(view.links[static_cast<std::size_t>(req.ue)].modulation_order);
    if (bpr == 0) continue;
    const auto need = static_cast<int>((req.bytes + bpr - 1) / bpr);
    const int granted = std::min(need, view.num_channels - used);
    auto& dec = out[static_cast<std::size_t>(req.ue)];
    if (dec.byte_cap == INT_MAX) dec.byte_cap = 0;
    for (int c = 0; c < granted; ++c) dec.channels.push_back(used + c);
    const std::int64_t covered = std::min<std::int64_t>(req.bytes, static_cast<std::int64_t>(granted) * bpr);
    dec.byte_cap += static_cast<int>(covered);
    req.bytes -= covered;
    used += granted;
    last_served = req.ue;
  }
  std::erase_if(pending_, [](const Request& r) { return r.bytes <= 0; });
  if (last_served >= 0) cursor_ = (last_served + 1) % n;
}

SpsConfig sps_configure(int num_ues, double nominal_interarrival_s, double su_duration_s, int num_channels) {
  SpsConfig cfg;
  cfg.period_su = std::max(1, static_cast<int>(std::lround(nominal_interarrival_s / su_duration_s)));
  if (num_ues == 0) return cfg;
  if (static_cast<long>(num_ues) > static_cast<long>(num_channels) * cfg.period_su) {
    throw ConfigInfeasible("SPS cannot serve " + std::to_string(num_ues) + " UEs with " + std::to_string(num_channels) +
                           " channels every " + std::to_string(cfg.period_su) + " SUs");
  }
  cfg.groups = std::min(num_ues, cfg.period_su);
  const int per_group = (num_ues + cfg.groups - 1) / cfg.groups;
  const int share = num_channels / per_group;
  for (int ue = 0; ue < num_ues; ++ue) {
    const int group = ue % cfg.groups;
    const int slot = ue / cfg.groups;
    cfg.phase.push_back(static_cast<int>(static_cast<long>(group) * cfg.period_su / cfg.groups));
    std::vector<int> chans(static_cast<std::size_t>(share));
    std::iota(chans.begin(), chans.end(), slot * share);
    cfg.channels.push_back(std::move(chans));
  }
  return cfg;
}

void SpsScheduler::decide(const SuView& view, std::vector<Decision>& out) {
  const auto offset = static_cast<int>(view.su % cfg_.period_su);
  for (std::size_t ue = 0; ue < out.size() && ue < cfg_.phase.size(); ++ue) {
    if (cfg_.phase[ue] != offset || view.eligible_bytes[ue] <= 0) continue;
    const int bpr = bytes_per_rb(view.links[ue].modulation_order);
    if (bpr == 0) continue;
    const int need = (view.eligible_bytes[ue] + bpr - 1) / bpr;
    const auto& own = cfg_.channels[ue];
    out[ue].channels.assign(own.begin(), own.begin() + std::min<std::ptrdiff_t>(need, static_cast<std::ptrdiff_t>(own.size())));
  }
}

AgentScheduler::AgentScheduler(const AgentConfig& cfg, int num_ues, std::uint64_t master_seed)
    : cfg_(cfg), pending_context_(static_cast<std::size_t>(num_ues)) {
  agents_.reserve(static_cast<std::size_t>(num_ues));
  for (int ue = 0; ue < num_ues; ++ue) {
    agents_.emplace_back(cfg_, make_stream(master_seed, Stream::NetInit, static_cast<std::uint64_t>(ue)),
                         make_stream(master_seed, Stream::Agent, static_cast<std::uint64_t>(ue)));
  }
}

std::string AgentScheduler::name() const { return cfg_.mode == AgentMode::Disnets ? "disnets" : "nlts"; }

nn::Context AgentScheduler::build_context(const SuView& view, int ue) const {
  nn::Context fci_rows = view.history->encode(ue, cfg_.num_channels, cfg_.encoding);
  if (!cfg_.queue_row) return fci_rows;
  nn::Context ctx(fci_rows.rows() + 1, fci_rows.cols());
  ctx.topRows(fci_rows.rows()) = fci_rows;
  const double capacity = static_cast<double>(cfg_.num_channels) * max_bytes_per_rb();
  ctx.row(fci_rows.rows()).setConstant(std::min(1.0, view.eligible_bytes[static_cast<std::size_t>(ue)] / capacity));
  return ctx;
}

void AgentScheduler::decide(const SuView& view, std::vector<Decision>& out) {
  for (std::size_t ue = 0; ue < out.size(); ++ue) {
    pending_context_[ue].reset();
    if (view.eligible_bytes[ue] <= 0) continue;
    nn::Context ctx = build_context(view, static_cast<int>(ue));
    out[ue].channels = agents_[ue].select_superaction(ctx);
    pending_context_[ue] = std::move(ctx);
  }
}

void AgentScheduler::feedback(const SuView& view, const FciRecord& /*fci*/, std::span<const UeFeedback> per_ue,
                              MetricsLog& log) {
  for (std::size_t ue = 0; ue < agents_.size(); ++ue) {
    if (!pending_context_[ue]) continue;
    agents_[ue].observe(*pending_context_[ue], per_ue[ue].channels, per_ue[ue].rewards);
    pending_context_[ue].reset();
    if (auto ev = agents_[ue].maybe_retrain()) {
      log.training.push_back({view.su, view.su_start, static_cast<int>(ue), ev->loss, ev->buffer_size});
    }
  }
}

std::unique_ptr<Scheduler> make_scheduler(const SchedulerSettings& settings, int num_ues, int num_channels,
                                          double nominal_interarrival_s, double su_duration_s,
                                          std::uint64_t master_seed) {
  switch (settings.kind.type) {
    case SchedulerType::Disnets:
    case SchedulerType::NltsSingle: {
      AgentConfig cfg = settings.agent;
      cfg.mode = settings.kind.type == SchedulerType::Disnets ? AgentMode::Disnets : AgentMode::NltsSingle;
      cfg.num_channels = num_channels;
      cfg.sync_dimensions();
      return std::make_unique<AgentScheduler>(cfg, num_ues, master_seed);
    }
    case SchedulerType::RandomK:
      if (settings.kind.k_star < 1 || settings.kind.k_star > num_channels) {
        throw std::invalid_argument("scheduler.random_k: K* must lie in [1, " + std::to_string(num_channels) + "]");
      }
      return std::make_unique<RandomKScheduler>(settings.kind.k_star, num_ues, master_seed);
    case SchedulerType::Gbs:
      return std::make_unique<GbsScheduler>(num_ues, settings.gbs_grant_delay_su);
    case SchedulerType::Sps:
      return std::make_unique<SpsScheduler>(sps_configure(num_ues, nominal_interarrival_s, su_duration_s, num_channels));
  }
  throw std::invalid_argument("unknown scheduler kind");
}

}  // namespace disnets
