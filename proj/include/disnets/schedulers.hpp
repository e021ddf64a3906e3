#pragma once

#include <climits>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "disnets/agent.hpp"
#include "disnets/channel.hpp"
#include "disnets/mac.hpp"
#include "disnets/metrics.hpp"
#include "disnets/rng.hpp"

namespace disnets {

class ConfigInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SchedulerType { Disnets, NltsSingle, RandomK, Gbs, Sps };

struct SchedulerKind {
  SchedulerType type = SchedulerType::Disnets;
  int k_star = 1;  // RandomK only

  std::string name() const;
  static SchedulerKind parse(const std::string& text);
  static std::vector<SchedulerKind> all(int k_star);
};

/// What every scheduler may read at the start of an SU: per-UE queue state, static links,
/// and the FCI records of SUs strictly before `su`.
struct SuView {
  std::int64_t su = 0;
  double su_start = 0.0;
  int num_channels = 0;
  std::span<const int> eligible_bytes;
  std::span<const std::int64_t> cumulative_eligible_bytes;
  std::span<const LinkState> links;
  const ContextWindow* history = nullptr;
};

struct Decision {
  std::vector<int> channels;  // ascending; empty = idle
  int byte_cap = INT_MAX;
};

struct UeFeedback {
  std::vector<int> channels;
  std::vector<double> rewards;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string name() const = 0;
  /// `out` is sized to the number of UEs and cleared by the caller.
  virtual void decide(const SuView& view, std::vector<Decision>& out) = 0;
  virtual void feedback(const SuView& /*view*/, const FciRecord& /*fci*/, std::span<const UeFeedback> /*per_ue*/,
                        MetricsLog& /*log*/) {}
};

/// Uniform random K*-subset of [0, K), ascending.
std::vector<int> randomk_select(int k_star, int num_channels, Rng& rng);

class RandomKScheduler : public Scheduler {
 public:
  RandomKScheduler(int k_star, int num_ues, std::uint64_t master_seed);
  std::string name() const override;
  void decide(const SuView& view, std::vector<Decision>& out) override;

 private:
  int k_star_;
  std::vector<Rng> rngs_;
};

/// Centralized request/grant pipeline: a request issued in SU r becomes grantable in SU r + grant_delay.
class GbsScheduler : public Scheduler {
 public:
  GbsScheduler(int num_ues, int grant_delay_su);
  std::string name() const override { return "gbs"; }
  void decide(const SuView& view, std::vector<Decision>& out) override;

  struct Request {
    int ue = 0;
    std::int64_t su = 0;
    std::int64_t bytes = 0;
  };
  const std::deque<Request>& pending() const { return pending_; }

 private:
  int num_ues_;
  int grant_delay_su_;
  int cursor_ = 0;
  std::vector<std::int64_t> requested_;
  std::deque<Request> pending_;
};

struct SpsConfig {
  int period_su = 1;
  int groups = 1;
  std::vector<int> phase;               // SU offset within the period, per UE
  std::vector<std::vector<int>> channels;  // dedicated channels, per UE
};

SpsConfig sps_configure(int num_ues, double nominal_interarrival_s, double su_duration_s, int num_channels);

class SpsScheduler : public Scheduler {
 public:
  explicit SpsScheduler(SpsConfig cfg) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "sps"; }
  void decide(const SuView& view, std::vector<Decision>& out) override;
  const SpsConfig& config() const { return cfg_; }

 private:
  SpsConfig cfg_;
};

/// One learning agent per UE (DISNETS combinatorial rule, or single-channel NLTS).
class AgentScheduler : public Scheduler {
 public:
  AgentScheduler(const AgentConfig& cfg, int num_ues, std::uint64_t master_seed);
  std::string name() const override;
  void decide(const SuView& view, std::vector<Decision>& out) override;
  void feedback(const SuView& view, const FciRecord& fci, std::span<const UeFeedback> per_ue,
                MetricsLog& log) override;

  const std::vector<Agent>& agents() const { return agents_; }
  std::vector<Agent>& agents() { return agents_; }

 private:
  nn::Context build_context(const SuView& view, int ue) const;

  AgentConfig cfg_;
  std::vector<Agent> agents_;
  std::vector<std::optional<nn::Context>> pending_context_;
};

struct SchedulerSettings {
  SchedulerKind kind;
  int gbs_grant_delay_su = 3;
  AgentConfig agent;
};

std::unique_ptr<Scheduler> make_scheduler(const SchedulerSettings& settings, int num_ues, int num_channels,
                                          double nominal_interarrival_s, double su_duration_s,
                                          std::uint64_t master_seed);

}  // namespace disnets
