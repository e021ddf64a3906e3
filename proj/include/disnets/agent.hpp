#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "disnets/lts.hpp"
#include "disnets/mac.hpp"
#include "disnets/nn.hpp"
#include "disnets/rng.hpp"

namespace disnets {

enum class AgentMode { Disnets, NltsSingle };

/// Numeric encoding of FCI outcomes inside a UE's context.
struct ContextEncoding {
  double own_success = 1.0;
  double other_success = 0.5;
  double unused = 0.0;
  double outage = -0.5;
  double collision = -1.0;
};

struct AgentConfig {
  AgentMode mode = AgentMode::Disnets;
  int num_channels = 12;
  int history_rows = 10;  // H_ctx
  double threshold = 0.0;  // ε
  int buffer_capacity = 4096;
  int retrain_interval = 100;  // O
  /// Appends one row holding the UE's own queue length (in packets of max size) to the context.
  bool queue_row = false;
  ContextEncoding encoding;
  nn::NetConfig net;
  LtsConfig<double> lts;

  /// Keeps the network/LTS dimensions consistent with the channel count and history depth.
  void sync_dimensions();
  void validate() const;
};

/// The last H FCI records seen by every UE, oldest first.
class ContextWindow {
 public:
  explicit ContextWindow(int rows) : rows_(rows) {}

  void push(FciRecord record);
  int rows() const { return rows_; }
  const std::deque<FciRecord>& records() const { return records_; }
  /// SU index of the most recent record, or -1 before the first FCI.
  std::int64_t latest_su() const { return records_.empty() ? -1 : records_.back().su_index; }

  /// rows × K tensor for UE `own_ue`, zero rows first while fewer than `rows` records exist.
  nn::Context encode(int own_ue, int num_channels, const ContextEncoding& enc = {}) const;

 private:
  int rows_;
  std::deque<FciRecord> records_;
};

double encode_outcome(int code, int own_ue, const ContextEncoding& enc);

struct TrainingEvent {
  double loss = 0.0;
  std::size_t buffer_size = 0;
};

/// One UE's learner: CNN feature extractor + per-channel linear Thompson sampling.
class Agent {
 public:
  using Vector = Eigen::VectorXd;

  Agent(const AgentConfig& cfg, Rng init_rng, Rng rng);

  /// Channels to transmit on (ascending, never empty).
  std::vector<int> select_superaction(const nn::Context& context);

  /// Stores one (context, channel, reward) sample per chosen channel and folds each into the
  /// posterior. Counts as one decision epoch.
  void observe(const nn::Context& context, std::span<const int> channels, std::span<const double> rewards);

  /// Retrains the network and rebuilds the posteriors once `retrain_interval` decisions accumulated.
  std::optional<TrainingEvent> maybe_retrain();

  const AgentConfig& config() const { return cfg_; }
  const nn::NetWeights& weights() const { return weights_; }
  nn::NetWeights& weights() { return weights_; }
  const LinearThompson<double>& lts() const { return lts_; }
  LinearThompson<double>& lts() { return lts_; }
  const std::deque<nn::Sample>& buffer() const { return buffer_; }
  int decisions_since_train() const { return decisions_since_train_; }
  long total_decisions() const { return total_decisions_; }
  Vector latent(const nn::Context& context) const;

 private:
  AgentConfig cfg_;
  nn::NetWeights weights_;
  nn::AdamState adam_;
  LinearThompson<double> lts_;
  std::deque<nn::Sample> buffer_;
  int decisions_since_train_ = 0;
  long total_decisions_ = 0;
  Rng rng_;
};

/// Threshold rule: {k : scores[k] > threshold}; falls back to the single best channel.
std::vector<int> threshold_superaction(const Eigen::VectorXd& scores, double threshold);
/// argmax with ties broken by the lowest index.
int argmax_channel(const Eigen::VectorXd& scores);

}  // namespace disnets
