#include "disnets/agent.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace disnets {

void AgentConfig::sync_dimensions() {
  net.input_height = history_rows + (queue_row ? 1 : 0);
  net.input_width = num_channels;
  net.output_dim = num_channels;
  lts.num_actions = num_channels;
  lts.latent_dim = net.latent_dim;
}

void AgentConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
  };
  require(num_channels >= 1, "num_channels", "must be >= 1");
  require(history_rows >= 1, "history_rows", "must be >= 1");
  require(buffer_capacity >= 1, "buffer_capacity", "must be >= 1");
  require(retrain_interval >= 1, "retrain_interval", "must be >= 1");
  require(net.input_width == num_channels && net.output_dim == num_channels, "num_channels",
          "network dimensions out of sync");
  require(lts.latent_dim == net.latent_dim, "latent_dim", "posterior and network disagree");
  net.validate();
  lts.validate();
}

void ContextWindow::push(FciRecord record) {
  records_.push_back(std::move(record));
  while (static_cast<int>(records_.size()) > rows_) records_.pop_front();
}

double encode_outcome(int code, int own_ue, const ContextEncoding& enc) {
  switch (code) {
    case fci::kUnused:
      return enc.unused;
    case fci::kOutage:
      return enc.outage;
    case fci::kCollision:
      return enc.collision;
    default:
      return fci::ue_of(code) == own_ue ? enc.own_success : enc.other_success;
  }
}

nn::Context ContextWindow::encode(int own_ue, int num_channels, const ContextEncoding& enc) const {
  nn::Context ctx = nn::Context::Zero(rows_, num_channels);
  const int offset = rows_ - static_cast<int>(records_.size());
  for (int r = 0; r < static_cast<int>(records_.size()); ++r) {
    const auto& outcomes = records_[static_cast<std::size_t>(r)].outcomes;
    for (int k = 0; k < num_channels && k < static_cast<int>(outcomes.size()); ++k) {
      ctx(offset + r, k) = encode_outcome(outcomes[static_cast<std::size_t>(k)], own_ue, enc);
    }
  }
  return ctx;
}

int argmax_channel(const Eigen::VectorXd& scores) {
  int best = 0;
  for (int k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

std::vector<int> threshold_superaction(const Eigen::VectorXd& scores, double threshold) {
  std::vector<int> chosen;
  for (int k = 0; k < scores.size(); ++k) {
    if (scores[k] > threshold) chosen.push_back(k);
  }
  if (chosen.empty()) chosen.push_back(argmax_channel(scores));
  return chosen;
}

Agent::Agent(const AgentConfig& cfg, Rng init_rng, Rng rng)
    : cfg_(cfg), lts_(cfg.lts), rng_(std::move(rng)) {
  cfg_.validate();
  weights_ = nn::init_weights(cfg_.net, init_rng);
  adam_ = nn::AdamState::zeros(cfg_.net);
}

Agent::Vector Agent::latent(const nn::Context& context) const {
  return nn::forward(cfg_.net, weights_, context).z;
}

std::vector<int> Agent::select_superaction(const nn::Context& context) {
  const Vector z = latent(context);
  const auto betas = lts_.sample_betas(rng_);
  Eigen::VectorXd scores(cfg_.num_channels);
  for (int k = 0; k < cfg_.num_channels; ++k) scores[k] = z.dot(betas[static_cast<std::size_t>(k)]);
  if (cfg_.mode == AgentMode::NltsSingle) return {argmax_channel(scores)};
  return threshold_superaction(scores, cfg_.threshold);
}

void Agent::observe(const nn::Context& context, std::span<const int> channels, std::span<const double> rewards) {
  if (channels.empty()) return;
  if (channels.size() != rewards.size()) throw std::invalid_argument("rewards must cover exactly the chosen channels");
  const Vector z = latent(context);
  auto shared = std::make_shared<const nn::Context>(context);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    buffer_.push_back({shared, channels[i], rewards[i]});
    if (static_cast<int>(buffer_.size()) > cfg_.buffer_capacity) buffer_.pop_front();
    lts_.update(z, channels[i], rewards[i]);
  }
  ++decisions_since_train_;
  ++total_decisions_;
}

std::optional<TrainingEvent> Agent::maybe_retrain() {
  if (decisions_since_train_ < cfg_.retrain_interval) return std::nullopt;
  decisions_since_train_ = 0;
  const std::vector<nn::Sample> samples(buffer_.begin(), buffer_.end());
  TrainingEvent ev;
  ev.buffer_size = samples.size();
  ev.loss = nn::train_update(cfg_.net, weights_, adam_, samples, rng_);

  // Re-embed every stored context with the new weights and replay it into a fresh posterior.
  std::vector<LinearThompson<double>::Observation> history;
  history.reserve(samples.size());
  const nn::Context* last = nullptr;
  Vector z;
  for (const auto& s : samples) {
    if (s.context.get() != last) {
      z = latent(*s.context);
      last = s.context.get();
    }
    history.push_back({z, s.action, s.reward});
  }
  lts_.rebuild(history);
  return ev;
}

}  // namespace disnets
