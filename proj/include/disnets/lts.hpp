#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "disnets/rng.hpp"

namespace disnets {

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Scalar>
struct LtsConfig {
  int num_actions = 12;
  int latent_dim = 10;
  Scalar prior_scale = Scalar(0.25);  // λ
  Scalar noise_a0 = Scalar(6);
  Scalar noise_b0 = Scalar(6);
  Scalar variance_decay = Scalar(0.9999);  // γ

  void validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
      if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
    };
    require(num_actions >= 1, "num_actions", "must be >= 1");
    require(latent_dim >= 1, "latent_dim", "must be >= 1");
    require(prior_scale > 0, "prior_scale", "must be > 0");
    require(noise_a0 > 1, "noise_a0", "must be > 1");
    require(noise_b0 > 0, "noise_b0", "must be > 0");
    require(variance_decay > 0 && variance_decay <= 1, "variance_decay", "must lie in (0, 1]");
  }
};

/// Normal–Inverse-Gamma posterior of one action's linear reward model.
template <class Scalar>
struct ActionPosterior {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix precision;    // λI + Σ z zᵀ
  Vector cross;        // Σ z r
  Vector mean;         // precision⁻¹ · cross
  long count = 0;
  Scalar a = 0;
  Scalar b = 0;
  Eigen::LLT<Matrix> chol;  // of `precision`, refreshed on every update
};

/// Bayesian linear Thompson sampling over K actions sharing a d-dimensional feature.
template <class Scalar>
class LinearThompson {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Observation {
    Vector z;
    int action = 0;
    Scalar reward = 0;
  };

  explicit LinearThompson(const LtsConfig<Scalar>& cfg) : cfg_(cfg) {
    cfg_.validate();
    reset();
  }

  const LtsConfig<Scalar>& config() const { return cfg_; }
  const ActionPosterior<Scalar>& action(int k) const { return actions_.at(static_cast<std::size_t>(k)); }
  Scalar decay_multiplier() const { return decay_; }
  void set_decay_multiplier(Scalar g) { decay_ = g; }

  /// One draw of every β_k; the noise variance drawn from IG(a_k, b_k) is scaled by the
  /// current decay multiplier, which then advances by γ.
  std::vector<Vector> sample_betas(Rng& rng) {
    std::vector<Vector> betas;
    betas.reserve(actions_.size());
    std::normal_distribution<Scalar> gauss(Scalar(0), Scalar(1));
    for (const auto& post : actions_) {
      if (post.chol.info() != Eigen::Success) throw NumericalFailure("precision matrix is not positive definite");
      std::gamma_distribution<Scalar> gamma(post.a, Scalar(1));
      const Scalar nu2 = post.b / gamma(rng) * decay_;
      Vector eps(cfg_.latent_dim);
      for (int i = 0; i < cfg_.latent_dim; ++i) eps[i] = gauss(rng);
      // precision = L Lᵀ, so L⁻ᵀ ε has covariance precision⁻¹.
      betas.push_back(post.mean + std::sqrt(nu2) * post.chol.matrixU().solve(eps));
    }
    decay_ *= cfg_.variance_decay;
    return betas;
  }

  void update(const Vector& z, int k, Scalar r) {
    auto& post = actions_.at(static_cast<std::size_t>(k));
    const Scalar quad_old = post.mean.dot(post.cross);
    post.precision.noalias() += z * z.transpose();
    post.cross += r * z;
    post.chol.compute(post.precision);
    if (post.chol.info() != Eigen::Success) throw NumericalFailure("precision matrix lost positive definiteness");
    post.mean = post.chol.solve(post.cross);
    const Scalar quad_new = post.mean.dot(post.cross);
    ++post.count;
    post.a += Scalar(0.5);
    post.b += Scalar(0.5) * (r * r + quad_old - quad_new);
    if (post.b < cfg_.noise_b0) post.b = cfg_.noise_b0;  // exact arithmetic keeps b >= b0
  }

  /// Fresh prior, then every observation in order; the decay multiplier is kept.
  void rebuild(const std::vector<Observation>& history) {
    const Scalar g = decay_;
    reset();
    decay_ = g;
    for (const auto& obs : history) update(obs.z, obs.action, obs.reward);
  }

  Vector mean_scores(const Vector& z) const {
    Vector s(actions_.size());
    for (std::size_t k = 0; k < actions_.size(); ++k) s[static_cast<Eigen::Index>(k)] = z.dot(actions_[k].mean);
    return s;
  }

 private:
  void reset() {
    actions_.assign(static_cast<std::size_t>(cfg_.num_actions), {});
    for (auto& post : actions_) {
      post.precision = cfg_.prior_scale * Matrix::Identity(cfg_.latent_dim, cfg_.latent_dim);
      post.cross = Vector::Zero(cfg_.latent_dim);
      post.mean = Vector::Zero(cfg_.latent_dim);
      post.count = 0;
      post.a = cfg_.noise_a0;
      post.b = cfg_.noise_b0;
      post.chol.compute(post.precision);
    }
    decay_ = Scalar(1);
  }

  LtsConfig<Scalar> cfg_;
  std::vector<ActionPosterior<Scalar>> actions_;
  Scalar decay_ = Scalar(1);
};

}  // namespace disnets
