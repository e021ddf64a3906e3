#include "disnets/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace disnets::nn {

namespace {

inline double leaky(double x, double slope) { return x > 0.0 ? x : slope * x; }
inline double leaky_grad(double x, double slope) { return x > 0.0 ? 1.0 : slope; }

// Zero "same" padding: output extent equals input extent; even kernels pad one less before.
void conv_same_forward(const double* in, int channels, int height, int width, const double* kernel,
                       const double* bias, int filters, int k, double* out) {
  const int pad = (k - 1) / 2;
  for (int f = 0; f < filters; ++f) {
    double* out_f = out + static_cast<std::ptrdiff_t>(f) * height * width;
    std::fill(out_f, out_f + height * width, bias[f]);
    for (int c = 0; c < channels; ++c) {
      const double* in_c = in + static_cast<std::ptrdiff_t>(c) * height * width;
      const double* ker = kernel + static_cast<std::ptrdiff_t>(f * channels + c) * k * k;
      for (int u = 0; u < k; ++u) {
        const int di = u - pad;
        const int i_lo = std::max(0, -di);
        const int i_hi = std::min(height, height - di);
        for (int v = 0; v < k; ++v) {
          const int dj = v - pad;
          const int j_lo = std::max(0, -dj);
          const int j_hi = std::min(width, width - dj);
          const double wgt = ker[u * k + v];
          for (int i = i_lo; i < i_hi; ++i) {
            const double* src = in_c + (i + di) * width + dj;
            double* dst = out_f + i * width;
            for (int j = j_lo; j < j_hi; ++j) dst[j] += wgt * src[j];
          }
        }
      }
    }
  }
}

// Accumulates kernel/bias gradients and (optionally) the input gradient.
void conv_same_backward(const double* in, int channels, int height, int width, const double* kernel, int filters,
                        int k, const double* d_out, double* d_kernel, double* d_bias, double* d_in) {
  const int pad = (k - 1) / 2;
  for (int f = 0; f < filters; ++f) {
    const double* g = d_out + static_cast<std::ptrdiff_t>(f) * height * width;
    double bsum = 0.0;
    for (int idx = 0; idx < height * width; ++idx) bsum += g[idx];
    d_bias[f] += bsum;
    for (int c = 0; c < channels; ++c) {
      const double* in_c = in + static_cast<std::ptrdiff_t>(c) * height * width;
      const double* ker = kernel + static_cast<std::ptrdiff_t>(f * channels + c) * k * k;
      double* dker = d_kernel + static_cast<std::ptrdiff_t>(f * channels + c) * k * k;
      double* din_c = d_in ? d_in + static_cast<std::ptrdiff_t>(c) * height * width : nullptr;
      for (int u = 0; u < k; ++u) {
        const int di = u - pad;
        const int i_lo = std::max(0, -di);
        const int i_hi = std::min(height, height - di);
        for (int v = 0; v < k; ++v) {
          const int dj = v - pad;
          const int j_lo = std::max(0, -dj);
          const int j_hi = std::min(width, width - dj);
          double acc = 0.0;
          const double wgt = ker[u * k + v];
          for (int i = i_lo; i < i_hi; ++i) {
            const double* src = in_c + (i + di) * width + dj;
            const double* gi = g + i * width;
            for (int j = j_lo; j < j_hi; ++j) acc += gi[j] * src[j];
            if (din_c) {
              double* dsrc = din_c + (i + di) * width + dj;
              for (int j = j_lo; j < j_hi; ++j) dsrc[j] += wgt * gi[j];
            }
          }
          dker[u * k + v] += acc;
        }
      }
    }
  }
}

void maxpool_forward(const double* in, int channels, int height, int width, int pool, int out_h, int out_w,
                     double* out, Eigen::Index* arg) {
  for (int c = 0; c < channels; ++c) {
    const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(c) * height * width;
    for (int oi = 0; oi < out_h; ++oi) {
      for (int oj = 0; oj < out_w; ++oj) {
        const int i_end = std::min(height, oi * pool + pool);
        const int j_end = std::min(width, oj * pool + pool);
        std::ptrdiff_t best = base + static_cast<std::ptrdiff_t>(oi * pool) * width + oj * pool;
        for (int i = oi * pool; i < i_end; ++i) {
          for (int j = oj * pool; j < j_end; ++j) {
            const std::ptrdiff_t idx = base + static_cast<std::ptrdiff_t>(i) * width + j;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const std::ptrdiff_t o = (static_cast<std::ptrdiff_t>(c) * out_h + oi) * out_w + oj;
        out[o] = in[best];
        arg[o] = best;
      }
    }
  }
}

}  // namespace

void NetConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ShapeMismatch(what);
  };
  require(input_height >= 1 && input_width >= 1, "input dimensions must be positive");
  require(conv1_filters >= 1 && conv2_filters >= 1, "filter counts must be positive");
  require(conv1_kernel >= 1 && conv2_kernel >= 1 && pool >= 1, "kernel and pool sizes must be positive");
  require(h2() >= 1 && w2() >= 1, "input " + std::to_string(input_height) + "x" + std::to_string(input_width) +
                                      " collapses below one cell after the second pooling stage");
  require(latent_dim >= 1 && output_dim >= 1, "layer widths must be positive");
  require(epochs_per_update >= 0 && minibatch_size >= 1, "invalid training schedule");
}

ParamLayout::ParamLayout(const NetConfig& cfg) {
  Eigen::Index at = 0;
  auto take = [&at](Eigen::Index n) {
    const Eigen::Index start = at;
    at += n;
    return start;
  };
  conv1_w = take(static_cast<Eigen::Index>(cfg.conv1_filters) * cfg.conv1_kernel * cfg.conv1_kernel);
  conv1_b = take(cfg.conv1_filters);
  conv2_w = take(static_cast<Eigen::Index>(cfg.conv2_filters) * cfg.conv1_filters * cfg.conv2_kernel * cfg.conv2_kernel);
  conv2_b = take(cfg.conv2_filters);
  latent_w = take(static_cast<Eigen::Index>(cfg.latent_dim) * cfg.flat_dim());
  latent_b = take(cfg.latent_dim);
  out_w = take(static_cast<Eigen::Index>(cfg.output_dim) * cfg.latent_dim);
  out_b = take(cfg.output_dim);
  total = at;
}

NetWeights NetWeights::zeros(const NetConfig& cfg) {
  return NetWeights{Eigen::VectorXd::Zero(ParamLayout(cfg).total)};
}

NetWeights::MatMap NetWeights::latent_w(const NetConfig& cfg) {
  return MatMap(params.data() + ParamLayout(cfg).latent_w, cfg.latent_dim, cfg.flat_dim());
}
NetWeights::ConstMatMap NetWeights::latent_w(const NetConfig& cfg) const {
  return ConstMatMap(params.data() + ParamLayout(cfg).latent_w, cfg.latent_dim, cfg.flat_dim());
}
NetWeights::MatMap NetWeights::out_w(const NetConfig& cfg) {
  return MatMap(params.data() + ParamLayout(cfg).out_w, cfg.output_dim, cfg.latent_dim);
}
NetWeights::ConstMatMap NetWeights::out_w(const NetConfig& cfg) const {
  return ConstMatMap(params.data() + ParamLayout(cfg).out_w, cfg.output_dim, cfg.latent_dim);
}

NetWeights init_weights(const NetConfig& cfg, Rng& rng) {
  cfg.validate();
  const ParamLayout lay(cfg);
  NetWeights w = NetWeights::zeros(cfg);
  auto he_uniform = [&](Eigen::Index offset, Eigen::Index count, int fan_in) {
    const double limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Eigen::Index i = 0; i < count; ++i) w.params[offset + i] = u(rng);
  };
  he_uniform(lay.conv1_w, lay.conv1_b - lay.conv1_w, cfg.conv1_kernel * cfg.conv1_kernel);
  he_uniform(lay.conv2_w, lay.conv2_b - lay.conv2_w, cfg.conv1_filters * cfg.conv2_kernel * cfg.conv2_kernel);
  he_uniform(lay.latent_w, lay.latent_b - lay.latent_w, cfg.flat_dim());
  he_uniform(lay.out_w, lay.out_b - lay.out_w, cfg.latent_dim);
  return w;
}

void forward(const NetConfig& cfg, const NetWeights& w, const Context& context, ForwardCache& c) {
  if (context.rows() != cfg.input_height || context.cols() != cfg.input_width) {
    throw ShapeMismatch("context is " + std::to_string(context.rows()) + "x" + std::to_string(context.cols()) +
                        ", network expects " + std::to_string(cfg.input_height) + "x" +
                        std::to_string(cfg.input_width));
  }
  const ParamLayout lay(cfg);
  const double* p = w.params.data();
  const int H0 = cfg.input_height, W0 = cfg.input_width;
  const int H1 = cfg.h1(), W1 = cfg.w1(), H2 = cfg.h2(), W2 = cfg.w2();
  const int F1 = cfg.conv1_filters, F2 = cfg.conv2_filters;

  // Row-major copy of the single input channel.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> input = context;

  c.a1_pre.resize(F1 * H0 * W0);
  conv_same_forward(input.data(), 1, H0, W0, p + lay.conv1_w, p + lay.conv1_b, F1, cfg.conv1_kernel, c.a1_pre.data());
  c.a1 = c.a1_pre.unaryExpr([&](double x) { return leaky(x, cfg.leaky_slope); });
  c.p1.resize(F1 * H1 * W1);
  c.p1_arg.resize(c.p1.size());
  maxpool_forward(c.a1.data(), F1, H0, W0, cfg.pool, H1, W1, c.p1.data(), c.p1_arg.data());

  c.a2_pre.resize(F2 * H1 * W1);
  conv_same_forward(c.p1.data(), F1, H1, W1, p + lay.conv2_w, p + lay.conv2_b, F2, cfg.conv2_kernel, c.a2_pre.data());
  c.a2 = c.a2_pre.unaryExpr([&](double x) { return leaky(x, cfg.leaky_slope); });
  c.p2.resize(F2 * H2 * W2);
  c.p2_arg.resize(c.p2.size());
  maxpool_forward(c.a2.data(), F2, H1, W1, cfg.pool, H2, W2, c.p2.data(), c.p2_arg.data());

  const Eigen::Map<const Eigen::VectorXd> lat_b(p + lay.latent_b, cfg.latent_dim);
  c.latent_pre = w.latent_w(cfg) * c.p2 + lat_b;
  c.z = c.latent_pre.unaryExpr([&](double x) { return leaky(x, cfg.leaky_slope); });
  const Eigen::Map<const Eigen::VectorXd> out_b(p + lay.out_b, cfg.output_dim);
  c.outputs = w.out_w(cfg) * c.z + out_b;
}

ForwardResult forward(const NetConfig& cfg, const NetWeights& w, const Context& context) {
  ForwardCache cache;
  forward(cfg, w, context, cache);
  return {std::move(cache.z), std::move(cache.outputs)};
}

double loss(const NetConfig& cfg, const NetWeights& w, std::span<const Sample> batch) {
  if (batch.empty()) return 0.0;
  ForwardCache cache;
  double total = 0.0;
  for (const auto& s : batch) {
    forward(cfg, w, *s.context, cache);
    const double err = cache.outputs[s.action] - s.reward;
    total += err * err;
  }
  return total / static_cast<double>(batch.size());
}

double accumulate_gradient(const NetConfig& cfg, const NetWeights& w, std::span<const Sample* const> batch,
                           NetWeights& grad, ForwardCache& c) {
  const ParamLayout lay(cfg);
  const double* p = w.params.data();
  double* g = grad.params.data();
  const int H0 = cfg.input_height, W0 = cfg.input_width;
  const int H1 = cfg.h1(), W1 = cfg.w1();
  const int F1 = cfg.conv1_filters, F2 = cfg.conv2_filters;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  auto g_latent_w = grad.latent_w(cfg);
  auto g_out_w = grad.out_w(cfg);
  Eigen::Map<Eigen::VectorXd> g_latent_b(g + lay.latent_b, cfg.latent_dim);
  Eigen::Map<Eigen::VectorXd> g_out_b(g + lay.out_b, cfg.output_dim);
  const auto latent_w = w.latent_w(cfg);
  const auto out_w = w.out_w(cfg);

  Eigen::VectorXd d_p2, d_a2, d_p1, d_a1;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> input;
  double total = 0.0;
  for (const Sample* s : batch) {
    forward(cfg, w, *s->context, c);
    const double err = c.outputs[s->action] - s->reward;
    total += err * err;
    const double d_out = 2.0 * err * inv_n;
    if (d_out == 0.0) continue;

    // Output layer: only the chosen action's row carries gradient.
    g_out_w.row(s->action) += d_out * c.z.transpose();
    g_out_b[s->action] += d_out;
    Eigen::VectorXd d_lat = d_out * out_w.row(s->action).transpose();
    for (Eigen::Index i = 0; i < d_lat.size(); ++i) d_lat[i] *= leaky_grad(c.latent_pre[i], cfg.leaky_slope);

    g_latent_w.noalias() += d_lat * c.p2.transpose();
    g_latent_b += d_lat;
    d_p2.noalias() = latent_w.transpose() * d_lat;

    d_a2.setZero(c.a2.size());
    for (Eigen::Index i = 0; i < d_p2.size(); ++i) d_a2[c.p2_arg[i]] += d_p2[i];
    for (Eigen::Index i = 0; i < d_a2.size(); ++i) d_a2[i] *= leaky_grad(c.a2_pre[i], cfg.leaky_slope);

    d_p1.setZero(c.p1.size());
    conv_same_backward(c.p1.data(), F1, H1, W1, p + lay.conv2_w, F2, cfg.conv2_kernel, d_a2.data(), g + lay.conv2_w,
                       g + lay.conv2_b, d_p1.data());

    d_a1.setZero(c.a1.size());
    for (Eigen::Index i = 0; i < d_p1.size(); ++i) d_a1[c.p1_arg[i]] += d_p1[i];
    for (Eigen::Index i = 0; i < d_a1.size(); ++i) d_a1[i] *= leaky_grad(c.a1_pre[i], cfg.leaky_slope);

    input = *s->context;
    conv_same_backward(input.data(), 1, H0, W0, p + lay.conv1_w, F1, cfg.conv1_kernel, d_a1.data(), g + lay.conv1_w,
                       g + lay.conv1_b, nullptr);
  }
  return total * inv_n;
}

NetWeights backward(const NetConfig& cfg, const NetWeights& w, std::span<const Sample> batch) {
  NetWeights grad = NetWeights::zeros(cfg);
  if (batch.empty()) return grad;
  std::vector<const Sample*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& s : batch) ptrs.push_back(&s);
  ForwardCache scratch;
  accumulate_gradient(cfg, w, ptrs, grad, scratch);
  return grad;
}

AdamState AdamState::zeros(const NetConfig& cfg) {
  const auto n = ParamLayout(cfg).total;
  return AdamState{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
}

void adam_step(const AdamConfig& cfg, NetWeights& w, AdamState& s, const NetWeights& grad) {
  ++s.step;
  s.m = cfg.beta1 * s.m + (1.0 - cfg.beta1) * grad.params;
  s.v = cfg.beta2 * s.v + (1.0 - cfg.beta2) * grad.params.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(s.step));
  w.params.array() -= cfg.learning_rate * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + cfg.epsilon);
}

double train_update(const NetConfig& cfg, NetWeights& w, AdamState& adam, std::span<const Sample> buffer, Rng& rng) {
  if (buffer.empty() || cfg.epochs_per_update == 0) return 0.0;
  std::vector<std::size_t> order(buffer.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  NetWeights grad = NetWeights::zeros(cfg);
  ForwardCache scratch;
  std::vector<const Sample*> batch;
  batch.reserve(static_cast<std::size_t>(cfg.minibatch_size));
  double loss_sum = 0.0;
  long batches = 0;
  for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.minibatch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.minibatch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(&buffer[order[i]]);
      grad.params.setZero();
      loss_sum += accumulate_gradient(cfg, w, batch, grad, scratch);
      ++batches;
      adam_step(cfg.adam, w, adam, grad);
    }
  }
  return loss_sum / static_cast<double>(batches);
}

}  // namespace disnets::nn
