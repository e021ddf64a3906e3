#include <doctest.h>

#include <cmath>

#include "disnets/metrics.hpp"

using namespace disnets;

namespace {
MetricsLog log_with_latencies(const std::vector<double>& latencies, int undelivered = 0) {
  MetricsLog log;
  std::int64_t id = 0;
  for (double l : latencies) {
    PacketRecord p;
    p.id = id++;
    p.delivered = true;
    p.latency_s = l;
    log.packets.push_back(p);
  }
  for (int i = 0; i < undelivered; ++i) {
    PacketRecord p;
    p.id = id++;
    log.packets.push_back(p);
  }
  return log;
}
}  // namespace

TEST_CASE("reliability") {
  CHECK(reliability(log_with_latencies({0.5e-3, 0.5e-3}), 1e-3).value == 1.0);
  const auto empty = reliability(MetricsLog{}, 1e-3);
  CHECK(empty.value == 1.0);
  CHECK(empty.vacuous);
  std::vector<double> ten(8, 0.4e-3);
  ten.push_back(2e-3);
  ten.push_back(3e-3);
  CHECK(reliability(log_with_latencies(ten), 1e-3).value == doctest::Approx(0.8));
  // Undelivered packets count as failures; the mean covers delivered ones only.
  const auto censored = log_with_latencies({0.5e-3, 0.7e-3}, 2);
  CHECK(reliability(censored, 1e-3).value == 0.5);
  CHECK(reliability(censored, INFINITY).value == 0.5);
  CHECK(reliability(censored, 0.0).value == 0.0);
  CHECK(mean_latency(censored) == doctest::Approx(0.6e-3));
  CHECK(std::isnan(mean_latency(MetricsLog{})));
}

TEST_CASE("censored mean charges undelivered packets their age at the horizon") {
  auto log = log_with_latencies({0.5e-3, 0.7e-3}, 2);
  log.num_sus = 30;  // horizon 3.5 ms
  log.packets[2].t_gen = 1.5e-3;
  log.packets[3].t_gen = 3.0e-3;
  CHECK(censored_mean_latency(log) == doctest::Approx((0.5e-3 + 0.7e-3 + 2.0e-3 + 0.5e-3) / 4));
  CHECK(censored_mean_latency(log_with_latencies({0.5e-3, 0.7e-3})) == doctest::Approx(0.6e-3));
  CHECK(std::isnan(censored_mean_latency(MetricsLog{})));
}

TEST_CASE("collision rate and reward curve") {
  MetricsLog log;
  log.num_channels = 4;
  log.sus.resize(10);
  log.sus[2].collisions = 2;
  log.sus[7].collisions = 2;
  CHECK(log.total_collisions() == 4);
  CHECK(collision_rate(log) == doctest::Approx(0.1));
  for (int i = 0; i < 250; ++i) log.decisions.push_back({i, 0, 1, i < 100 ? -1.0 : 1.0, i});
  const auto curve = reward_curve(log, 100);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].x == 100);
  CHECK(curve[0].value == -1.0);
  CHECK(curve[1].value == 1.0);
}

TEST_CASE("loss curve averages UEs retraining together") {
  MetricsLog log;
  log.training.push_back({100, 0.01, 0, 2.0, 100});
  log.training.push_back({100, 0.01, 1, 4.0, 100});
  log.training.push_back({200, 0.02, 0, 1.0, 200});
  const auto curve = loss_curve(log);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].value == 3.0);
  CHECK(curve[1].x == doctest::Approx(log.timing.su_start(200)));
}

TEST_CASE("channel usage CDF") {
  MetricsLog log;
  for (int id = 0; id < 30; ++id) {
    PacketRecord p;
    p.id = id;
    p.ue = id % 2;
    log.packets.push_back(p);
    log.decisions.push_back({id, p.ue, 2, 0.5, id});
  }
  auto cdf = channel_usage_cdf(log, 10, 12);
  REQUIRE(cdf.size() == 13);
  CHECK(cdf[1].probability == 0.0);
  CHECK(cdf[2].probability == 1.0);
  CHECK(cdf[12].probability == 1.0);

  for (int i = 0; i < 30; ++i) log.decisions[i].num_channels = 1 + i % 5;
  cdf = channel_usage_cdf(log, 10, 12);
  for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i].probability >= cdf[i - 1].probability);
  CHECK(cdf.back().probability == 1.0);
  // Only the last 10 packets of each UE (ids 10..29) count.
  CHECK(cdf[1].probability == doctest::Approx(4.0 / 20));
}

TEST_CASE("FCI and DCI sizes") {
  CHECK(fci_size_bits(100, 500) == 900);
  CHECK(fci_size_bits(1, 1) == 2);
  CHECK(fci_size_bits_exact(100, 500) == doctest::Approx(100 * std::log2(503.0)).epsilon(1e-12));
  CHECK(fci_size_bits_exact(100, 500, FciSizeVariant::NPlus2) == doctest::Approx(100 * std::log2(502.0)).epsilon(1e-12));
  CHECK(dci_size_bits(60, 100, false) == 1020);
  CHECK(dci_size_bits(0, 100, false) == 0);
  CHECK(dci_size_bits_exact(60, 100, false) == doctest::Approx(998.6).epsilon(1e-4));
  CHECK(dci_size_bits(60, 100, true) == 60 * (7 + 37));
  for (int k = 10; k <= 100; k += 10) {
    for (int n = 1; n < 600; n += 37) {
      CHECK(fci_size_bits(k, n + 1) >= fci_size_bits(k, n));
      CHECK(fci_size_bits(k + 10, n) >= fci_size_bits(k, n));
    }
    for (int na : {0, 20, 40, 60}) CHECK(dci_size_bits(na, k, true) >= dci_size_bits(na, k, false));
  }
  const auto r = overhead(100, 500, 60);
  CHECK(r.fci_bits == 900);
  CHECK(r.dci_m_bits == 1020);
}
