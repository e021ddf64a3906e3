#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "disnets/traffic.hpp"
#include "oracles.hpp"

using namespace disnets;

namespace {

// One line whose machines activate in index order; one UE per machine.
FactoryLayout line_layout(int machines, int lines = 1) {
  FactoryLayout l;
  l.floor_length_m = l.floor_width_m = 20;
  l.floor_height_m = 4;
  l.machine_side_m = 3;
  for (int line = 0; line < lines; ++line) {
    std::vector<int> order;
    for (int i = 0; i < machines; ++i) {
      const int m = line * machines + i;
      l.machine_centers.emplace_back(2 + 5 * i, 2 + 5 * line, 1.5);
      l.line_of_machine.push_back(line);
      order.push_back(m);
      l.ue_positions.emplace_back(2 + 5 * i, 2 + 5 * line, 3);
      l.ue_machine.push_back(m);
    }
    l.activation_order.push_back(order);
  }
  l.gnb_position = Point3(10, 10, 4);
  return l;
}


}  // namespace

TEST_CASE("activation schedule cycles through each line") {
  const auto l = line_layout(2);
  const auto s = build_schedule(l, 8e-3, 24e-3);
  REQUIRE(s.per_line.size() == 1);
  const auto& e = s.per_line[0];
  REQUIRE(e.size() == 3);
  CHECK(e[0].machine == 0);
  CHECK(e[1].machine == 1);
  CHECK(e[2].machine == 0);
  CHECK(e[1].start == doctest::Approx(8e-3));
  CHECK(e[2].end == doctest::Approx(24e-3));
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i].start == e[i - 1].end);

  const auto four = line_layout(4, 4);
  CHECK(build_schedule(four, 8e-3, 0.1).active_at(0).size() == 4);
  for (double t : {0.0, 0.013, 0.0801}) {
    for (int m = 0; m < four.num_machines(); ++m) {
      const auto active = build_schedule(four, 8e-3, 0.1).active_at(t);
      CHECK(machine_active(four, 8e-3, m, t) == (std::find(active.begin(), active.end(), m) != active.end()));
    }
  }

  const auto single = line_layout(1);
  const auto s1 = build_schedule(single, 8e-3, 0.05);
  REQUIRE(s1.per_line[0].size() == 1);
  CHECK(s1.per_line[0][0].end == doctest::Approx(0.05));
  CHECK(machine_active(single, 8e-3, 0, 0.049));
}

TEST_CASE("UE-specific bounds") {
  Rng rng(1);
  CHECK(draw_ue_bounds(rng, 2e-3, 2e-3) == std::make_pair(2e-3, 2e-3));
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto [lo, hi] = draw_ue_bounds(rng, 2e-3, 6e-3);
    REQUIRE(2e-3 <= lo);
    REQUIRE(lo <= hi);
    REQUIRE(hi <= 6e-3);
    sum += lo;
  }
  CHECK(sum / n == doctest::Approx(4e-3).epsilon(0.0025));
}

TEST_CASE("inter-arrival models") {
  Rng rng(2);
  UeTrafficState st;
  TrafficConfig cfg;
  cfg.model = TrafficModel::Periodic;
  cfg.period_s = 2e-3;
  for (int i = 0; i < 5; ++i) CHECK(next_interarrival(st, cfg, rng) == 2e-3);

  cfg.model = TrafficModel::UniformAperiodic;
  cfg.t_min_s = cfg.t_max_s = 4e-3;
  CHECK(next_interarrival(st, cfg, rng) == 4e-3);

  cfg.t_min_s = 2e-3;
  cfg.t_max_s = 6e-3;
  std::vector<double> xs(100000);
  for (auto& x : xs) {
    x = next_interarrival(st, cfg, rng);
    REQUIRE(x >= 2e-3);
    REQUIRE(x <= 6e-3);
  }
  double mean = 0;
  for (double x : xs) mean += x / xs.size();
  CHECK(mean == doctest::Approx(4e-3).epsilon(0.0025));
  CHECK(oracle::ks_uniform(xs, 2e-3, 6e-3) < oracle::ks_critical_001(xs.size()));

  cfg.model = TrafficModel::UeSpecificAperiodic;
  st.t_min_n = 3e-3;
  st.t_max_n = 3.5e-3;
  for (int i = 0; i < 100; ++i) {
    const double x = next_interarrival(st, cfg, rng);
    CHECK(x >= 3e-3);
    CHECK(x <= 3.5e-3);
  }
}

TEST_CASE("periodic arrivals restart at each activation") {
  const auto l = line_layout(2);
  TrafficConfig cfg;
  cfg.model = TrafficModel::Periodic;
  cfg.period_s = 2e-3;
  TrafficGenerator gen(l, cfg, 24e-3, 1);
  const auto first = gen.arrivals_until(0, 2.1e-3);
  REQUIRE(first.size() == 1);
  CHECK(first[0].t_gen == doctest::Approx(2e-3));
  CHECK(first[0].total_bytes == 688);
  CHECK(first[0].remaining_bytes == 688);

  const auto rest = gen.arrivals_until(0, 24e-3);
  std::vector<double> times;
  for (const auto& p : rest) times.push_back(p.t_gen * 1e3);
  // [0, 8): 2, 4, 6; arrival at 8 belongs to the next (inactive) window. [16, 24): 18, 20, 22.
  const std::vector<double> want = {4, 6, 18, 20, 22};
  REQUIRE(times.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(times[i] == doctest::Approx(want[i]));

  const auto other = gen.arrivals_until(1, 24e-3);
  REQUIRE(other.size() == 3);
  CHECK(other.front().t_gen == doctest::Approx(10e-3));
}

TEST_CASE("no packet while the host machine is inactive") {
  const auto l = line_layout(3, 2);
  TrafficConfig cfg;
  for (auto model : {TrafficModel::UniformAperiodic, TrafficModel::UeSpecificAperiodic, TrafficModel::Mixed,
                     TrafficModel::Periodic}) {
    cfg.model = model;
    TrafficGenerator gen(l, cfg, 0.5, 7);
    for (int ue = 0; ue < l.num_ues(); ++ue) {
      double prev = -1;
      for (const auto& p : gen.arrivals_until(ue, 0.5)) {
        CHECK(machine_active(l, cfg.activation_period_s, l.ue_machine[ue], p.t_gen));
        CHECK(p.t_gen > prev);
        CHECK(p.t_gen < 0.5);
        prev = p.t_gen;
      }
    }
  }
}

TEST_CASE("traffic generation is deterministic and incremental") {
  const auto l = line_layout(4, 2);
  TrafficConfig cfg;
  TrafficGenerator a(l, cfg, 0.3, 5), b(l, cfg, 0.3, 5);
  const auto whole = a.arrivals_until(3, 0.3);
  std::vector<Packet> pieces;
  for (int su = 0; su * 116.67e-6 < 0.3; ++su) {
    for (auto& p : b.arrivals_in_su(3, su, 116.67e-6)) pieces.push_back(p);
  }
  REQUIRE(whole.size() == pieces.size());
  for (std::size_t i = 0; i < whole.size(); ++i) CHECK(whole[i].t_gen == pieces[i].t_gen);
}

TEST_CASE("traffic validation names the field") {
  TrafficConfig cfg;
  cfg.t_min_s = 0;
  CHECK_THROWS_WITH(cfg.validate(), doctest::Contains("t_min_ms"));
  cfg = {};
  cfg.model = TrafficModel::Periodic;
  cfg.period_s = -1;
  CHECK_THROWS_WITH(cfg.validate(), doctest::Contains("period_ms"));
}
