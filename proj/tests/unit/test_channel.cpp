#include <doctest.h>

#include <cmath>

#include "disnets/channel.hpp"

using namespace disnets;

TEST_CASE("InF path loss") {
  CHECK(path_loss_db(1.0, true, 3.5e9, 0) == doctest::Approx(42.177).epsilon(1e-5));
  CHECK(path_loss_db(10.0, false, 3.5e9, 0) == doctest::Approx(69.381).epsilon(1e-5));
  CHECK(path_loss_db(0.2, true, 3.5e9, 0) == path_loss_db(1.0, true, 3.5e9, 0));
  CHECK(path_loss_db(5, true, 3.5e9, 2.5) == doctest::Approx(path_loss_db(5, true, 3.5e9, 0) + 2.5));
  double prev_los = 0, prev_nlos = 0;
  for (double d = 1; d < 60; d += 0.37) {
    const double los = path_loss_db(d, true, 3.5e9, 0);
    const double nlos = path_loss_db(d, false, 3.5e9, 0);
    CHECK(nlos >= los);
    CHECK(los >= prev_los);
    CHECK(nlos >= prev_nlos);
    CHECK(path_loss_db(d, false, 3.5e9, 0, InfSubScenario::DenseLowBs) >= los);
    prev_los = los;
    prev_nlos = nlos;
  }
}

TEST_CASE("SNR over the full bandwidth") {
  RadioConfig radio;
  CHECK(radio.noise_power_w() == doctest::Approx(2.4023e-13).epsilon(1e-4));
  CHECK(snr_db(radio, 0.0) == doctest::Approx(119.19).epsilon(1e-4));

  const double pn_dbw = 10 * std::log10(radio.noise_power_w());
  for (double pl : {10.0, 55.5, 120.0}) {
    CHECK(std::abs(snr_db(radio, pl) - (radio.tx_power_dbm - 30 - pl - pn_dbw)) < 1e-9);
  }
  // PL equal to the transmit power cancels it: SNR = 1 / P_N.
  CHECK(std::abs(snr_db(radio, radio.tx_power_dbm - 30) - 10 * std::log10(1 / radio.noise_power_w())) < 1e-9);

  const double pl = path_loss_db(20.0, false, 3.5e9, 0);
  CHECK(pl == doctest::Approx(77.05).epsilon(1e-4));
  CHECK(snr_db(radio, pl) == doctest::Approx(42.14).epsilon(1e-4));
  CHECK(modulation_order(snr_db(radio, pl), radio.snr_threshold_db) == 8);
  CHECK(snr_db(radio, 80) > snr_db(radio, 81));
}

TEST_CASE("modulation table") {
  CHECK(modulation_order(-10, -5) == 0);
  CHECK(modulation_order(-5, -5) == 2);
  CHECK(modulation_order(0, -5) == 2);
  CHECK(modulation_order(5, -5) == 4);
  CHECK(modulation_order(15, -5) == 6);
  CHECK(modulation_order(25, -5) == 8);
  CHECK(modulation_order(42.14, -5) == 8);
  int prev = 0;
  for (double s = -20; s < 40; s += 0.25) {
    CHECK(modulation_order(s, -5) >= prev);
    prev = modulation_order(s, -5);
  }
}

TEST_CASE("bytes per resource block") {
  CHECK(bytes_per_rb(0) == 0);
  CHECK(bytes_per_rb(2) == 12);
  CHECK(bytes_per_rb(8) == 48);
  CHECK(max_bytes_per_rb() == 48);
  for (int m : {0, 2, 4, 6, 8}) {
    const double ratio = double(bytes_per_rb(m)) / bytes_per_rb(8);
    CHECK(ratio == doctest::Approx(m / 8.0));
  }
}

TEST_CASE("channel count from bandwidth") {
  RadioConfig radio;
  CHECK(radio.channels() == 83);  // floor(60 MHz / 720 kHz)
  radio.num_channels = 84;
  CHECK(radio.channels() == 84);
}

TEST_CASE("links are frozen per run") {
  ScenarioConfig sc;
  Rng rng(4);
  const auto layout = generate_layout(sc, rng);
  RadioConfig radio;
  const auto a = compute_links(layout, radio, 17);
  const auto b = compute_links(layout, radio, 17);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].snr_db == b[i].snr_db);
    CHECK(a[i].shadow_db == b[i].shadow_db);
    CHECK((a[i].modulation_order == 0) == (a[i].snr_db < radio.snr_threshold_db));
  }
  radio.shadowing = false;
  for (const auto& l : compute_links(layout, radio, 17)) {
    CHECK(l.shadow_db == 0.0);
    CHECK(std::abs(l.snr_db - snr_db(radio, l.path_loss_db)) < 1e-9);
  }
}
