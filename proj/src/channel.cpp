#include "disnets/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace disnets {

int RadioConfig::channels() const {
  if (num_channels > 0) return num_channels;
  return static_cast<int>(std::floor(bandwidth_hz / (kSubcarriersPerChannel * subcarrier_spacing_hz)));
}

void RadioConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
  };
  require(carrier_freq_hz > 0, "carrier_freq_ghz", "must be > 0");
  require(bandwidth_hz > 0, "bandwidth_mhz", "must be > 0");
  require(subcarrier_spacing_hz > 0, "subcarrier_spacing_khz", "must be > 0");
  require(noise_temperature_k > 0, "noise_temperature_k", "must be > 0");
  require(std::isfinite(snr_threshold_db), "snr_threshold_db", "must be finite");
  require(num_channels >= 0, "num_channels", "must be >= 0");
  require(channels() >= 1, "num_channels", "bandwidth yields no channel");
}

double path_loss_db(double distance_m, bool los, double carrier_freq_hz, double shadow_db,
                    InfSubScenario sub) {
  const double d = std::max(distance_m, 1.0);
  const double f_ghz = carrier_freq_hz / 1e9;
  const double pl_los = 31.84 + 21.5 * std::log10(d) + 19.0 * std::log10(f_ghz);
  if (los) return pl_los + shadow_db;
  const double pl_nlos = sub == InfSubScenario::SparseLowBs
                             ? 33.0 + 25.5 * std::log10(d) + 20.0 * std::log10(f_ghz)
                             : 18.6 + 35.7 * std::log10(d) + 20.0 * std::log10(f_ghz);
  return std::max(pl_los, pl_nlos) + shadow_db;
}

double snr_db(const RadioConfig& radio, double pl_db) {
  const double p_tx_w = std::pow(10.0, (radio.tx_power_dbm - 30.0) / 10.0);
  const double g_ue = std::pow(10.0, radio.antenna_gain_ue_db / 10.0);
  const double g_gnb = std::pow(10.0, radio.antenna_gain_gnb_db / 10.0);
  const double pl = std::pow(10.0, pl_db / 10.0);
  return 10.0 * std::log10(p_tx_w * g_ue * g_gnb / (pl * radio.noise_power_w()));
}

int modulation_order(double snr, double snr_threshold) {
  if (snr < snr_threshold) return 0;
  if (snr < 5.0) return 2;
  if (snr < 15.0) return 4;
  if (snr < 25.0) return 6;
  return 8;
}

int bytes_per_rb(int m, int data_symbols, int subcarriers) {
  return subcarriers * data_symbols * m / 8;
}

std::vector<LinkState> compute_links(const FactoryLayout& layout, const RadioConfig& radio,
                                     std::uint64_t master_seed) {
  std::vector<LinkState> links;
  links.reserve(layout.num_ues());
  for (int ue = 0; ue < layout.num_ues(); ++ue) {
    LinkState link;
    link.ue = ue;
    link.los = is_los(layout, ue);
    link.distance_m = distance_3d(layout, ue);
    if (radio.shadowing) {
      Rng rng = make_stream(master_seed, Stream::Shadowing, static_cast<std::uint64_t>(ue));
      std::normal_distribution<double> gauss(0.0, link.los ? radio.shadow_sigma_los_db : radio.shadow_sigma_nlos_db);
      link.shadow_db = gauss(rng);
    }
    link.path_loss_db = path_loss_db(link.distance_m, link.los, radio.carrier_freq_hz, link.shadow_db, radio.sub_scenario);
    link.snr_db = snr_db(radio, link.path_loss_db);
    link.modulation_order = modulation_order(link.snr_db, radio.snr_threshold_db);
    links.push_back(link);
  }
  return links;
}

}  // namespace disnets
