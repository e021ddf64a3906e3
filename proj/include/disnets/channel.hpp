#pragma once

#include <vector>

#include "disnets/rng.hpp"
#include "disnets/scenario.hpp"

namespace disnets {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

enum class InfSubScenario { SparseLowBs, DenseLowBs };

struct RadioConfig {
  double carrier_freq_hz = 3.5e9;
  double bandwidth_hz = 60e6;
  double subcarrier_spacing_hz = 60e3;
  double tx_power_dbm = 23.0;
  double antenna_gain_ue_db = 0.0;
  double antenna_gain_gnb_db = 0.0;
  double noise_temperature_k = 290.0;
  double snr_threshold_db = -5.0;
  /// 0 selects floor(B / (12 Δf)).
  int num_channels = 0;
  bool shadowing = true;
  double shadow_sigma_los_db = 4.0;
  double shadow_sigma_nlos_db = 5.7;
  InfSubScenario sub_scenario = InfSubScenario::SparseLowBs;

  int channels() const;
  double noise_power_w() const { return kBoltzmann * noise_temperature_k * bandwidth_hz; }
  void validate() const;
};

struct LinkState {
  int ue = 0;
  bool los = true;
  double distance_m = 0.0;
  double path_loss_db = 0.0;
  double shadow_db = 0.0;
  double snr_db = 0.0;
  int modulation_order = 0;
};

inline constexpr int kSubcarriersPerChannel = 12;
inline constexpr int kDataSymbols = 4;
inline constexpr int kMaxModulationOrder = 8;

/// InF path loss in dB (distance clamped to >= 1 m). NLOS takes the max of the LOS
/// and NLOS branches, as in the InF-SL / InF-DL definitions.
double path_loss_db(double distance_m, bool los, double carrier_freq_hz, double shadow_db,
                    InfSubScenario sub = InfSubScenario::SparseLowBs);

double snr_db(const RadioConfig& radio, double path_loss_db);

/// Bits per resource element; 0 means outage.
int modulation_order(double snr_db, double snr_threshold_db);

int bytes_per_rb(int modulation_order, int data_symbols = kDataSymbols,
                 int subcarriers = kSubcarriersPerChannel);

inline int max_bytes_per_rb() { return bytes_per_rb(kMaxModulationOrder); }

/// Static per-UE link budget: LOS by geometry, shadowing drawn once per UE from its own substream.
std::vector<LinkState> compute_links(const FactoryLayout& layout, const RadioConfig& radio,
                                     std::uint64_t master_seed);

}  // namespace disnets
