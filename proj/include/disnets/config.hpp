#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "disnets/agent.hpp"
#include "disnets/channel.hpp"
#include "disnets/mac.hpp"
#include "disnets/metrics.hpp"
#include "disnets/scenario.hpp"
#include "disnets/schedulers.hpp"
#include "disnets/traffic.hpp"

namespace disnets {

/// Validation failure; `field` is the dotted path of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Every field is stored in the unit named by its key, so serialization is lossless.

struct ScenarioSection {
  double floor_length_m = 20.0;
  double floor_width_m = 20.0;
  double floor_height_m = 4.0;
  double machine_side_m = 3.0;
  double inter_machine_distance_m = 5.0;
  int num_lines = 4;
  int machines_per_line = 4;
  int num_ues = 20;
  std::string ue_assignment = "round_robin";
};

struct RadioSection {
  double carrier_freq_ghz = 3.5;
  double bandwidth_mhz = 60.0;
  double subcarrier_spacing_khz = 60.0;
  double tx_power_dbm = 23.0;
  double antenna_gain_ue_db = 0.0;
  double antenna_gain_gnb_db = 0.0;
  double noise_temperature_k = 290.0;
  double snr_threshold_db = -5.0;
  int num_channels = 12;  // 0: as many as the bandwidth holds
  bool shadowing = true;
  double shadow_sigma_los_db = 4.0;
  double shadow_sigma_nlos_db = 5.7;
  std::string inf_sub_scenario = "sl";
};

struct TrafficSection {
  std::string model = "uniform_aperiodic";
  double period_ms = 2.0;
  double t_min_ms = 2.0;
  double t_max_ms = 6.0;
  double activation_period_ms = 8.0;
  int packet_size_bytes = 616;
  int header_bytes = 72;
  double aperiodic_fraction = 0.5;
};

struct TimingSection {
  int symbols_per_su = 7;
  int data_symbols = 4;
  int fci_symbols = 2;
  int processing_ue_symbols = 7;
  int processing_gnb_symbols = 7;
  double das_delay_ms = 0.05;
  double core_delay_ms = 0.1;
  double propagation_ms = 0.0;
  double fronthaul_ms = 0.0;
  double sim_time_s = 2.0;
  double latency_threshold_ms = 1.0;
};

struct SchedulerSection {
  std::string kind = "disnets";
  int random_k = 3;
  int gbs_grant_delay_su = 3;
  double outage_reward = 0.0;
};

struct AgentSection {
  int history_rows = 10;
  double threshold = 0.0;
  int buffer_capacity = 4096;
  int retrain_interval = 100;
  bool queue_row = false;
  double prior_scale = 0.25;
  double noise_a0 = 6.0;
  double noise_b0 = 6.0;
  double variance_decay = 0.9999;
  double learning_rate = 1e-3;
  int epochs_per_update = 3;
  int minibatch_size = 64;
  int conv1_filters = 10;
  int conv1_kernel = 4;
  int conv2_filters = 10;
  int conv2_kernel = 3;
  int pool = 3;
  std::string pool_rounding = "floor";
  int latent_dim = 10;
  double leaky_slope = 0.01;
  ContextEncoding encoding;
};

struct MetricsSection {
  std::string fci_size_variant = "n+3";
  int reward_block = 100;
  int channel_usage_window_packets = 10;
  bool write_checkpoints = true;
};

struct SimConfig {
  std::uint64_t seed = 1;
  ScenarioSection scenario;
  RadioSection radio;
  TrafficSection traffic;
  TimingSection timing;
  SchedulerSection scheduler;
  AgentSection agent;
  MetricsSection metrics;

  ScenarioConfig scenario_config() const;
  RadioConfig radio_config() const;
  TrafficConfig traffic_config() const;
  TimingConfig timing_config() const;
  SchedulerSettings scheduler_settings() const;
  FciSizeVariant fci_variant() const;
  int num_channels() const { return radio_config().channels(); }

  /// Builds every module config and rethrows their errors as ConfigError.
  void validate() const;
};

/// Desk scale: N = 20, K = 12, T_S = 2 s.
SimConfig desk_defaults();
/// Full scale: K = 84 channels over 60 MHz, T_S = 7 s.
SimConfig paper_defaults();

SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& cfg);
SimConfig load_config(const std::filesystem::path& path);
SimConfig parse_config(const std::string& text);

/// FNV-1a over the canonical JSON dump, seed excluded, as 16 hex digits.
std::string config_hash(const SimConfig& cfg);

FciSizeVariant parse_fci_variant(const std::string& text);
TrafficModel parse_traffic_model(const std::string& text);

}  // namespace disnets
