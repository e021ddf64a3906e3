#include "disnets/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace disnets {

using nlohmann::json;

namespace {

/// Reads the keys of one JSON object, remembering which were consumed so unknown
/// keys (usually typos) can be reported.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(field(key), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
      } else {
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), e.what());
    }
  }

  template <class T>
  void require(const std::string& key, T& out, const std::string& why) {
    if (!j_.contains(key)) throw ConfigError(field(key), "missing (" + why + ")");
    get(key, out);
  }

  Reader section(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Reader(j_.contains(key) ? j_.at(key) : empty, field(key));
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void rethrow_as(const std::string& section, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    const auto colon = what.find(": ");
    if (colon != std::string::npos && what.find(' ') > colon) {
      throw ConfigError(section + "." + what.substr(0, colon), what.substr(colon + 2));
    }
    throw ConfigError(section, what);
  }
}

}  // namespace

TrafficModel parse_traffic_model(const std::string& text) {
  if (text == "periodic") return TrafficModel::Periodic;
  if (text == "uniform_aperiodic") return TrafficModel::UniformAperiodic;
  if (text == "ue_specific_aperiodic") return TrafficModel::UeSpecificAperiodic;
  if (text == "mixed") return TrafficModel::Mixed;
  throw ConfigError("traffic.model", "unknown model '" + text +
                                         "' (expected periodic|uniform_aperiodic|ue_specific_aperiodic|mixed)");
}

FciSizeVariant parse_fci_variant(const std::string& text) {
  if (text == "n+3") return FciSizeVariant::NPlus3;
  if (text == "n+2") return FciSizeVariant::NPlus2;
  throw ConfigError("metrics.fci_size_variant", "expected n+3 or n+2, got '" + text + "'");
}

ScenarioConfig SimConfig::scenario_config() const {
  ScenarioConfig c;
  c.floor_length_m = scenario.floor_length_m;
  c.floor_width_m = scenario.floor_width_m;
  c.floor_height_m = scenario.floor_height_m;
  c.machine_side_m = scenario.machine_side_m;
  c.inter_machine_distance_m = scenario.inter_machine_distance_m;
  c.num_lines = scenario.num_lines;
  c.machines_per_line = scenario.machines_per_line;
  c.num_ues = scenario.num_ues;
  if (scenario.ue_assignment == "round_robin") {
    c.assignment = UeAssignment::RoundRobin;
  } else if (scenario.ue_assignment == "uniform_random") {
    c.assignment = UeAssignment::UniformRandom;
  } else {
    throw ConfigError("scenario.ue_assignment", "expected round_robin or uniform_random");
  }
  return c;
}

RadioConfig SimConfig::radio_config() const {
  RadioConfig c;
  c.carrier_freq_hz = radio.carrier_freq_ghz * 1e9;
  c.bandwidth_hz = radio.bandwidth_mhz * 1e6;
  c.subcarrier_spacing_hz = radio.subcarrier_spacing_khz * 1e3;
  c.tx_power_dbm = radio.tx_power_dbm;
  c.antenna_gain_ue_db = radio.antenna_gain_ue_db;
  c.antenna_gain_gnb_db = radio.antenna_gain_gnb_db;
  c.noise_temperature_k = radio.noise_temperature_k;
  c.snr_threshold_db = radio.snr_threshold_db;
  c.num_channels = radio.num_channels;
  c.shadowing = radio.shadowing;
  c.shadow_sigma_los_db = radio.shadow_sigma_los_db;
  c.shadow_sigma_nlos_db = radio.shadow_sigma_nlos_db;
  if (radio.inf_sub_scenario == "sl") {
    c.sub_scenario = InfSubScenario::SparseLowBs;
  } else if (radio.inf_sub_scenario == "dl") {
    c.sub_scenario = InfSubScenario::DenseLowBs;
  } else {
    throw ConfigError("radio.inf_sub_scenario", "expected sl or dl");
  }
  return c;
}

TrafficConfig SimConfig::traffic_config() const {
  TrafficConfig c;
  c.model = parse_traffic_model(traffic.model);
  c.period_s = traffic.period_ms * 1e-3;
  c.t_min_s = traffic.t_min_ms * 1e-3;
  c.t_max_s = traffic.t_max_ms * 1e-3;
  c.activation_period_s = traffic.activation_period_ms * 1e-3;
  c.packet_size_bytes = traffic.packet_size_bytes;
  c.header_bytes = traffic.header_bytes;
  c.aperiodic_fraction = traffic.aperiodic_fraction;
  return c;
}

TimingConfig SimConfig::timing_config() const {
  TimingConfig c = TimingConfig::from_subcarrier_spacing(radio.subcarrier_spacing_khz * 1e3);
  c.symbols_per_su = timing.symbols_per_su;
  c.data_symbols = timing.data_symbols;
  c.fci_symbols = timing.fci_symbols;
  c.processing_ue_symbols = timing.processing_ue_symbols;
  c.processing_gnb_symbols = timing.processing_gnb_symbols;
  c.das_delay_s = timing.das_delay_ms * 1e-3;
  c.core_delay_s = timing.core_delay_ms * 1e-3;
  c.propagation_s = timing.propagation_ms * 1e-3;
  c.fronthaul_s = timing.fronthaul_ms * 1e-3;
  c.sim_time_s = timing.sim_time_s;
  c.latency_threshold_s = timing.latency_threshold_ms * 1e-3;
  return c;
}

SchedulerSettings SimConfig::scheduler_settings() const {
  SchedulerSettings s;
  try {
    s.kind = SchedulerKind::parse(scheduler.kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scheduler.kind", e.what());
  }
  if (s.kind.type == SchedulerType::RandomK && scheduler.kind == "randomk") s.kind.k_star = scheduler.random_k;
  s.gbs_grant_delay_su = scheduler.gbs_grant_delay_su;

  AgentConfig& a = s.agent;
  a.mode = s.kind.type == SchedulerType::NltsSingle ? AgentMode::NltsSingle : AgentMode::Disnets;
  a.num_channels = num_channels();
  a.history_rows = agent.history_rows;
  a.threshold = agent.threshold;
  a.buffer_capacity = agent.buffer_capacity;
  a.retrain_interval = agent.retrain_interval;
  a.queue_row = agent.queue_row;
  a.encoding = agent.encoding;
  a.lts.prior_scale = agent.prior_scale;
  a.lts.noise_a0 = agent.noise_a0;
  a.lts.noise_b0 = agent.noise_b0;
  a.lts.variance_decay = agent.variance_decay;
  a.net.adam.learning_rate = agent.learning_rate;
  a.net.epochs_per_update = agent.epochs_per_update;
  a.net.minibatch_size = agent.minibatch_size;
  a.net.conv1_filters = agent.conv1_filters;
  a.net.conv1_kernel = agent.conv1_kernel;
  a.net.conv2_filters = agent.conv2_filters;
  a.net.conv2_kernel = agent.conv2_kernel;
  a.net.pool = agent.pool;
  if (agent.pool_rounding == "floor") {
    a.net.pool_rounding = nn::PoolRounding::Floor;
  } else if (agent.pool_rounding == "ceil") {
    a.net.pool_rounding = nn::PoolRounding::Ceil;
  } else {
    throw ConfigError("agent.pool_rounding", "expected floor or ceil");
  }
  a.net.latent_dim = agent.latent_dim;
  a.net.leaky_slope = agent.leaky_slope;
  a.sync_dimensions();
  return s;
}

FciSizeVariant SimConfig::fci_variant() const { return parse_fci_variant(metrics.fci_size_variant); }

void SimConfig::validate() const {
  rethrow_as("scenario", [&] { scenario_config().validate(); });
  rethrow_as("radio", [&] { radio_config().validate(); });
  rethrow_as("traffic", [&] { traffic_config().validate(); });
  rethrow_as("timing", [&] { timing_config().validate(); });
  rethrow_as("agent", [&] { scheduler_settings().agent.validate(); });
  const auto kind = scheduler_settings().kind;
  if (kind.type == SchedulerType::RandomK && (kind.k_star < 1 || kind.k_star > num_channels())) {
    throw ConfigError("scheduler.random_k", "K* must lie in [1, " + std::to_string(num_channels()) + "]");
  }
  if (scheduler.gbs_grant_delay_su < 0) throw ConfigError("scheduler.gbs_grant_delay_su", "must be >= 0");
  fci_variant();
  if (metrics.reward_block < 1) throw ConfigError("metrics.reward_block", "must be >= 1");
  if (metrics.channel_usage_window_packets < 1) throw ConfigError("metrics.channel_usage_window_packets", "must be >= 1");
}

SimConfig desk_defaults() { return SimConfig{}; }

SimConfig paper_defaults() {
  SimConfig c;
  c.radio.num_channels = 84;
  c.timing.sim_time_s = 7.0;
  return c;
}

SimConfig config_from_json(const json& j) {
  SimConfig c;
  Reader root(j, "");
  root.get("seed", c.seed);

  {
    auto r = root.section("scenario");
    auto& s = c.scenario;
    r.get("floor_length_m", s.floor_length_m);
    r.get("floor_width_m", s.floor_width_m);
    r.get("floor_height_m", s.floor_height_m);
    r.get("machine_side_m", s.machine_side_m);
    r.get("inter_machine_distance_m", s.inter_machine_distance_m);
    r.get("num_lines", s.num_lines);
    r.get("machines_per_line", s.machines_per_line);
    r.get("num_ues", s.num_ues);
    r.get("ue_assignment", s.ue_assignment);
    r.finish();
  }
  {
    auto r = root.section("radio");
    auto& s = c.radio;
    r.get("carrier_freq_ghz", s.carrier_freq_ghz);
    r.get("bandwidth_mhz", s.bandwidth_mhz);
    r.get("subcarrier_spacing_khz", s.subcarrier_spacing_khz);
    r.get("tx_power_dbm", s.tx_power_dbm);
    r.get("antenna_gain_ue_db", s.antenna_gain_ue_db);
    r.get("antenna_gain_gnb_db", s.antenna_gain_gnb_db);
    r.get("noise_temperature_k", s.noise_temperature_k);
    r.get("snr_threshold_db", s.snr_threshold_db);
    r.get("num_channels", s.num_channels);
    r.get("shadowing", s.shadowing);
    r.get("shadow_sigma_los_db", s.shadow_sigma_los_db);
    r.get("shadow_sigma_nlos_db", s.shadow_sigma_nlos_db);
    r.get("inf_sub_scenario", s.inf_sub_scenario);
    r.finish();
  }
  {
    auto r = root.section("traffic");
    auto& s = c.traffic;
    r.get("model", s.model);
    const TrafficModel model = parse_traffic_model(s.model);
    // Inter-arrival bounds have no sensible default: they define the experiment.
    if (model != TrafficModel::Periodic) {
      r.require("t_min_ms", s.t_min_ms, "required by traffic model '" + s.model + "'");
      r.require("t_max_ms", s.t_max_ms, "required by traffic model '" + s.model + "'");
    } else {
      r.get("t_min_ms", s.t_min_ms);
      r.get("t_max_ms", s.t_max_ms);
    }
    if (model == TrafficModel::Periodic || model == TrafficModel::Mixed) {
      r.require("period_ms", s.period_ms, "required by traffic model '" + s.model + "'");
    } else {
      r.get("period_ms", s.period_ms);
    }
    r.get("activation_period_ms", s.activation_period_ms);
    r.get("packet_size_bytes", s.packet_size_bytes);
    r.get("header_bytes", s.header_bytes);
    r.get("aperiodic_fraction", s.aperiodic_fraction);
    r.finish();
  }
  {
    auto r = root.section("timing");
    auto& s = c.timing;
    r.get("symbols_per_su", s.symbols_per_su);
    r.get("data_symbols", s.data_symbols);
    r.get("fci_symbols", s.fci_symbols);
    r.get("processing_ue_symbols", s.processing_ue_symbols);
    r.get("processing_gnb_symbols", s.processing_gnb_symbols);
    r.get("das_delay_ms", s.das_delay_ms);
    r.get("core_delay_ms", s.core_delay_ms);
    r.get("propagation_ms", s.propagation_ms);
    r.get("fronthaul_ms", s.fronthaul_ms);
    r.get("sim_time_s", s.sim_time_s);
    r.get("latency_threshold_ms", s.latency_threshold_ms);
    r.finish();
  }
  {
    auto r = root.section("scheduler");
    auto& s = c.scheduler;
    r.get("kind", s.kind);
    r.get("random_k", s.random_k);
    r.get("gbs_grant_delay_su", s.gbs_grant_delay_su);
    r.get("outage_reward", s.outage_reward);
    r.finish();
  }
  {
    auto r = root.section("agent");
    auto& s = c.agent;
    r.get("history_rows", s.history_rows);
    r.get("threshold", s.threshold);
    r.get("buffer_capacity", s.buffer_capacity);
    r.get("retrain_interval", s.retrain_interval);
    r.get("queue_row", s.queue_row);
    r.get("prior_scale", s.prior_scale);
    r.get("noise_a0", s.noise_a0);
    r.get("noise_b0", s.noise_b0);
    r.get("variance_decay", s.variance_decay);
    r.get("learning_rate", s.learning_rate);
    r.get("epochs_per_update", s.epochs_per_update);
    r.get("minibatch_size", s.minibatch_size);
    r.get("conv1_filters", s.conv1_filters);
    r.get("conv1_kernel", s.conv1_kernel);
    r.get("conv2_filters", s.conv2_filters);
    r.get("conv2_kernel", s.conv2_kernel);
    r.get("pool", s.pool);
    r.get("pool_rounding", s.pool_rounding);
    r.get("latent_dim", s.latent_dim);
    r.get("leaky_slope", s.leaky_slope);
    {
      auto e = r.section("encoding");
      e.get("own_success", s.encoding.own_success);
      e.get("other_success", s.encoding.other_success);
      e.get("unused", s.encoding.unused);
      e.get("outage", s.encoding.outage);
      e.get("collision", s.encoding.collision);
      e.finish();
    }
    r.finish();
  }
  {
    auto r = root.section("metrics");
    auto& s = c.metrics;
    r.get("fci_size_variant", s.fci_size_variant);
    r.get("reward_block", s.reward_block);
    r.get("channel_usage_window_packets", s.channel_usage_window_packets);
    r.get("write_checkpoints", s.write_checkpoints);
    r.finish();
  }
  root.finish();
  c.validate();
  return c;
}

json config_to_json(const SimConfig& c) {
  json j;
  j["seed"] = c.seed;
  const auto& sc = c.scenario;
  j["scenario"] = {{"floor_length_m", sc.floor_length_m},
                   {"floor_width_m", sc.floor_width_m},
                   {"floor_height_m", sc.floor_height_m},
                   {"machine_side_m", sc.machine_side_m},
                   {"inter_machine_distance_m", sc.inter_machine_distance_m},
                   {"num_lines", sc.num_lines},
                   {"machines_per_line", sc.machines_per_line},
                   {"num_ues", sc.num_ues},
                   {"ue_assignment", sc.ue_assignment}};
  const auto& r = c.radio;
  j["radio"] = {{"carrier_freq_ghz", r.carrier_freq_ghz},
                {"bandwidth_mhz", r.bandwidth_mhz},
                {"subcarrier_spacing_khz", r.subcarrier_spacing_khz},
                {"tx_power_dbm", r.tx_power_dbm},
                {"antenna_gain_ue_db", r.antenna_gain_ue_db},
                {"antenna_gain_gnb_db", r.antenna_gain_gnb_db},
                {"noise_temperature_k", r.noise_temperature_k},
                {"snr_threshold_db", r.snr_threshold_db},
                {"num_channels", r.num_channels},
                {"shadowing", r.shadowing},
                {"shadow_sigma_los_db", r.shadow_sigma_los_db},
                {"shadow_sigma_nlos_db", r.shadow_sigma_nlos_db},
                {"inf_sub_scenario", r.inf_sub_scenario}};
  const auto& t = c.traffic;
  j["traffic"] = {{"model", t.model},
                  {"period_ms", t.period_ms},
                  {"t_min_ms", t.t_min_ms},
                  {"t_max_ms", t.t_max_ms},
                  {"activation_period_ms", t.activation_period_ms},
                  {"packet_size_bytes", t.packet_size_bytes},
                  {"header_bytes", t.header_bytes},
                  {"aperiodic_fraction", t.aperiodic_fraction}};
  const auto& ti = c.timing;
  j["timing"] = {{"symbols_per_su", ti.symbols_per_su},
                 {"data_symbols", ti.data_symbols},
                 {"fci_symbols", ti.fci_symbols},
                 {"processing_ue_symbols", ti.processing_ue_symbols},
                 {"processing_gnb_symbols", ti.processing_gnb_symbols},
                 {"das_delay_ms", ti.das_delay_ms},
                 {"core_delay_ms", ti.core_delay_ms},
                 {"propagation_ms", ti.propagation_ms},
                 {"fronthaul_ms", ti.fronthaul_ms},
                 {"sim_time_s", ti.sim_time_s},
                 {"latency_threshold_ms", ti.latency_threshold_ms}};
  const auto& s = c.scheduler;
  j["scheduler"] = {{"kind", s.kind},
                    {"random_k", s.random_k},
                    {"gbs_grant_delay_su", s.gbs_grant_delay_su},
                    {"outage_reward", s.outage_reward}};
  const auto& a = c.agent;
  j["agent"] = {{"history_rows", a.history_rows},
                {"threshold", a.threshold},
                {"buffer_capacity", a.buffer_capacity},
                {"retrain_interval", a.retrain_interval},
                {"queue_row", a.queue_row},
                {"prior_scale", a.prior_scale},
                {"noise_a0", a.noise_a0},
                {"noise_b0", a.noise_b0},
                {"variance_decay", a.variance_decay},
                {"learning_rate", a.learning_rate},
                {"epochs_per_update", a.epochs_per_update},
                {"minibatch_size", a.minibatch_size},
                {"conv1_filters", a.conv1_filters},
                {"conv1_kernel", a.conv1_kernel},
                {"conv2_filters", a.conv2_filters},
                {"conv2_kernel", a.conv2_kernel},
                {"pool", a.pool},
                {"pool_rounding", a.pool_rounding},
                {"latent_dim", a.latent_dim},
                {"leaky_slope", a.leaky_slope},
                {"encoding",
                 {{"own_success", a.encoding.own_success},
                  {"other_success", a.encoding.other_success},
                  {"unused", a.encoding.unused},
                  {"outage", a.encoding.outage},
                  {"collision", a.encoding.collision}}}};
  const auto& m = c.metrics;
  j["metrics"] = {{"fci_size_variant", m.fci_size_variant},
                  {"reward_block", m.reward_block},
                  {"channel_usage_window_packets", m.channel_usage_window_packets},
                  {"write_checkpoints", m.write_checkpoints}};
  return j;
}

SimConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Map the byte offset onto a line number for the diagnostic.
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError("", "parse error at line " + std::to_string(line) + ": " + e.what());
  }
  return config_from_json(j);
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_hash(const SimConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("seed");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace disnets
