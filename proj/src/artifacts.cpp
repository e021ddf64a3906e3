#include "disnets/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace disnets {

using nlohmann::json;

std::string Provenance::header_line() const {
  return "# disnets config_hash=" + config_hash + " seed=" + std::to_string(seed);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string packets_csv(const MetricsLog& log, const Provenance& prov) {
  std::ostringstream out;
  out << prov.header_line() << '\n';
  out << "id,ue,t_gen_s,bytes,delivered,t_first_tx_s,t_delivered_s,t_p_s,t_ran_s,t_tx_s,tau_p_s,t_das_s,tau_f_s,"
         "t_gnb_s,t_cn_s,latency_s\n";
  for (const auto& p : log.packets) {
    out << p.id << ',' << p.ue << ',' << format_double(p.t_gen) << ',' << p.bytes << ',' << (p.delivered ? 1 : 0) << ','
        << format_double(p.t_first_tx) << ',' << format_double(p.t_delivered);
    if (p.delivered) {
      const auto& c = p.components;
      for (double v : {c.t_p, c.t_ran, c.t_tx, c.tau_p, c.t_das, c.tau_f, c.t_gnb, c.t_cn, p.latency_s}) {
        out << ',' << format_double(v);
      }
    } else {
      out << ",,,,,,,,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string sus_csv(const MetricsLog& log, const Provenance& prov) {
  std::ostringstream out;
  out << prov.header_line() << '\n';
  out << "su,t_s,transmitting_ues,channels_used,successes,collisions,outages,unused,delivered_bytes,lost_bytes,"
         "ue_channels\n";
  for (const auto& s : log.sus) {
    out << s.su << ',' << format_double(log.timing.su_start(s.su)) << ',' << s.transmitting_ues << ','
        << s.channels_used << ',' << s.successes << ',' << s.collisions << ',' << s.outages << ',' << s.unused << ','
        << s.delivered_bytes << ',' << s.lost_bytes << ',';
    for (std::size_t i = 0; i < s.ue_channels.size(); ++i) {
      if (i) out << ';';
      out << s.ue_channels[i].first << ':' << s.ue_channels[i].second;
    }
    out << '\n';
  }
  return out.str();
}

std::string training_csv(const MetricsLog& log, const Provenance& prov) {
  std::ostringstream out;
  out << prov.header_line() << '\n';
  out << "su,t_s,ue,loss,buffer_size\n";
  for (const auto& t : log.training) {
    out << t.su << ',' << format_double(t.t) << ',' << t.ue << ',' << format_double(t.loss) << ',' << t.buffer_size
        << '\n';
  }
  return out.str();
}

std::string channel_usage_csv(const std::vector<CdfPoint>& cdf, const Provenance& prov) {
  std::ostringstream out;
  out << prov.header_line() << '\n';
  out << "channels,cdf\n";
  for (const auto& p : cdf) out << p.channels << ',' << format_double(p.probability) << '\n';
  return out.str();
}

namespace {
json curve_json(const std::vector<CurvePoint>& curve) {
  json arr = json::array();
  for (const auto& p : curve) arr.push_back({p.x, p.value});
  return arr;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace

json summary_json(const MetricsLog& log, const SummaryStats& stats, const Provenance& prov, const std::string& scheduler,
                  int reward_block) {
  json j;
  j["config_hash"] = prov.config_hash;
  j["seed"] = prov.seed;
  j["scheduler"] = scheduler;
  j["num_ues"] = log.num_ues;
  j["num_channels"] = log.num_channels;
  j["num_sus"] = log.num_sus;
  j["su_duration_s"] = log.timing.su_duration();
  j["latency_threshold_s"] = log.timing.latency_threshold_s;
  j["mean_latency_s"] = nullable(stats.mean_latency_s);
  j["latency_std_s"] = stats.latency_std_s;
  j["reliability"] = stats.reliability;
  j["reliability_vacuous"] = stats.reliability_vacuous;
  j["generated_packets"] = stats.generated_packets;
  j["delivered_packets"] = stats.delivered_packets;
  j["undelivered_packets"] = stats.undelivered_packets;
  j["generated_bytes"] = log.generated_bytes;
  j["delivered_bytes"] = log.delivered_bytes;
  j["queued_bytes_at_end"] = log.queued_bytes_at_end;
  j["collisions"] = stats.collisions;
  j["collision_rate"] = stats.collision_rate;
  j["reward_block_decisions"] = reward_block;
  j["reward_curve"] = curve_json(stats.reward_curve);
  j["loss_curve"] = curve_json(stats.loss_curve);
  return j;
}

json layout_json(const FactoryLayout& layout, const std::vector<LinkState>& links, const Provenance& prov) {
  json j;
  j["config_hash"] = prov.config_hash;
  j["seed"] = prov.seed;
  j["floor_m"] = {layout.floor_length_m, layout.floor_width_m, layout.floor_height_m};
  j["machine_side_m"] = layout.machine_side_m;
  j["gnb_m"] = {layout.gnb_position.x(), layout.gnb_position.y(), layout.gnb_position.z()};
  json machines = json::array();
  for (int m = 0; m < layout.num_machines(); ++m) {
    const auto& c = layout.machine_centers[static_cast<std::size_t>(m)];
    machines.push_back({{"id", m},
                        {"line", layout.line_of_machine[static_cast<std::size_t>(m)]},
                        {"position_in_line", layout.position_in_line(m)},
                        {"center_m", {c.x(), c.y(), c.z()}}});
  }
  j["machines"] = machines;
  json ues = json::array();
  for (int u = 0; u < layout.num_ues(); ++u) {
    const auto& p = layout.ue_positions[static_cast<std::size_t>(u)];
    json ue = {{"id", u}, {"machine", layout.ue_machine[static_cast<std::size_t>(u)]}, {"position_m", {p.x(), p.y(), p.z()}}};
    if (static_cast<std::size_t>(u) < links.size()) {
      const auto& l = links[static_cast<std::size_t>(u)];
      ue["los"] = l.los;
      ue["distance_m"] = l.distance_m;
      ue["path_loss_db"] = l.path_loss_db;
      ue["shadow_db"] = l.shadow_db;
      ue["snr_db"] = l.snr_db;
      ue["modulation_order"] = l.modulation_order;
    }
    ues.push_back(ue);
  }
  j["ues"] = ues;
  return j;
}

json agent_checkpoint(const Agent& agent, int ue, const Provenance& prov) {
  json j;
  j["config_hash"] = prov.config_hash;
  j["seed"] = prov.seed;
  j["ue"] = ue;
  j["total_decisions"] = agent.total_decisions();
  j["buffer_size"] = agent.buffer().size();
  j["decay_multiplier"] = agent.lts().decay_multiplier();
  const auto& params = agent.weights().params;
  j["network_params"] = std::vector<double>(params.data(), params.data() + params.size());
  json posteriors = json::array();
  for (int k = 0; k < agent.config().num_channels; ++k) {
    const auto& post = agent.lts().action(k);
    posteriors.push_back({{"channel", k},
                          {"count", post.count},
                          {"a", post.a},
                          {"b", post.b},
                          {"mean", std::vector<double>(post.mean.data(), post.mean.data() + post.mean.size())}});
  }
  j["posteriors"] = posteriors;
  return j;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace disnets
