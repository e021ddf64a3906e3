#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "disnets/agent.hpp"
#include "disnets/channel.hpp"
#include "disnets/metrics.hpp"
#include "disnets/scenario.hpp"

namespace disnets {

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;

  /// "# disnets config_hash=<hash> seed=<seed>"
  std::string header_line() const;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// %.17g, or an empty field for NaN.
std::string format_double(double v);

std::string packets_csv(const MetricsLog& log, const Provenance& prov);
std::string sus_csv(const MetricsLog& log, const Provenance& prov);
std::string training_csv(const MetricsLog& log, const Provenance& prov);
std::string channel_usage_csv(const std::vector<CdfPoint>& cdf, const Provenance& prov);

nlohmann::json summary_json(const MetricsLog& log, const SummaryStats& stats, const Provenance& prov,
                            const std::string& scheduler, int reward_block);
nlohmann::json layout_json(const FactoryLayout& layout, const std::vector<LinkState>& links, const Provenance& prov);
nlohmann::json agent_checkpoint(const Agent& agent, int ue, const Provenance& prov);

/// Reads the data rows of a CSV written by this module (comment and header lines skipped).
std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path);

}  // namespace disnets
