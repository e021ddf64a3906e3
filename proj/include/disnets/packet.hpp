#pragma once

#include <cstdint>
#include <optional>

namespace disnets {

struct Packet {
  std::int64_t id = 0;
  int ue = 0;
  double t_gen = 0.0;
  int total_bytes = 0;
  int remaining_bytes = 0;
  /// Start of the first SU in which any of its bytes went on air.
  std::optional<double> t_first_tx;
  /// End of the data portion of the SU that carried its last byte.
  std::optional<double> t_delivered;
  std::optional<std::int64_t> su_delivered;
};

}  // namespace disnets
