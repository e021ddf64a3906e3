#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "disnets/rng.hpp"

namespace disnets {

using Point3 = Eigen::Vector3d;

class PlacementInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class UeAssignment { RoundRobin, UniformRandom };

struct ScenarioConfig {
  double floor_length_m = 20.0;
  double floor_width_m = 20.0;
  double floor_height_m = 4.0;
  double machine_side_m = 3.0;
  double inter_machine_distance_m = 5.0;
  int num_lines = 4;
  int machines_per_line = 4;
  int num_ues = 20;
  UeAssignment assignment = UeAssignment::RoundRobin;

  int num_machines() const { return num_lines * machines_per_line; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct FactoryLayout {
  double floor_length_m = 0.0;
  double floor_width_m = 0.0;
  double floor_height_m = 0.0;
  double machine_side_m = 0.0;

  std::vector<Point3> machine_centers;
  std::vector<int> line_of_machine;
  /// activation_order[line] lists machine indices, first-activated first.
  std::vector<std::vector<int>> activation_order;
  std::vector<Point3> ue_positions;
  std::vector<int> ue_machine;
  Point3 gnb_position = Point3::Zero();

  int num_machines() const { return static_cast<int>(machine_centers.size()); }
  int num_ues() const { return static_cast<int>(ue_positions.size()); }
  int num_lines() const { return static_cast<int>(activation_order.size()); }
  /// Position of `machine` within its line's activation cycle.
  int position_in_line(int machine) const;
};

FactoryLayout generate_layout(const ScenarioConfig& config, Rng& rng);

/// Parameter interval [t_enter, t_exit] ⊂ [0, 1] where the segment a→b lies inside the
/// closed axis-aligned cube, or nullopt when they do not meet (slab method).
template <class Scalar>
std::optional<std::pair<Scalar, Scalar>> segment_box_chord(const Eigen::Matrix<Scalar, 3, 1>& a,
                                                           const Eigen::Matrix<Scalar, 3, 1>& b,
                                                           const Eigen::Matrix<Scalar, 3, 1>& center,
                                                           Scalar half_side) {
  Scalar t_enter = Scalar(0);
  Scalar t_exit = Scalar(1);
  const Eigen::Matrix<Scalar, 3, 1> dir = b - a;
  for (int axis = 0; axis < 3; ++axis) {
    const Scalar lo = center[axis] - half_side;
    const Scalar hi = center[axis] + half_side;
    if (dir[axis] == Scalar(0)) {
      if (a[axis] < lo || a[axis] > hi) return std::nullopt;
      continue;
    }
    Scalar t0 = (lo - a[axis]) / dir[axis];
    Scalar t1 = (hi - a[axis]) / dir[axis];
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_enter) t_enter = t0;
    if (t1 < t_exit) t_exit = t1;
    if (t_enter > t_exit) return std::nullopt;
  }
  return std::make_pair(t_enter, t_exit);
}

template <class Scalar>
bool segment_intersects_box(const Eigen::Matrix<Scalar, 3, 1>& a, const Eigen::Matrix<Scalar, 3, 1>& b,
                            const Eigen::Matrix<Scalar, 3, 1>& center, Scalar half_side) {
  return segment_box_chord(a, b, center, half_side).has_value();
}

/// True iff the UE→gNB segment crosses no machine other than the UE's host.
bool is_los(const FactoryLayout& layout, int ue);

double distance_3d(const FactoryLayout& layout, int ue);

}  // namespace disnets
