#include "disnets/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace disnets {

namespace {

constexpr int kMaxAttemptsPerMachine = 10000;
constexpr int kRelaxationSweeps = 200;

struct Domain {
  double x_lo, x_hi, y_lo, y_hi;
  bool contains(double x, double y) const { return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi; }
};

bool far_enough(const std::vector<Eigen::Vector2d>& pts, const Eigen::Vector2d& p, double min_dist,
                int skip = -1) {
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    if (i == skip) continue;
    if ((pts[i] - p).norm() < min_dist) return false;
  }
  return true;
}

std::optional<std::vector<Eigen::Vector2d>> sequential_placement(const Domain& dom, int count,
                                                                 double min_dist, Rng& rng) {
  std::uniform_real_distribution<double> ux(dom.x_lo, dom.x_hi);
  std::uniform_real_distribution<double> uy(dom.y_lo, dom.y_hi);
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(count);
  for (int m = 0; m < count; ++m) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttemptsPerMachine; ++attempt) {
      Eigen::Vector2d p(ux(rng), uy(rng));
      if (far_enough(pts, p, min_dist)) {
        pts.push_back(p);
        placed = true;
        break;
      }
    }
    if (!placed) return std::nullopt;
  }
  return pts;
}

std::optional<std::vector<Eigen::Vector2d>> lattice_placement(const Domain& dom, int count,
                                                              double min_dist) {
  const double span_x = dom.x_hi - dom.x_lo;
  const double span_y = dom.y_hi - dom.y_lo;
  for (int cols = 1; cols <= count; ++cols) {
    const int rows = (count + cols - 1) / cols;
    const double sx = cols > 1 ? span_x / (cols - 1) : min_dist;
    const double sy = rows > 1 ? span_y / (rows - 1) : min_dist;
    if (sx < min_dist || sy < min_dist) continue;
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < count; ++i) {
      const int r = i / cols;
      const int c = i % cols;
      const double x = cols > 1 ? dom.x_lo + c * sx : 0.5 * (dom.x_lo + dom.x_hi);
      const double y = rows > 1 ? dom.y_lo + r * sy : 0.5 * (dom.y_lo + dom.y_hi);
      pts.emplace_back(x, y);
    }
    return pts;
  }
  return std::nullopt;
}

// Metropolis hard-disk moves: symmetric proposals, accepted iff feasible, so the
// chain's stationary law is uniform over feasible configurations.
void relax(std::vector<Eigen::Vector2d>& pts, const Domain& dom, double min_dist, Rng& rng) {
  if (pts.empty()) return;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(pts.size()) - 1);
  std::uniform_real_distribution<double> step(-0.5 * min_dist, 0.5 * min_dist);
  const long moves = static_cast<long>(kRelaxationSweeps) * static_cast<long>(pts.size());
  for (long i = 0; i < moves; ++i) {
    const int m = pick(rng);
    Eigen::Vector2d p = pts[m] + Eigen::Vector2d(step(rng), step(rng));
    if (dom.contains(p.x(), p.y()) && far_enough(pts, p, min_dist, m)) pts[m] = p;
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
  };
  require(floor_length_m > 0, "floor_length_m", "must be > 0");
  require(floor_width_m > 0, "floor_width_m", "must be > 0");
  require(floor_height_m > 0, "floor_height_m", "must be > 0");
  require(machine_side_m > 0, "machine_side_m", "must be > 0");
  require(machine_side_m < std::min(floor_length_m, floor_width_m), "machine_side_m",
          "must be smaller than the floor");
  require(machine_side_m <= floor_height_m, "machine_side_m", "must not exceed floor height");
  require(inter_machine_distance_m >= machine_side_m, "inter_machine_distance_m",
          "must be >= machine_side_m");
  require(num_lines >= 1, "num_lines", "must be >= 1");
  require(machines_per_line >= 1, "machines_per_line", "must be >= 1");
  require(num_ues >= 0, "num_ues", "must be >= 0");
}

int FactoryLayout::position_in_line(int machine) const {
  const auto& order = activation_order.at(line_of_machine.at(machine));
  const auto it = std::find(order.begin(), order.end(), machine);
  return static_cast<int>(it - order.begin());
}

FactoryLayout generate_layout(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  const double s = config.machine_side_m;
  const Domain dom{s / 2, config.floor_length_m - s / 2, s / 2, config.floor_width_m - s / 2};
  const int count = config.num_machines();
  const double d = config.inter_machine_distance_m;

  auto pts = sequential_placement(dom, count, d, rng);
  if (!pts) pts = lattice_placement(dom, count, d);
  if (!pts) {
    throw PlacementInfeasible("cannot place " + std::to_string(count) + " machines at spacing " +
                              std::to_string(d) + " m");
  }
  relax(*pts, dom, d, rng);

  FactoryLayout layout;
  layout.floor_length_m = config.floor_length_m;
  layout.floor_width_m = config.floor_width_m;
  layout.floor_height_m = config.floor_height_m;
  layout.machine_side_m = s;
  layout.gnb_position = Point3(config.floor_length_m / 2, config.floor_width_m / 2, config.floor_height_m);

  // Lines are rows of the floor: sort by y, chunk, then order each chunk by x.
  std::vector<int> by_y(count);
  std::iota(by_y.begin(), by_y.end(), 0);
  std::stable_sort(by_y.begin(), by_y.end(), [&](int a, int b) { return (*pts)[a].y() < (*pts)[b].y(); });

  layout.line_of_machine.assign(count, 0);
  layout.activation_order.assign(config.num_lines, {});
  for (int line = 0; line < config.num_lines; ++line) {
    auto& order = layout.activation_order[line];
    for (int j = 0; j < config.machines_per_line; ++j) order.push_back(by_y[line * config.machines_per_line + j]);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return (*pts)[a].x() < (*pts)[b].x(); });
  }
  // Renumber machines so index order equals (line, activation position).
  std::vector<int> old_to_new(count);
  int next = 0;
  for (auto& order : layout.activation_order) {
    for (int& m : order) {
      old_to_new[m] = next;
      m = next++;
    }
  }
  layout.machine_centers.resize(count);
  for (int old = 0; old < count; ++old) {
    layout.machine_centers[old_to_new[old]] = Point3((*pts)[old].x(), (*pts)[old].y(), s / 2);
  }
  for (int line = 0; line < config.num_lines; ++line) {
    for (int m : layout.activation_order[line]) layout.line_of_machine[m] = line;
  }

  std::uniform_real_distribution<double> offset(-s / 2, s / 2);
  std::uniform_int_distribution<int> any_machine(0, count - 1);
  for (int ue = 0; ue < config.num_ues; ++ue) {
    const int host = config.assignment == UeAssignment::RoundRobin ? ue % count : any_machine(rng);
    const Point3& c = layout.machine_centers[host];
    const double dx = offset(rng);
    const double dy = offset(rng);
    layout.ue_machine.push_back(host);
    layout.ue_positions.emplace_back(c.x() + dx, c.y() + dy, s);
  }
  return layout;
}

bool is_los(const FactoryLayout& layout, int ue) {
  const Point3& p = layout.ue_positions.at(ue);
  const int host = layout.ue_machine.at(ue);
  const double half = layout.machine_side_m / 2;
  for (int m = 0; m < layout.num_machines(); ++m) {
    if (m == host) continue;
    if (segment_intersects_box<double>(p, layout.gnb_position, layout.machine_centers[m], half)) return false;
  }
  return true;
}

double distance_3d(const FactoryLayout& layout, int ue) {
  return (layout.ue_positions.at(ue) - layout.gnb_position).norm();
}

}  // namespace disnets
