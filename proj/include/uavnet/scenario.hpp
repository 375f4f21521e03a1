#pragma once

#include "uavnet/rng.hpp"
#include "uavnet/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace uavnet {

// Axis-aligned building footprint extruded from the ground.
struct Obstacle {
  double center_x = 0.0;
  double center_y = 0.0;
  double width = 1.0;   // along x
  double depth = 1.0;   // along y
  double height = 1.0;

  Vec3 min_corner() const { return {center_x - width / 2, center_y - depth / 2, 0.0}; }
  Vec3 max_corner() const { return {center_x + width / 2, center_y + depth / 2, height}; }
};

struct UavState {
  std::size_t id = 0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();  // m/s
  double tx_power = 1.0;         // W
  double residual_energy = 0.0;  // J, E_i^max at the start of a run
};

struct GroundUser {
  std::size_t id = 0;
  Vec3 position = Vec3::Zero();  // z == 0
};

// Scripted ground-user relocation applied when the world reaches `slot`.
struct UserWaypoint {
  std::size_t slot = 0;
  std::size_t user = 0;
  Vec3 position = Vec3::Zero();
};

struct WorldState {
  std::size_t slot = 0;
  std::vector<UavState> uavs;
  std::vector<GroundUser> users;
  std::vector<Obstacle> obstacles;
  Vec2 area{10000.0, 10000.0};          // (x_max, y_max); region starts at the origin
  Vec2 altitude_band{100.0, 300.0};     // (z_min, z_max)
  Vec2 power_bounds{0.5, 2.0};          // (p_min, p_max)
  double comm_radius = 4000.0;          // R_c
  double slot_length = 1.0;             // Δt
  std::vector<UserWaypoint> user_script;

  std::size_t n_uavs() const { return uavs.size(); }
  std::size_t n_users() const { return users.size(); }
  double z_min() const { return altitude_band.x(); }
  double z_max() const { return altitude_band.y(); }
  double p_min() const { return power_bounds.x(); }
  double p_max() const { return power_bounds.y(); }

  bool in_flight_region(const Vec3& q) const;
  Vec3 project_to_flight_region(const Vec3& q) const;
  double project_power(double p) const;
};

// Throws ConfigError naming the violated invariant.
void validate_world(const WorldState& world);

template <typename Scalar>
Scalar distance(const Vec3T<Scalar>& a, const Vec3T<Scalar>& b) {
  return (a - b).norm();
}

// True when the open segment (a, b) passes through the interior of the box.
bool segment_hits_obstacle(const Vec3& a, const Vec3& b, const Obstacle& box);

// ζ: 1 when no obstacle blocks the straight path.
int los_between(const Vec3& a, const Vec3& b, std::span<const Obstacle> obstacles);

// Degrees above the user's horizon; 90 when directly overhead.
double elevation_angle(const Vec3& uav, const Vec3& user);

// Semi-implicit Euler: v += a·Δt, then q += v·Δt. Positions are clamped to the
// flight region and the offending velocity component is zeroed. Scripted user
// waypoints for the new slot are applied.
WorldState step_mobility(const WorldState& world, std::span<const Vec3> accelerations);

struct KMeansResult {
  std::vector<Vec3> centroids;               // lifted to the requested altitude
  std::vector<std::size_t> assignment;       // user -> cluster
  std::vector<double> cost_history;          // Σ squared distance after each iteration
  std::size_t iterations = 0;
};

// Lloyd's algorithm on horizontal user coordinates, seeded random-point init.
KMeansResult kmeans_cluster(std::span<const GroundUser> users, std::size_t n_uavs,
                            std::uint64_t seed, double altitude,
                            std::size_t max_iterations = 100);

// Initial UAV positions: k-means centroids at the altitude-band midpoint.
std::vector<Vec3> kmeans_init(std::span<const GroundUser> users, std::size_t n_uavs,
                              std::uint64_t seed, const Vec2& altitude_band);

}  // namespace uavnet
