#include "uavnet/scenario.hpp"

#include "uavnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace uavnet {

bool WorldState::in_flight_region(const Vec3& q) const {
  return q.x() >= 0.0 && q.x() <= area.x() && q.y() >= 0.0 && q.y() <= area.y() &&
         q.z() >= z_min() && q.z() <= z_max();
}

Vec3 WorldState::project_to_flight_region(const Vec3& q) const {
  return {std::clamp(q.x(), 0.0, area.x()), std::clamp(q.y(), 0.0, area.y()),
          std::clamp(q.z(), z_min(), z_max())};
}

double WorldState::project_power(double p) const { return std::clamp(p, p_min(), p_max()); }

void validate_world(const WorldState& world) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (world.n_uavs() < 2) fail("uavs.count: need at least 2 UAVs");
  if (world.n_users() < 1) fail("users.count: need at least 1 ground user");
  if (!(world.area.x() > 0.0 && world.area.y() > 0.0)) fail("area: extents must be positive");
  if (!(world.z_min() >= 0.0 && world.z_min() <= world.z_max()))
    fail("uavs.altitude_band: require 0 <= z_min <= z_max");
  if (!(world.p_min() >= 0.0 && world.p_min() <= world.p_max()))
    fail("uavs.power_bounds: require 0 <= p_min <= p_max");
  if (!(world.comm_radius > 0.0)) fail("uavs.comm_radius: must be positive");
  if (!(world.slot_length > 0.0)) fail("slot_length: must be positive");
  for (const auto& u : world.uavs) {
    if (!u.position.allFinite()) fail("uav position must be finite");
    if (!world.in_flight_region(u.position)) {
      std::ostringstream os;
      os << "uav " << u.id << " position outside the flight region";
      fail(os.str());
    }
    if (u.tx_power < world.p_min() || u.tx_power > world.p_max()) {
      std::ostringstream os;
      os << "uav " << u.id << " tx_power outside power_bounds";
      fail(os.str());
    }
    if (u.residual_energy < 0.0) fail("uav residual_energy must be non-negative");
  }
  for (const auto& g : world.users) {
    if (!g.position.allFinite() || g.position.z() != 0.0)
      fail("ground user positions must be finite with z == 0");
  }
  for (const auto& o : world.obstacles) {
    if (!(o.width > 0.0 && o.depth > 0.0 && o.height > 0.0))
      fail("obstacles: width, depth and height must be positive");
  }
}

bool segment_hits_obstacle(const Vec3& a, const Vec3& b, const Obstacle& box) {
  // Slab clipping of the parametric segment a + t (b - a), t in (0, 1).
  const Vec3 lo = box.min_corner();
  const Vec3 hi = box.max_corner();
  const Vec3 dir = b - a;
  double t0 = 0.0;
  double t1 = 1.0;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(dir[k]) < 1e-15) {
      // Parallel to this slab: must lie strictly inside it to touch the interior.
      if (a[k] <= lo[k] || a[k] >= hi[k]) return false;
      continue;
    }
    double ta = (lo[k] - a[k]) / dir[k];
    double tb = (hi[k] - a[k]) / dir[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return false;
  }
  // Positive-length overlap with the closed box; grazing a face is not a block.
  return t1 - t0 > 1e-12;
}

int los_between(const Vec3& a, const Vec3& b, std::span<const Obstacle> obstacles) {
  for (const auto& o : obstacles) {
    if (segment_hits_obstacle(a, b, o)) return 0;
  }
  return 1;
}

double elevation_angle(const Vec3& uav, const Vec3& user) {
  const double horizontal = std::hypot(uav.x() - user.x(), uav.y() - user.y());
  if (horizontal == 0.0) return 90.0;
  return std::atan2(uav.z() - user.z(), horizontal) * 180.0 / kPi;
}

WorldState step_mobility(const WorldState& world, std::span<const Vec3> accelerations) {
  if (accelerations.size() != world.n_uavs())
    throw ContractViolation("step_mobility: one acceleration per UAV required");
  WorldState next = world;
  const double dt = world.slot_length;
  const Vec3 lo(0.0, 0.0, world.z_min());
  const Vec3 hi(world.area.x(), world.area.y(), world.z_max());
  for (std::size_t i = 0; i < next.uavs.size(); ++i) {
    auto& u = next.uavs[i];
    u.velocity += accelerations[i] * dt;
    u.position += u.velocity * dt;
    for (int k = 0; k < 3; ++k) {
      if (u.position[k] < lo[k]) {
        u.position[k] = lo[k];
        u.velocity[k] = 0.0;
      } else if (u.position[k] > hi[k]) {
        u.position[k] = hi[k];
        u.velocity[k] = 0.0;
      }
    }
  }
  next.slot = world.slot + 1;
  for (const auto& wp : world.user_script) {
    if (wp.slot == next.slot && wp.user < next.users.size()) {
      next.users[wp.user].position = Vec3(wp.position.x(), wp.position.y(), 0.0);
    }
  }
  return next;
}

namespace {

double assignment_cost(std::span<const GroundUser> users, const std::vector<Vec2>& centers,
                       const std::vector<std::size_t>& assignment) {
  double cost = 0.0;
  for (std::size_t m = 0; m < users.size(); ++m) {
    cost += (users[m].position.head<2>() - centers[assignment[m]]).squaredNorm();
  }
  return cost;
}

}  // namespace

KMeansResult kmeans_cluster(std::span<const GroundUser> users, std::size_t n_uavs,
                            std::uint64_t seed, double altitude,
                            std::size_t max_iterations) {
  if (n_uavs == 0) throw ConfigError("kmeans: need at least one cluster");
  if (n_uavs > users.size()) throw ConfigError("kmeans: more UAVs than ground users");

  // Distinct horizontal positions bound the number of non-empty clusters.
  std::vector<Vec2> distinct;
  for (const auto& u : users) {
    const Vec2 p = u.position.head<2>();
    if (std::none_of(distinct.begin(), distinct.end(),
                     [&](const Vec2& d) { return d == p; })) {
      distinct.push_back(p);
    }
  }
  if (distinct.size() < n_uavs)
    throw DuplicateCentroidError("kmeans: fewer distinct user positions than UAVs");

  // Seeded random-point initialization over distinct positions (no duplicates).
  Rng rng(seed);
  std::vector<std::size_t> order(distinct.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < n_uavs; ++k) {
    const std::size_t pick = k + rng.index(order.size() - k);
    std::swap(order[k], order[pick]);
  }
  std::vector<Vec2> centers(n_uavs);
  for (std::size_t k = 0; k < n_uavs; ++k) centers[k] = distinct[order[k]];

  KMeansResult result;
  std::vector<std::size_t> assignment(users.size(), 0);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = iter == 0;
    for (std::size_t m = 0; m < users.size(); ++m) {
      const Vec2 p = users[m].position.head<2>();
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n_uavs; ++k) {
        const double d = (p - centers[k]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (assignment[m] != best) changed = true;
      assignment[m] = best;
    }
    result.cost_history.push_back(assignment_cost(users, centers, assignment));

    std::vector<Vec2> sums(n_uavs, Vec2::Zero());
    std::vector<std::size_t> counts(n_uavs, 0);
    for (std::size_t m = 0; m < users.size(); ++m) {
      sums[assignment[m]] += users[m].position.head<2>();
      ++counts[assignment[m]];
    }
    for (std::size_t k = 0; k < n_uavs; ++k) {
      // An emptied cluster keeps its previous center.
      if (counts[k] > 0) centers[k] = sums[k] / static_cast<double>(counts[k]);
    }
    result.cost_history.push_back(assignment_cost(users, centers, assignment));
    result.iterations = iter + 1;
    if (!changed) break;
  }

  result.assignment = assignment;
  result.centroids.reserve(n_uavs);
  for (const auto& c : centers) result.centroids.emplace_back(c.x(), c.y(), altitude);
  return result;
}

std::vector<Vec3> kmeans_init(std::span<const GroundUser> users, std::size_t n_uavs,
                              std::uint64_t seed, const Vec2& altitude_band) {
  const double altitude = 0.5 * (altitude_band.x() + altitude_band.y());
  return kmeans_cluster(users, n_uavs, seed, altitude).centroids;
}

}  // namespace uavnet
