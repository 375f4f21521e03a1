#pragma once

#include "uavnet/deploy.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/scenario.hpp"

#include <algorithm>
#include <vector>

namespace uavnet::test {

// UAVs and users drawn uniformly in a square; every UAV can reach every user.
inline WorldState random_world(std::size_t n, std::size_t m, std::uint64_t seed,
                               double side = 3000.0) {
  Rng rng(seed);
  WorldState w;
  w.area = {side, side};
  w.comm_radius = 2.0 * side;
  w.slot_length = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    UavState u;
    u.id = i;
    u.position = {rng.uniform(0, side), rng.uniform(0, side), rng.uniform(100, 300)};
    u.tx_power = rng.uniform(0.5, 2.0);
    u.residual_energy = 1e7;
    w.uavs.push_back(u);
  }
  for (std::size_t k = 0; k < m; ++k)
    w.users.push_back({k, {rng.uniform(0, side), rng.uniform(0, side), 0.0}});
  return w;
}

inline Association nearest_assoc(const WorldState& w) {
  Association a(w.n_uavs(), w.n_users());
  for (std::size_t k = 0; k < w.n_users(); ++k) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < w.n_uavs(); ++i) {
      if (distance(w.uavs[i].position, w.users[k].position) <
          distance(w.uavs[best].position, w.users[k].position))
        best = i;
    }
    a.served(best, k) = 1;
  }
  return a;
}

// Random interior state with every UAV displaced from its anchor, so that the
// cubic speed term is smooth.
inline DeployEvaluator smooth_state(std::uint64_t seed) {
  WorldState w = random_world(5, 8, seed);
  const LinkTopology topo = LinkTopology::complete(5);
  DeployState s = make_deploy_state(w, topo, nearest_assoc(w));
  Rng rng(seed + 100);
  for (std::size_t i = 0; i < 5; ++i) {
    Vec3 q = w.uavs[i].position + Vec3(rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-40, 40));
    q.x() = std::clamp(q.x(), 50.0, w.area.x() - 50.0);
    q.y() = std::clamp(q.y(), 50.0, w.area.y() - 50.0);
    q.z() = std::clamp(q.z(), 130.0, 270.0);
    apply_strategy(s, i, {q, rng.uniform(0.8, 1.7)});
  }
  return DeployEvaluator(s, ModelParams{});
}

}  // namespace uavnet::test
