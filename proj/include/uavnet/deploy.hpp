#pragma once

#include "uavnet/channel.hpp"
#include "uavnet/metrics.hpp"
#include "uavnet/scenario.hpp"
#include "uavnet/topology.hpp"

#include <vector>

namespace uavnet {

struct ModelParams {
  RadioParams radio;
  EnergyParams energy;
  LatencyParams latency;

  void validate() const {
    radio.validate();
    energy.validate();
    latency.validate();
  }
};

// Per-UAV ingredients of the deployment utility.
struct DeployMetrics {
  Vector throughput;  // Th_i, bits/s
  Vector energy;      // E_i, J per slot
  Vector latency;     // 𝕋_i, s

  double total_throughput() const;
  double total_energy() const;
  double total_latency() const;
};

// Th_i, E_i, 𝕋_i from expected-mode gain matrices. Uses the same formulas and
// summation order as build_environment/throughput/network_totals, so the two
// paths agree bit for bit.
DeployMetrics deploy_metrics(const WorldState& world, const LinkTopology& topo,
                             const Association& assoc, const Matrix& gain_a2a,
                             const Matrix& gain_a2g, double noise, const ModelParams& model);

DeployMetrics deploy_metrics(const WorldState& world, const LinkTopology& topo,
                             const Association& assoc, const RadioEnvironment& env,
                             const ModelParams& model);

// One UAV's continuous strategy.
struct DeployStrategy {
  Vec3 position = Vec3::Zero();
  double power = 0.0;

  friend bool operator==(const DeployStrategy& a, const DeployStrategy& b) {
    return a.position == b.position && a.power == b.power;
  }
};

// P2 state. Velocities are implied by displacement from `anchor` over one slot.
struct DeployState {
  WorldState world;
  LinkTopology topo;
  Association assoc;
  std::vector<Vec3> anchor;

  DeployStrategy strategy(std::size_t i) const {
    return {world.uavs[i].position, world.uavs[i].tx_power};
  }
};

// Sets anchor = current positions and zeroes velocities.
DeployState make_deploy_state(const WorldState& world, const LinkTopology& topo,
                              const Association& assoc);

// Writes strategy s into UAV i, including the anchor-implied velocity.
void apply_strategy(DeployState& state, std::size_t i, const DeployStrategy& s);

// (24c)/(24d) box plus (24b) for users currently served by i.
bool strategy_feasible(const DeployState& state, std::size_t i, const DeployStrategy& s);

// Caches gain matrices for one state and prices single-UAV deviations by
// recomputing only that UAV's row and column.
class DeployEvaluator {
 public:
  DeployEvaluator(DeployState state, ModelParams model);

  const DeployState& state() const { return state_; }
  const ModelParams& model() const { return model_; }
  const DeployMetrics& metrics() const { return metrics_; }
  const Matrix& gain_a2a() const { return gain_a2a_; }
  const Matrix& gain_a2g() const { return gain_a2g_; }
  double noise() const { return noise_; }

  DeployMetrics evaluate(std::size_t i, const DeployStrategy& s) const;
  void commit(std::size_t i, const DeployStrategy& s);
  void set_association(const Association& assoc);
  RadioEnvironment environment() const;

 private:
  void refresh_row(std::size_t i, Matrix& a2a, Matrix& a2g, const Vec3& q) const;

  DeployState state_;
  ModelParams model_;
  double noise_ = 0.0;
  Matrix gain_a2a_;
  Matrix gain_a2g_;
  DeployMetrics metrics_;
};

}  // namespace uavnet
