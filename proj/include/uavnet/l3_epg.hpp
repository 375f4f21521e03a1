#pragma once

#include "uavnet/epg_core.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace uavnet {

struct LinkMove {
  enum class Kind { keep, drop, add };
  Kind kind = Kind::keep;
  std::size_t peer = 0;  // ignored for keep

  friend bool operator==(const LinkMove&, const LinkMove&) = default;
};

// The no-op first, then one drop per gate-eligible active link in peer order,
// then (allow_readd only) one add per absent in-range link.
std::vector<LinkMove> candidate_set(std::size_t i, const WorldState& world,
                                    const LinkTopology& topo, const GameConfig& cfg);

// softmax(u / T), stabilized by subtracting the maximum.
Vector move_probabilities(const Vector& utilities, double temperature);

LinkTopology apply_move(const LinkTopology& topo, std::size_t i, const LinkMove& move);

struct L3StepResult {
  LinkTopology topology;
  LinkMove move;
  bool accepted = true;  // false when the connectivity guard rejected a drop
  Vector probabilities;
};

// One log-linear revision by UAV i.
L3StepResult l3_step(std::size_t i, const WorldState& world, const LinkTopology& topo,
                     const RadioEnvironment& env, const GameConfig& cfg,
                     const EnergyParams& eparams, Rng& rng);

class L3Stepper final : public GameStepper {
 public:
  L3Stepper(const WorldState& world, LinkTopology topo, const GameConfig& cfg,
            const ModelParams& model);

  std::size_t players() const override { return world_.n_uavs(); }
  std::optional<DeviationAudit> revise(std::size_t player, std::size_t round, Rng& rng) override;
  double potential() const override;
  Vector utilities() const override;
  std::size_t link_count() const override { return topo_.link_count(); }
  double progress() const override { return static_cast<double>(topo_.link_count()); }
  BinaryMatrix adjacency() const override { return topo_.adjacency(); }

  const LinkTopology& topology() const { return topo_; }
  const RadioEnvironment& environment() const { return env_; }
  // λ2 of every topology accepted so far, including the initial one.
  const std::vector<double>& lambda2_history() const { return lambda2_; }

 private:
  const WorldState& world_;
  LinkTopology topo_;
  GameConfig cfg_;
  ModelParams model_;
  RadioEnvironment env_;
  std::vector<double> lambda2_;
};

struct P1Result {
  LinkTopology topology;
  ConvergenceTrace trace;
  std::vector<std::pair<std::size_t, std::size_t>> pruned_out_of_range;
  std::vector<double> lambda2_history;
};

// Full connect within R_c, then log-linear pruning. Throws ConnectivityError
// when the in-range graph is already disconnected.
P1Result solve_p1(const WorldState& world, const GameConfig& cfg, const ModelParams& model,
                  std::uint64_t seed, bool snapshots = false);

}  // namespace uavnet
