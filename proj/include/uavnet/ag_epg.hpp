#pragma once

#include "uavnet/deploy.hpp"
#include "uavnet/epg_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace uavnet {

struct DeployGradient {
  Vec3 position = Vec3::Zero();  // per metre
  double power = 0.0;            // per watt
};

// Central differences of the decision utility over (x, y, z, p). Position
// probes are ±epsilon metres; the power probe is epsilon·grad_step_power /
// grad_step_pos watts. Probes are clamped to the flight box and power bounds; a clamped side shortens the
// stencil instead of leaving the box.
DeployGradient approx_gradient(std::size_t i, const DeployEvaluator& eval, const GameConfig& cfg,
                               const DeployStrategy& base, double epsilon);
DeployGradient approx_gradient(std::size_t i, const DeployEvaluator& eval, const GameConfig& cfg,
                               double epsilon);
DeployGradient approx_gradient(std::size_t i, const DeployEvaluator& eval, const GameConfig& cfg);

struct BestResponseOptions {
  bool explore = true;       // ε-greedy random proposals
  bool backtracking = true;  // halve rejected steps instead of stopping
};

struct BestResponse {
  DeployStrategy strategy;
  double utility = 0.0;            // decision utility of `strategy`
  double incumbent_utility = 0.0;
  bool explored = false;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kMaxBacktracks = 8;
inline constexpr double kMinUtilityGain = 1e-9;

double exploration_probability(const GameConfig& cfg, std::size_t round);

// Projected ascent from the incumbent. Never returns a strategy with lower
// decision utility than the incumbent.
BestResponse best_response_continuous(std::size_t i, const DeployEvaluator& eval,
                                      const GameConfig& cfg, std::size_t round, Rng& rng,
                                      const BestResponseOptions& opts = {});

// Each user joins the in-range UAV with the highest r_im; ties go to the lower
// index. Throws InfeasibleCoverageError for a user with no UAV within R_c.
Association reassign_users(const WorldState& world, const RadioEnvironment& env);

// Sequential deployment game on a fixed topology.
class DeployStepper : public GameStepper {
 public:
  DeployStepper(DeployState state, const GameConfig& cfg, const ModelParams& model,
                BestResponseOptions opts);

  std::size_t players() const override { return eval_.state().world.n_uavs(); }
  std::optional<DeviationAudit> revise(std::size_t player, std::size_t round, Rng& rng) override;
  void end_round(std::size_t round, Rng& rng) override;
  double potential() const override { return potential_deploy(eval_.metrics(), cfg_); }
  Vector utilities() const override { return deploy_utilities(eval_.metrics(), cfg_); }
  std::size_t link_count() const override { return eval_.state().topo.link_count(); }
  BinaryMatrix adjacency() const override { return eval_.state().topo.adjacency(); }

  const DeployEvaluator& evaluator() const { return eval_; }
  // Potential after every committed change, reassignments included.
  const std::vector<double>& potential_history() const { return history_; }

 protected:
  DeployEvaluator eval_;
  GameConfig cfg_;
  BestResponseOptions opts_;
  std::vector<double> history_;
};

struct DeployResult {
  std::string algorithm;
  DeployState state;
  DeployMetrics metrics;
  ConvergenceTrace trace;
  std::vector<double> potential_history;
};

// Initial state for every P2 solver: positions anchored, users reassigned.
DeployState initial_deploy_state(const WorldState& world, const LinkTopology& topo_star,
                                 const ModelParams& model);

// AG-EPG. Throws ConnectivityError if topo_star is disconnected.
DeployResult solve_p2(const WorldState& world, const LinkTopology& topo_star,
                      const GameConfig& cfg, const ModelParams& model, std::uint64_t seed,
                      bool snapshots = false);

}  // namespace uavnet
