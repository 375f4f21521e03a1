#pragma once

#include "uavnet/channel.hpp"
#include "uavnet/deploy.hpp"
#include "uavnet/metrics.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/scenario.hpp"
#include "uavnet/topology.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace uavnet {

// literal: utilities exactly as written, Φ = Σρ. aligned: the mover's utility
// change equals the potential change by construction.
enum class UtilityConvention { literal, aligned };

// Which active links a UAV may drop in the link game.
enum class DropGate { los_only, any, nlos_only };

// Converts SI quantities into the units the weights act on.
struct UtilityScales {
  double throughput = 1e-6;    // per bit/s  -> Mbit/s
  double energy = 1e-3;        // per J      -> kJ
  double latency = 1.0;        // per s
  double interference = 1e12;  // per W      -> pW

  static UtilityScales unit() { return {1.0, 1.0, 1.0, 1.0}; }
};

struct GameConfig {
  std::array<double, 3> eta{1.0, 1.0, 1.0};
  std::array<double, 3> psi{1.0, 1.0, 1.0};
  std::array<double, 3> objective_weights{1.0, 1.0, 1.0};  // Υ, μ, τ
  UtilityScales scales;
  UtilityConvention convention = UtilityConvention::literal;

  double temperature = 1.0;
  DropGate drop_gate = DropGate::los_only;
  bool allow_readd = false;

  double grad_step_pos = 20.0;    // m
  double grad_step_power = 0.1;   // W
  double fd_epsilon = 1e-2;
  std::size_t inner_iterations = 20;
  double explore_eps0 = 0.2;
  double explore_decay = 0.99;
  double explore_radius = 100.0;  // m, half-width of the exploration cube

  std::size_t max_rounds = 100;
  std::size_t stall_window = 5;
  double stall_tolerance = 1e-9;  // relative change that still counts as a stall

  void validate() const;
};

// ---- link game ----------------------------------------------------------

// Interference-plus-noise at i attributed to its neighbours:
// literal Σ_{j~i} I_{j→i}; aligned Σ_{j~i} (I_{j→i} + I_{i→j}).
double link_interference(std::size_t i, const LinkTopology& topo, const RadioEnvironment& env,
                         UtilityConvention convention);

// ρ_i1 = −(η1·deg_i + η2·I_i + η3·E_comm,i). Under the aligned convention I_i
// uses the symmetric pair weights; this is the mover's decision utility.
double utility_link(std::size_t i, const WorldState& world, const LinkTopology& topo,
                    const RadioEnvironment& env, const GameConfig& cfg,
                    const EnergyParams& eparams);

// Potential summand of UAV i: ρ_i1 (literal) or the halved pair terms (aligned).
double potential_link_term(std::size_t i, const WorldState& world, const LinkTopology& topo,
                           const RadioEnvironment& env, const GameConfig& cfg,
                           const EnergyParams& eparams);

double potential_link(const WorldState& world, const LinkTopology& topo,
                      const RadioEnvironment& env, const GameConfig& cfg,
                      const EnergyParams& eparams);

// ---- deployment game ------------------------------------------------------

// ρ_i2 = ψ1·Th_i − ψ2·E_i − ψ3·𝕋_i.
double utility_deploy(std::size_t i, const DeployMetrics& metrics, const GameConfig& cfg);
double utility_deploy(std::size_t i, const WorldState& world, const LinkTopology& topo,
                      const Association& assoc, const RadioEnvironment& env,
                      const GameConfig& cfg, const ModelParams& model);

Vector deploy_utilities(const DeployMetrics& metrics, const GameConfig& cfg);

// Φ2 = Σ_i ρ_i2 (identical under both conventions).
double potential_deploy(const DeployMetrics& metrics, const GameConfig& cfg);
double potential_deploy(const WorldState& world, const LinkTopology& topo,
                        const Association& assoc, const RadioEnvironment& env,
                        const GameConfig& cfg, const ModelParams& model);

// Utility the mover maximizes, evaluated on a hypothetical state. Literal: ρ_i;
// aligned: Φ2, whose differences equal ρ_i plus the opponents' changes.
double deploy_decision_utility(std::size_t i, const DeployMetrics& metrics,
                               const GameConfig& cfg);

// ---- global objective and constraints --------------------------------------

struct ConstraintReport {
  std::vector<std::size_t> uncovered_users;                       // 24a
  std::vector<std::pair<std::size_t, std::size_t>> out_of_range;  // 24b (uav, user)
  std::vector<std::size_t> power_violations;                      // 24c
  std::vector<std::size_t> region_violations;                     // 24d
  bool disconnected = false;                                      // 24e
  double lambda2 = 0.0;
  std::vector<std::size_t> energy_violations;                     // 24f

  bool feasible() const {
    return uncovered_users.empty() && out_of_range.empty() && power_violations.empty() &&
           region_violations.empty() && !disconnected && energy_violations.empty();
  }
};

ConstraintReport check_constraints(const WorldState& world, const LinkTopology& topo,
                                   const Association& assoc, const NetworkTotals& totals);

struct ObjectiveReport {
  double value = 0.0;
  double link_count = 0.0;
  double throughput = 0.0;  // bits/s
  double energy = 0.0;      // J
  double latency = 0.0;     // s
  ConstraintReport constraints;
};

// |links| − Υ·Th_total + μ·E_total + τ·𝕋_total, with Th, E, 𝕋 in scaled units.
ObjectiveReport global_objective(const WorldState& world, const LinkTopology& topo,
                                 const Association& assoc, const RadioEnvironment& env,
                                 const GameConfig& cfg, const ModelParams& model);

// ---- deviation audit ------------------------------------------------------

struct DeviationAudit {
  std::size_t round = 0;
  std::size_t player = 0;
  double delta_utility = 0.0;
  double delta_potential = 0.0;
  double residual = 0.0;  // |Δρ − ΔΦ|
  double potential = 0.0;  // after the move
  std::size_t link_count = 0;
};

inline DeviationAudit make_audit(std::size_t round, std::size_t player, double du, double dphi,
                                 double potential, std::size_t links) {
  return {round, player, du, dphi, std::abs(du - dphi), potential, links};
}

// Link game: `before` and `after` may differ only in links incident to `player`.
DeviationAudit audit_link_deviation(const WorldState& world, const RadioEnvironment& env,
                                    const LinkTopology& before, const LinkTopology& after,
                                    std::size_t player, const GameConfig& cfg,
                                    const EnergyParams& eparams);

// Deployment game: only `player`'s position, power and served users may differ.
DeviationAudit audit_deploy_deviation(const DeployState& before, const DeployState& after,
                                      std::size_t player, const GameConfig& cfg,
                                      const ModelParams& model);

// Same audit from metrics already computed for both states.
DeviationAudit audit_deploy_metrics(const DeployMetrics& before, const DeployMetrics& after,
                                    std::size_t player, const GameConfig& cfg);

// ---- convergence ------------------------------------------------------------

struct ConsistencyStats {
  std::size_t samples = 0;
  double correlation = 0.0;  // Pearson; NaN when either series is constant
  double r2 = 0.0;           // of the least-squares fit ΔΦ ~ Δρ
  double max_residual = 0.0;
  double max_scaled_residual = 0.0;  // residual / max(1, |ΔΦ|)
};

ConsistencyStats consistency(const std::vector<DeviationAudit>& audits);
ConsistencyStats consistency(const std::vector<DeviationAudit>& audits, std::size_t player);

struct ConvergenceTrace {
  double initial_potential = 0.0;
  std::size_t initial_link_count = 0;
  std::vector<double> potential;          // after each round
  std::vector<Vector> utilities;          // per-UAV utilities after each round
  std::vector<std::size_t> link_count;    // after each round
  std::vector<DeviationAudit> audits;     // every applied revision
  std::vector<BinaryMatrix> snapshots;    // adjacency after each round, when requested
  std::size_t rounds = 0;
  bool converged = false;                 // stalled before max_rounds
};

// One game being played; run_game owns scheduling and termination.
class GameStepper {
 public:
  virtual ~GameStepper() = default;
  virtual std::size_t players() const = 0;
  // Revision opportunity for `player`; returns the audit of the applied change,
  // or nothing when the stepper does not audit (or the move was rejected).
  virtual std::optional<DeviationAudit> revise(std::size_t player, std::size_t round,
                                               Rng& rng) = 0;
  virtual void end_round(std::size_t /*round*/, Rng& /*rng*/) {}
  virtual double potential() const = 0;
  virtual Vector utilities() const = 0;
  virtual std::size_t link_count() const = 0;
  // Stall detection compares this value across rounds.
  virtual double progress() const { return potential(); }
  virtual BinaryMatrix adjacency() const = 0;
};

// Round-robin sequential revisions until progress() is unchanged for
// stall_window consecutive rounds or max_rounds is reached.
ConvergenceTrace run_game(GameStepper& stepper, const GameConfig& cfg, std::uint64_t seed,
                          bool snapshots = false);

}  // namespace uavnet
