#include "uavnet/epg_core.hpp"

#include "uavnet/errors.hpp"

#include <cmath>
#include <limits>

namespace uavnet {

void GameConfig::validate() const {
  for (const auto* triple : {&eta, &psi, &objective_weights}) {
    for (double w : *triple) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("weights must be finite and >= 0");
    }
  }
  const double scale[] = {scales.throughput, scales.energy, scales.latency, scales.interference};
  for (double s : scale) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("game.scales must be positive");
  }
  if (!(temperature > 0.0)) throw ConfigError("game.temperature must be positive");
  if (!(grad_step_pos > 0.0)) throw ConfigError("game.grad_step_pos must be positive");
  if (!(grad_step_power > 0.0)) throw ConfigError("game.grad_step_power must be positive");
  if (!(fd_epsilon > 0.0)) throw ConfigError("game.fd_epsilon must be positive");
  if (!(explore_eps0 >= 0.0 && explore_eps0 <= 1.0))
    throw ConfigError("game.explore_eps0 must lie in [0, 1]");
  if (!(explore_decay > 0.0 && explore_decay <= 1.0))
    throw ConfigError("game.explore_decay must lie in (0, 1]");
  if (!(explore_radius > 0.0)) throw ConfigError("game.explore_radius must be positive");
  if (stall_window == 0) throw ConfigError("game.stall_window must be >= 1");
  if (!(stall_tolerance >= 0.0)) throw ConfigError("game.stall_tolerance must be >= 0");
}

// ---- link game ----------------------------------------------------------

double link_interference(std::size_t i, const LinkTopology& topo, const RadioEnvironment& env,
                         UtilityConvention convention) {
  double sum = 0.0;
  for (std::size_t j : topo.neighbors(i)) {
    sum += env.interference_a2a(j, i);
    if (convention == UtilityConvention::aligned) sum += env.interference_a2a(i, j);
  }
  return sum;
}

namespace {

double comm_term(std::size_t i, const WorldState& world, const EnergyParams& eparams) {
  return comm_energy(world.uavs[i].tx_power, eparams, world.slot_length);
}

}  // namespace

double utility_link(std::size_t i, const WorldState& world, const LinkTopology& topo,
                    const RadioEnvironment& env, const GameConfig& cfg,
                    const EnergyParams& eparams) {
  const auto& s = cfg.scales;
  return -(cfg.eta[0] * static_cast<double>(topo.degree(i)) +
           cfg.eta[1] * s.interference * link_interference(i, topo, env, cfg.convention) +
           cfg.eta[2] * s.energy * comm_term(i, world, eparams));
}

double potential_link_term(std::size_t i, const WorldState& world, const LinkTopology& topo,
                           const RadioEnvironment& env, const GameConfig& cfg,
                           const EnergyParams& eparams) {
  if (cfg.convention == UtilityConvention::literal)
    return utility_link(i, world, topo, env, cfg, eparams);
  // Pair terms are shared by both endpoints, so each endpoint carries half.
  const auto& s = cfg.scales;
  return -(0.5 * cfg.eta[0] * static_cast<double>(topo.degree(i)) +
           0.5 * cfg.eta[1] * s.interference *
               link_interference(i, topo, env, UtilityConvention::aligned) +
           cfg.eta[2] * s.energy * comm_term(i, world, eparams));
}

double potential_link(const WorldState& world, const LinkTopology& topo,
                      const RadioEnvironment& env, const GameConfig& cfg,
                      const EnergyParams& eparams) {
  double phi = 0.0;
  for (std::size_t i = 0; i < topo.size(); ++i)
    phi += potential_link_term(i, world, topo, env, cfg, eparams);
  return phi;
}

// ---- deployment game ------------------------------------------------------

double utility_deploy(std::size_t i, const DeployMetrics& metrics, const GameConfig& cfg) {
  const auto k = static_cast<Eigen::Index>(i);
  const auto& s = cfg.scales;
  return cfg.psi[0] * s.throughput * metrics.throughput(k) -
         cfg.psi[1] * s.energy * metrics.energy(k) - cfg.psi[2] * s.latency * metrics.latency(k);
}

double utility_deploy(std::size_t i, const WorldState& world, const LinkTopology& topo,
                      const Association& assoc, const RadioEnvironment& env,
                      const GameConfig& cfg, const ModelParams& model) {
  return utility_deploy(i, deploy_metrics(world, topo, assoc, env, model), cfg);
}

Vector deploy_utilities(const DeployMetrics& metrics, const GameConfig& cfg) {
  Vector u(metrics.throughput.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    u(i) = utility_deploy(static_cast<std::size_t>(i), metrics, cfg);
  return u;
}

double potential_deploy(const DeployMetrics& metrics, const GameConfig& cfg) {
  double phi = 0.0;
  for (Eigen::Index i = 0; i < metrics.throughput.size(); ++i)
    phi += utility_deploy(static_cast<std::size_t>(i), metrics, cfg);
  return phi;
}

double potential_deploy(const WorldState& world, const LinkTopology& topo,
                        const Association& assoc, const RadioEnvironment& env,
                        const GameConfig& cfg, const ModelParams& model) {
  return potential_deploy(deploy_metrics(world, topo, assoc, env, model), cfg);
}

double deploy_decision_utility(std::size_t i, const DeployMetrics& metrics,
                               const GameConfig& cfg) {
  if (cfg.convention == UtilityConvention::literal) return utility_deploy(i, metrics, cfg);
  return potential_deploy(metrics, cfg);
}

// ---- global objective -----------------------------------------------------

ConstraintReport check_constraints(const WorldState& world, const LinkTopology& topo,
                                   const Association& assoc, const NetworkTotals& totals) {
  ConstraintReport rep;
  for (std::size_t k = 0; k < world.n_users(); ++k) {
    bool covered = false;
    for (std::size_t i = 0; i < world.n_uavs(); ++i) {
      if (!assoc.serves(i, k)) continue;
      covered = true;
      if (distance(world.uavs[i].position, world.users[k].position) > world.comm_radius)
        rep.out_of_range.emplace_back(i, k);
    }
    if (!covered) rep.uncovered_users.push_back(k);
  }
  for (std::size_t i = 0; i < world.n_uavs(); ++i) {
    const auto& u = world.uavs[i];
    if (u.tx_power < world.p_min() || u.tx_power > world.p_max()) rep.power_violations.push_back(i);
    if (!world.in_flight_region(u.position)) rep.region_violations.push_back(i);
  }
  rep.lambda2 = algebraic_connectivity(topo);
  rep.disconnected = !is_connected(topo);
  rep.energy_violations = totals.energy_violations;
  return rep;
}

ObjectiveReport global_objective(const WorldState& world, const LinkTopology& topo,
                                 const Association& assoc, const RadioEnvironment& env,
                                 const GameConfig& cfg, const ModelParams& model) {
  const Throughput th = throughput(world, topo, assoc, env);
  const NetworkTotals totals =
      network_totals(world, topo, assoc, env, model.energy, model.latency);
  ObjectiveReport rep;
  rep.link_count = static_cast<double>(topo.link_count());
  rep.throughput = th.total;
  rep.energy = totals.energy;
  rep.latency = totals.latency;
  const auto& w = cfg.objective_weights;
  const auto& s = cfg.scales;
  rep.value = rep.link_count - w[0] * s.throughput * rep.throughput +
              w[1] * s.energy * rep.energy + w[2] * s.latency * rep.latency;
  rep.constraints = check_constraints(world, topo, assoc, totals);
  return rep;
}

// ---- audits -----------------------------------------------------------------

DeviationAudit audit_link_deviation(const WorldState& world, const RadioEnvironment& env,
                                    const LinkTopology& before, const LinkTopology& after,
                                    std::size_t player, const GameConfig& cfg,
                                    const EnergyParams& eparams) {
  if (before.size() != after.size() || player >= before.size())
    throw ContractViolation("audit_link_deviation: mismatched topologies or player");
  const BinaryMatrix diff = (before.adjacency().array() != after.adjacency().array()).cast<std::uint8_t>();
  for (Eigen::Index r = 0; r < diff.rows(); ++r) {
    for (Eigen::Index c = 0; c < diff.cols(); ++c) {
      if (diff(r, c) && r != static_cast<Eigen::Index>(player) &&
          c != static_cast<Eigen::Index>(player))
        throw ContractViolation("audit_link_deviation: change not incident to the player");
    }
  }
  const double du = utility_link(player, world, after, env, cfg, eparams) -
                    utility_link(player, world, before, env, cfg, eparams);
  const double phi_after = potential_link(world, after, env, cfg, eparams);
  const double dphi = phi_after - potential_link(world, before, env, cfg, eparams);
  return make_audit(0, player, du, dphi, phi_after, after.link_count());
}

DeviationAudit audit_deploy_metrics(const DeployMetrics& before, const DeployMetrics& after,
                                    std::size_t player, const GameConfig& cfg) {
  const Vector ub = deploy_utilities(before, cfg);
  const Vector ua = deploy_utilities(after, cfg);
  const auto p = static_cast<Eigen::Index>(player);
  double du = ua(p) - ub(p);
  if (cfg.convention == UtilityConvention::aligned) {
    // Opponents' utilities frozen at the incumbent: their changes are charged to the mover.
    for (Eigen::Index k = 0; k < ua.size(); ++k) {
      if (k != p) du += ua(k) - ub(k);
    }
  }
  const double phi_after = potential_deploy(after, cfg);
  const double dphi = phi_after - potential_deploy(before, cfg);
  return make_audit(0, player, du, dphi, phi_after, 0);
}

DeviationAudit audit_deploy_deviation(const DeployState& before, const DeployState& after,
                                      std::size_t player, const GameConfig& cfg,
                                      const ModelParams& model) {
  const auto& wb = before.world;
  const auto& wa = after.world;
  if (wb.n_uavs() != wa.n_uavs() || wb.n_users() != wa.n_users() || player >= wb.n_uavs())
    throw ContractViolation("audit_deploy_deviation: mismatched states or player");
  if (!(before.topo == after.topo))
    throw ContractViolation("audit_deploy_deviation: topology differs");
  for (std::size_t i = 0; i < wb.n_uavs(); ++i) {
    if (i == player) continue;
    if (wb.uavs[i].position != wa.uavs[i].position || wb.uavs[i].tx_power != wa.uavs[i].tx_power)
      throw ContractViolation("audit_deploy_deviation: more than one UAV moved");
  }
  // A user may change server only by moving onto or off the player.
  for (std::size_t k = 0; k < wb.n_users(); ++k) {
    if (before.assoc.served.col(k) == after.assoc.served.col(k)) continue;
    if (before.assoc.serves(player, k) == after.assoc.serves(player, k))
      throw ContractViolation("audit_deploy_deviation: association change not involving player");
  }
  const auto mb = deploy_metrics(wb, before.topo, before.assoc,
                                 build_environment(wb, before.topo, before.assoc, model.radio), model);
  const auto ma = deploy_metrics(wa, after.topo, after.assoc,
                                 build_environment(wa, after.topo, after.assoc, model.radio), model);
  auto audit = audit_deploy_metrics(mb, ma, player, cfg);
  audit.link_count = after.topo.link_count();
  return audit;
}

// ---- statistics -------------------------------------------------------------

namespace {

ConsistencyStats stats_of(const std::vector<const DeviationAudit*>& rows) {
  ConsistencyStats st;
  st.samples = rows.size();
  if (rows.empty()) {
    st.correlation = st.r2 = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  double mx = 0.0, my = 0.0;
  for (const auto* a : rows) {
    mx += a->delta_utility;
    my += a->delta_potential;
    st.max_residual = std::max(st.max_residual, a->residual);
    st.max_scaled_residual =
        std::max(st.max_scaled_residual, a->residual / std::max(1.0, std::abs(a->delta_potential)));
  }
  const double n = static_cast<double>(rows.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto* a : rows) {
    const double dx = a->delta_utility - mx;
    const double dy = a->delta_potential - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    st.correlation = st.r2 = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  st.correlation = sxy / std::sqrt(sxx * syy);
  // R² of the least-squares line ΔΦ = a + b·Δρ: 1 − SS_res/SS_tot.
  const double b = sxy / sxx;
  double ss_res = 0.0;
  for (const auto* a : rows) {
    const double fit = my + b * (a->delta_utility - mx);
    ss_res += (a->delta_potential - fit) * (a->delta_potential - fit);
  }
  st.r2 = 1.0 - ss_res / syy;
  return st;
}

}  // namespace

ConsistencyStats consistency(const std::vector<DeviationAudit>& audits) {
  std::vector<const DeviationAudit*> rows;
  rows.reserve(audits.size());
  for (const auto& a : audits) rows.push_back(&a);
  return stats_of(rows);
}

ConsistencyStats consistency(const std::vector<DeviationAudit>& audits, std::size_t player) {
  std::vector<const DeviationAudit*> rows;
  for (const auto& a : audits) {
    if (a.player == player) rows.push_back(&a);
  }
  return stats_of(rows);
}

// ---- game loop ----------------------------------------------------------------

ConvergenceTrace run_game(GameStepper& stepper, const GameConfig& cfg, std::uint64_t seed,
                          bool snapshots) {
  Rng rng(seed);
  ConvergenceTrace trace;
  trace.initial_potential = stepper.potential();
  trace.initial_link_count = stepper.link_count();
  double last = stepper.progress();
  std::size_t still = 0;
  for (std::size_t round = 0; round < cfg.max_rounds; ++round) {
    for (std::size_t p = 0; p < stepper.players(); ++p) {
      if (auto audit = stepper.revise(p, round, rng)) {
        audit->round = round;
        audit->player = p;
        trace.audits.push_back(*audit);
      }
    }
    stepper.end_round(round, rng);
    trace.potential.push_back(stepper.potential());
    trace.utilities.push_back(stepper.utilities());
    trace.link_count.push_back(stepper.link_count());
    if (snapshots) trace.snapshots.push_back(stepper.adjacency());
    trace.rounds = round + 1;

    const double now = stepper.progress();
    const bool unchanged = std::abs(now - last) <= cfg.stall_tolerance * std::max(1.0, std::abs(last));
    still = unchanged ? still + 1 : 0;
    last = now;
    if (still >= cfg.stall_window) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

}  // namespace uavnet
