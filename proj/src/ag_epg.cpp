#include "uavnet/ag_epg.hpp"

#include "uavnet/errors.hpp"

#include <cmath>

namespace uavnet {

namespace {

double decision_utility(std::size_t i, const DeployEvaluator& eval, const GameConfig& cfg,
                        const DeployStrategy& s) {
  return deploy_decision_utility(i, eval.evaluate(i, s), cfg);
}

// Clamps coordinate `axis` (0..2 position, 3 power) into its box.
double clamp_axis(const WorldState& w, int axis, double v) {
  switch (axis) {
    case 0: return std::clamp(v, 0.0, w.area.x());
    case 1: return std::clamp(v, 0.0, w.area.y());
    case 2: return std::clamp(v, w.z_min(), w.z_max());
    default: return std::clamp(v, w.p_min(), w.p_max());
  }
}

double get_axis(const DeployStrategy& s, int axis) {
  return axis < 3 ? s.position(axis) : s.power;
}

void set_axis(DeployStrategy& s, int axis, double v) {
  if (axis < 3) s.position(axis) = v;
  else s.power = v;
}

DeployStrategy project(const WorldState& w, DeployStrategy s) {
  s.position = w.project_to_flight_region(s.position);
  s.power = w.project_power(s.power);
  return s;
}

}  // namespace

DeployGradient approx_gradient(std::size_t i, const DeployEvaluator& eval, const GameConfig& cfg,
                               const DeployStrategy& base, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("approx_gradient: epsilon must be positive");
  const auto& w = eval.state().world;
  // Probes scale with each axis's step so that metres and watts see comparable
  // relative perturbations.
  const double h_power = epsilon * cfg.grad_step_power / cfg.grad_step_pos;
  double g[4] = {0, 0, 0, 0};
  for (int axis = 0; axis < 4; ++axis) {
    const double h = axis < 3 ? epsilon : h_power;
    const double x = get_axis(base, axis);
    const double hi = clamp_axis(w, axis, x + h);
    const double lo = clamp_axis(w, axis, x - h);
    if (!(hi > lo)) continue;
    DeployStrategy sp = base, sm = base;
    set_axis(sp, axis, hi);
    set_axis(sm, axis, lo);
    g[axis] = (decision_utility(i, eval, cfg, sp) - decision_utility(i, eval, cfg, sm)) / (hi - lo);
  }
  return {Vec3(g[0], g[1], g[2]), g[3]};
}

DeployGradient approx_gradient(std::size_t i, const DeployEvaluator& eval, const GameConfig& cfg,
                               double epsilon) {
  return approx_gradient(i, eval, cfg, eval.state().strategy(i), epsilon);
}

DeployGradient approx_gradient(std::size_t i, const DeployEvaluator& eval, const GameConfig& cfg) {
  return approx_gradient(i, eval, cfg, eval.state().strategy(i), cfg.fd_epsilon);
}

double exploration_probability(const GameConfig& cfg, std::size_t round) {
  return cfg.explore_eps0 * std::pow(cfg.explore_decay, static_cast<double>(round));
}

BestResponse best_response_continuous(std::size_t i, const DeployEvaluator& eval,
                                      const GameConfig& cfg, std::size_t round, Rng& rng,
                                      const BestResponseOptions& opts) {
  const auto& state = eval.state();
  const auto& w = state.world;
  BestResponse br;
  br.strategy = state.strategy(i);
  br.incumbent_utility = br.utility = decision_utility(i, eval, cfg, br.strategy);

  if (opts.explore && rng.bernoulli(exploration_probability(cfg, round))) {
    br.explored = true;
    const double r = cfg.explore_radius;
    DeployStrategy prop = br.strategy;
    for (int k = 0; k < 3; ++k) prop.position(k) += rng.uniform(-r, r);
    prop.power = rng.uniform(w.p_min(), w.p_max());
    prop = project(w, prop);
    if (strategy_feasible(state, i, prop)) {
      const double u = decision_utility(i, eval, cfg, prop);
      // The incumbent is the memory of past decisions: keep it unless beaten.
      if (u > br.utility) {
        br.strategy = prop;
        br.utility = u;
      }
    }
    return br;
  }

  for (std::size_t it = 0; it < cfg.inner_iterations; ++it) {
    const DeployGradient g = approx_gradient(i, eval, cfg, br.strategy, cfg.fd_epsilon);
    const double gnorm = g.position.norm();
    if (gnorm == 0.0 && g.power == 0.0) break;
    const Vec3 dir = gnorm > 0.0 ? Vec3(g.position / gnorm) : Vec3::Zero();
    const double pdir = (g.power > 0.0) - (g.power < 0.0);
    double step = 1.0;
    bool improved = false;
    const std::size_t tries = opts.backtracking ? kMaxBacktracks : 1;
    for (std::size_t b = 0; b < tries && !improved; ++b, step *= 0.5) {
      DeployStrategy cand = br.strategy;
      cand.position += step * cfg.grad_step_pos * dir;
      cand.power += step * cfg.grad_step_power * pdir;
      cand = project(w, cand);
      if (cand == br.strategy || !strategy_feasible(state, i, cand)) continue;
      const double u = decision_utility(i, eval, cfg, cand);
      if (u - br.utility > kMinUtilityGain) {
        br.strategy = cand;
        br.utility = u;
        improved = true;
      }
    }
    br.iterations = it + 1;
    if (!improved) break;
  }
  return br;
}

Association reassign_users(const WorldState& world, const RadioEnvironment& env) {
  Association assoc(world.n_uavs(), world.n_users());
  for (std::size_t k = 0; k < world.n_users(); ++k) {
    std::optional<std::size_t> best;
    double best_rate = -1.0;
    for (std::size_t i = 0; i < world.n_uavs(); ++i) {
      if (distance(world.uavs[i].position, world.users[k].position) > world.comm_radius) continue;
      const double r = env.rate_a2g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (r > best_rate) {
        best_rate = r;
        best = i;
      }
    }
    if (!best)
      throw InfeasibleCoverageError(k, "reassign_users: no UAV within comm_radius of user " +
                                           std::to_string(k));
    assoc.served(static_cast<Eigen::Index>(*best), static_cast<Eigen::Index>(k)) = 1;
  }
  return assoc;
}

DeployStepper::DeployStepper(DeployState state, const GameConfig& cfg, const ModelParams& model,
                             BestResponseOptions opts)
    : eval_(std::move(state), model), cfg_(cfg), opts_(opts) {
  history_.push_back(potential());
}

std::optional<DeviationAudit> DeployStepper::revise(std::size_t player, std::size_t round,
                                                    Rng& rng) {
  const BestResponse br = best_response_continuous(player, eval_, cfg_, round, rng, opts_);
  const DeployMetrics before = eval_.metrics();
  if (!(br.strategy == eval_.state().strategy(player))) eval_.commit(player, br.strategy);
  auto audit = audit_deploy_metrics(before, eval_.metrics(), player, cfg_);
  audit.link_count = link_count();
  history_.push_back(audit.potential);
  return audit;
}

void DeployStepper::end_round(std::size_t /*round*/, Rng& /*rng*/) {
  const auto assoc = reassign_users(eval_.state().world, eval_.environment());
  if (!(assoc == eval_.state().assoc)) {
    eval_.set_association(assoc);
    history_.push_back(potential());
  }
}

DeployState initial_deploy_state(const WorldState& world, const LinkTopology& topo_star,
                                 const ModelParams& model) {
  if (!is_connected(topo_star))
    throw ConnectivityError("P2 requires a connected topology");
  Association empty(world.n_uavs(), world.n_users());
  RadioParams radio = model.radio;
  radio.fading = FadingMode::expected;
  const auto env = build_environment(world, topo_star, empty, radio);
  return make_deploy_state(world, topo_star, reassign_users(world, env));
}

DeployResult solve_p2(const WorldState& world, const LinkTopology& topo_star,
                      const GameConfig& cfg, const ModelParams& model, std::uint64_t seed,
                      bool snapshots) {
  cfg.validate();
  DeployStepper stepper(initial_deploy_state(world, topo_star, model), cfg, model,
                        BestResponseOptions{true, true});
  DeployResult out;
  out.algorithm = "l3_ag";
  out.trace = run_game(stepper, cfg, seed, snapshots);
  out.state = stepper.evaluator().state();
  out.metrics = stepper.evaluator().metrics();
  out.potential_history = stepper.potential_history();
  return out;
}

}  // namespace uavnet
