#include "uavnet/l3_epg.hpp"

#include "uavnet/errors.hpp"

#include <cmath>

namespace uavnet {

namespace {

bool drop_eligible(int los, DropGate gate) {
  switch (gate) {
    case DropGate::los_only: return los == 1;
    case DropGate::nlos_only: return los == 0;
    case DropGate::any: return true;
  }
  return false;
}

}  // namespace

std::vector<LinkMove> candidate_set(std::size_t i, const WorldState& world,
                                    const LinkTopology& topo, const GameConfig& cfg) {
  std::vector<LinkMove> moves{{LinkMove::Kind::keep, i}};
  const Vec3& qi = world.uavs.at(i).position;
  for (std::size_t j = 0; j < topo.size(); ++j) {
    if (j == i || !topo.has_link(i, j)) continue;
    if (drop_eligible(los_between(qi, world.uavs[j].position, world.obstacles), cfg.drop_gate))
      moves.push_back({LinkMove::Kind::drop, j});
  }
  if (cfg.allow_readd) {
    for (std::size_t j = 0; j < topo.size(); ++j) {
      if (j == i || topo.has_link(i, j)) continue;
      if (distance(qi, world.uavs[j].position) <= world.comm_radius)
        moves.push_back({LinkMove::Kind::add, j});
    }
  }
  return moves;
}

Vector move_probabilities(const Vector& utilities, double temperature) {
  if (utilities.size() == 0) throw DomainError("move_probabilities: empty utility list");
  if (!(temperature > 0.0)) throw DomainError("move_probabilities: temperature must be positive");
  const Vector z = utilities / temperature;
  const Vector e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

LinkTopology apply_move(const LinkTopology& topo, std::size_t i, const LinkMove& move) {
  switch (move.kind) {
    case LinkMove::Kind::keep: return topo;
    case LinkMove::Kind::drop: return topo.with_link(i, move.peer, false);
    case LinkMove::Kind::add: return topo.with_link(i, move.peer, true);
  }
  return topo;
}

L3StepResult l3_step(std::size_t i, const WorldState& world, const LinkTopology& topo,
                     const RadioEnvironment& env, const GameConfig& cfg,
                     const EnergyParams& eparams, Rng& rng) {
  const auto moves = candidate_set(i, world, topo, cfg);
  Vector u(static_cast<Eigen::Index>(moves.size()));
  // The channel does not depend on the topology, so one environment prices
  // every candidate exactly.
  for (std::size_t c = 0; c < moves.size(); ++c)
    u(static_cast<Eigen::Index>(c)) = utility_link(i, world, apply_move(topo, i, moves[c]), env, cfg, eparams);

  L3StepResult res{topo, moves.front(), true, move_probabilities(u, cfg.temperature)};
  // Inverse-CDF sampling in candidate order.
  const double r = rng.uniform();
  double acc = 0.0;
  std::size_t pick = moves.size() - 1;
  for (std::size_t c = 0; c < moves.size(); ++c) {
    acc += res.probabilities(static_cast<Eigen::Index>(c));
    if (r < acc) {
      pick = c;
      break;
    }
  }
  res.move = moves[pick];
  if (res.move.kind == LinkMove::Kind::drop) {
    const auto guarded = guarded_remove(topo, i, res.move.peer);
    res.topology = guarded.topology;
    res.accepted = guarded.accepted;
  } else {
    res.topology = apply_move(topo, i, res.move);
  }
  return res;
}

L3Stepper::L3Stepper(const WorldState& world, LinkTopology topo, const GameConfig& cfg,
                     const ModelParams& model)
    : world_(world), topo_(std::move(topo)), cfg_(cfg), model_(model) {
  RadioParams radio = model_.radio;
  radio.fading = FadingMode::expected;
  env_ = build_environment(world_, topo_, Association(world_.n_uavs(), world_.n_users()), radio);
  lambda2_.push_back(algebraic_connectivity(topo_));
}

std::optional<DeviationAudit> L3Stepper::revise(std::size_t player, std::size_t /*round*/,
                                                Rng& rng) {
  auto step = l3_step(player, world_, topo_, env_, cfg_, model_.energy, rng);
  if (!step.accepted) return std::nullopt;
  auto audit = audit_link_deviation(world_, env_, topo_, step.topology, player, cfg_, model_.energy);
  if (!(step.topology == topo_)) lambda2_.push_back(algebraic_connectivity(step.topology));
  topo_ = std::move(step.topology);
  return audit;
}

double L3Stepper::potential() const {
  return potential_link(world_, topo_, env_, cfg_, model_.energy);
}

Vector L3Stepper::utilities() const {
  Vector u(static_cast<Eigen::Index>(world_.n_uavs()));
  for (std::size_t i = 0; i < world_.n_uavs(); ++i)
    u(static_cast<Eigen::Index>(i)) = utility_link(i, world_, topo_, env_, cfg_, model_.energy);
  return u;
}

P1Result solve_p1(const WorldState& world, const GameConfig& cfg, const ModelParams& model,
                  std::uint64_t seed, bool snapshots) {
  cfg.validate();
  const std::size_t n = world.n_uavs();
  P1Result out;
  LinkTopology topo = LinkTopology::complete(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(world.uavs[i].position, world.uavs[j].position) > world.comm_radius) {
        topo = topo.with_link(i, j, false);
        out.pruned_out_of_range.emplace_back(i, j);
      }
    }
  }
  if (!is_connected(topo))
    throw ConnectivityError("solve_p1: UAVs within comm_radius do not form a connected graph");
  L3Stepper stepper(world, topo, cfg, model);
  out.trace = run_game(stepper, cfg, seed, snapshots);
  out.topology = stepper.topology();
  out.lambda2_history = stepper.lambda2_history();
  return out;
}

}  // namespace uavnet
