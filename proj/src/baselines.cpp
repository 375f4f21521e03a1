#include "uavnet/baselines.hpp"

#include "uavnet/errors.hpp"

#include <cmath>
#include <limits>

namespace uavnet {

void BaselineConfig::validate() const {
  if (etg.grid < 1 || etg.altitude_levels < 1 || etg.power_levels < 1)
    throw ConfigError("baselines.etg: lattice sizes must be >= 1");
  if (!(etg.span >= 0.0)) throw ConfigError("baselines.etg.span must be >= 0");
  if (!(etg.step > 0.0 && etg.step <= 1.0)) throw ConfigError("baselines.etg.step must lie in (0, 1]");
  if (ga.population < 2) throw ConfigError("baselines.ga.population must be >= 2");
  if (!(ga.crossover_rate >= 0.0 && ga.crossover_rate <= 1.0))
    throw ConfigError("baselines.ga.crossover_rate must lie in [0, 1]");
  if (!(ga.mutation_rate >= 0.0 && ga.mutation_rate <= 1.0))
    throw ConfigError("baselines.ga.mutation_rate must lie in [0, 1]");
  if (!(ga.sigma_position > 0.0 && ga.sigma_power > 0.0))
    throw ConfigError("baselines.ga: mutation sigmas must be positive");
}

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::brd_epg: return "brd_epg";
    case BaselineKind::brd_ncg: return "brd_ncg";
    case BaselineKind::etg: return "etg";
    case BaselineKind::ga: return "ga";
  }
  return "unknown";
}

namespace {

DeployResult collect(std::string name, const DeployStepper& stepper, ConvergenceTrace trace) {
  DeployResult out;
  out.algorithm = std::move(name);
  out.trace = std::move(trace);
  out.state = stepper.evaluator().state();
  out.metrics = stepper.evaluator().metrics();
  out.potential_history = stepper.potential_history();
  return out;
}

// Every player answers the round-start state; moves land together.
class SimultaneousStepper final : public DeployStepper {
 public:
  using DeployStepper::DeployStepper;

  std::optional<DeviationAudit> revise(std::size_t player, std::size_t round, Rng& rng) override {
    if (player == 0) {
      frozen_.emplace(eval_);
      pending_.assign(players(), std::nullopt);
    }
    const auto br = best_response_continuous(player, *frozen_, cfg_, round, rng, opts_);
    pending_[player] = br.strategy;
    return std::nullopt;
  }

  void end_round(std::size_t round, Rng& rng) override {
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      if (pending_[i] && !(*pending_[i] == eval_.state().strategy(i))) eval_.commit(i, *pending_[i]);
    }
    history_.push_back(potential());
    frozen_.reset();
    DeployStepper::end_round(round, rng);
  }

 private:
  std::optional<DeployEvaluator> frozen_;
  std::vector<std::optional<DeployStrategy>> pending_;
};

std::vector<double> levels(double lo, double hi, std::size_t n) {
  if (n == 1) return {0.5 * (lo + hi)};
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k)
    v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return v;
}

class EtgStepper final : public DeployStepper {
 public:
  EtgStepper(DeployState state, const GameConfig& cfg, const ModelParams& model,
             const EtgConfig& etg)
      : DeployStepper(std::move(state), cfg, model, {false, false}), etg_(etg) {
    const auto& w = eval_.state().world;
    const auto zs = levels(w.z_min(), w.z_max(), etg.altitude_levels);
    const auto ps = levels(w.p_min(), w.p_max(), etg.power_levels);
    const auto offsets = levels(-etg.span, etg.span, etg.grid);
    for (std::size_t i = 0; i < w.n_uavs(); ++i) {
      const Vec3& a = eval_.state().anchor[i];
      std::vector<DeployStrategy> lattice;
      for (double dx : offsets)
        for (double dy : offsets)
          for (double z : zs)
            for (double p : ps)
              lattice.push_back({w.project_to_flight_region(Vec3(a.x() + dx, a.y() + dy, z)), p});
      const auto k = static_cast<Eigen::Index>(lattice.size());
      shares_.push_back(Vector::Constant(k, 1.0 / static_cast<double>(k)));
      lattice_.push_back(std::move(lattice));
    }
  }

  std::optional<DeviationAudit> revise(std::size_t player, std::size_t /*round*/,
                                       Rng& /*rng*/) override {
    const auto& lattice = lattice_[player];
    const auto k = static_cast<Eigen::Index>(lattice.size());
    Vector f(k);
    std::vector<bool> ok(lattice.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index s = 0; s < k; ++s) {
      ok[s] = strategy_feasible(eval_.state(), player, lattice[s]);
      if (!ok[s]) continue;
      f(s) = deploy_decision_utility(player, eval_.evaluate(player, lattice[s]), cfg_);
      lo = std::min(lo, f(s));
      hi = std::max(hi, f(s));
    }
    if (!(hi >= lo)) return std::nullopt;  // no feasible lattice point
    // Fitness mapped onto [0, 1] keeps every share non-negative for step ≤ 1.
    for (Eigen::Index s = 0; s < k; ++s)
      f(s) = (ok[s] && hi > lo) ? (f(s) - lo) / (hi - lo) : 0.0;
    shares_[player] = replicator_update(shares_[player], f, etg_.step);

    std::optional<Eigen::Index> best;
    for (Eigen::Index s = 0; s < k; ++s) {
      if (ok[s] && (!best || shares_[player](s) > shares_[player](*best))) best = s;
    }
    if (best && !(lattice[*best] == eval_.state().strategy(player))) {
      eval_.commit(player, lattice[*best]);
      history_.push_back(potential());
    }
    return std::nullopt;
  }

 private:
  EtgConfig etg_;
  std::vector<std::vector<DeployStrategy>> lattice_;
  std::vector<Vector> shares_;
};

}  // namespace

DeployResult run_brd_epg(const WorldState& world, const LinkTopology& topo,
                         const GameConfig& cfg, const ModelParams& model, std::uint64_t seed) {
  cfg.validate();
  DeployStepper stepper(initial_deploy_state(world, topo, model), cfg, model, {false, false});
  auto trace = run_game(stepper, cfg, seed);
  return collect("brd_epg", stepper, std::move(trace));
}

DeployResult run_brd_ncg(const WorldState& world, const LinkTopology& topo,
                         const GameConfig& cfg, const ModelParams& model, std::uint64_t seed) {
  cfg.validate();
  GameConfig local = cfg;
  local.convention = UtilityConvention::literal;
  SimultaneousStepper stepper(initial_deploy_state(world, topo, model), local, model,
                              {false, false});
  auto trace = run_game(stepper, local, seed);
  return collect("brd_ncg", stepper, std::move(trace));
}

Vector replicator_update(const Vector& shares, const Vector& fitness, double step) {
  if (shares.size() != fitness.size() || shares.size() == 0)
    throw DomainError("replicator_update: size mismatch");
  const double mean = shares.dot(fitness) / shares.sum();
  Vector next = shares.array() + step * shares.array() * (fitness.array() - mean);
  next = next.cwiseMax(0.0);
  const double total = next.sum();
  if (!(total > 0.0)) throw DomainError("replicator_update: shares collapsed");
  return next / total;
}

DeployResult run_etg(const WorldState& world, const LinkTopology& topo, const GameConfig& cfg,
                     const ModelParams& model, std::uint64_t seed, const EtgConfig& etg) {
  cfg.validate();
  EtgStepper stepper(initial_deploy_state(world, topo, model), cfg, model, etg);
  auto trace = run_game(stepper, cfg, seed);
  return collect("etg", stepper, std::move(trace));
}

Chromosome mutate(const Chromosome& c, const WorldState& world, const GaConfig& ga, Rng& rng) {
  Chromosome out = c;
  for (auto& g : out.genes) {
    for (int k = 0; k < 3; ++k) {
      if (rng.bernoulli(ga.mutation_rate)) g.position(k) += ga.sigma_position * rng.normal();
    }
    if (rng.bernoulli(ga.mutation_rate)) g.power += ga.sigma_power * rng.normal();
    g.position = world.project_to_flight_region(g.position);
    g.power = world.project_power(g.power);
  }
  for (auto& s : out.server) {
    if (rng.bernoulli(ga.mutation_rate)) s = rng.index(world.n_uavs());
  }
  return out;
}

Chromosome uniform_crossover(const Chromosome& a, const Chromosome& b, Rng& rng) {
  if (a.genes.size() != b.genes.size() || a.server.size() != b.server.size())
    throw DomainError("uniform_crossover: parents differ in shape");
  Chromosome child = a;
  for (std::size_t i = 0; i < child.genes.size(); ++i) {
    if (rng.bernoulli(0.5)) child.genes[i].position = b.genes[i].position;
    if (rng.bernoulli(0.5)) child.genes[i].power = b.genes[i].power;
  }
  for (std::size_t k = 0; k < child.server.size(); ++k) {
    if (rng.bernoulli(0.5)) child.server[k] = b.server[k];
  }
  return child;
}

std::size_t tournament_select(const std::vector<double>& fitness, Rng& rng) {
  if (fitness.empty()) throw DomainError("tournament_select: empty population");
  const std::size_t a = rng.index(fitness.size());
  const std::size_t b = rng.index(fitness.size());
  return fitness[b] > fitness[a] ? b : a;
}

namespace {

// Users assigned out of range fall back to the nearest UAV; nullopt if none is in range.
std::optional<DeployState> decode(const Chromosome& c, const DeployState& base) {
  DeployState st = base;
  for (std::size_t i = 0; i < c.genes.size(); ++i) apply_strategy(st, i, c.genes[i]);
  const auto& w = st.world;
  Association assoc(w.n_uavs(), w.n_users());
  for (std::size_t k = 0; k < w.n_users(); ++k) {
    std::size_t s = c.server[k];
    if (distance(w.uavs[s].position, w.users[k].position) > w.comm_radius) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < w.n_uavs(); ++i) {
        const double d = distance(w.uavs[i].position, w.users[k].position);
        if (d < best) {
          best = d;
          s = i;
        }
      }
      if (best > w.comm_radius) return std::nullopt;
    }
    assoc.served(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) = 1;
  }
  st.assoc = assoc;
  return st;
}

}  // namespace

DeployResult run_ga(const WorldState& world, const LinkTopology& topo, const GameConfig& cfg,
                    const ModelParams& model, std::uint64_t seed, const GaConfig& ga) {
  cfg.validate();
  const DeployState base = initial_deploy_state(world, topo, model);
  Rng rng(seed);

  Chromosome incumbent;
  for (std::size_t i = 0; i < world.n_uavs(); ++i) incumbent.genes.push_back(base.strategy(i));
  for (std::size_t k = 0; k < world.n_users(); ++k) {
    for (std::size_t i = 0; i < world.n_uavs(); ++i) {
      if (base.assoc.serves(i, k)) incumbent.server.push_back(i);
    }
  }
  std::vector<Chromosome> population{incumbent};
  GaConfig seed_mutation = ga;
  seed_mutation.mutation_rate = 1.0;
  while (population.size() < ga.population)
    population.push_back(mutate(incumbent, world, seed_mutation, rng));

  auto fitness = [&](const Chromosome& c) {
    const auto st = decode(c, base);
    if (!st) return -std::numeric_limits<double>::infinity();
    return potential_deploy(DeployEvaluator(*st, model).metrics(), cfg);
  };
  auto [best, ga_trace] = evolve(std::move(population), world, ga, rng, fitness);

  DeployResult out;
  out.algorithm = "ga";
  {
    const DeployEvaluator e0(base, model);
    out.trace.initial_potential = potential_deploy(e0.metrics(), cfg);
    out.potential_history.push_back(out.trace.initial_potential);
  }
  out.trace.initial_link_count = topo.link_count();
  for (std::size_t g = 0; g < ga_trace.best.size(); ++g) {
    const auto st = decode(ga_trace.best[g], base);
    const DeployEvaluator e(*st, model);
    out.trace.potential.push_back(ga_trace.best_fitness[g]);
    out.trace.utilities.push_back(deploy_utilities(e.metrics(), cfg));
    out.trace.link_count.push_back(topo.link_count());
    out.potential_history.push_back(ga_trace.best_fitness[g]);
  }
  out.trace.rounds = ga_trace.best.size();
  out.trace.converged = false;
  const auto st = decode(best, base);
  if (!st) throw InfeasibleCoverageError(0, "run_ga: best individual leaves a user uncovered");
  const DeployEvaluator e(*st, model);
  out.state = e.state();
  out.metrics = e.metrics();
  return out;
}

DeployResult run_baseline(BaselineKind kind, const WorldState& world, const LinkTopology& topo,
                          const GameConfig& cfg, const ModelParams& model, std::uint64_t seed,
                          const BaselineConfig& bcfg) {
  bcfg.validate();
  switch (kind) {
    case BaselineKind::brd_epg: return run_brd_epg(world, topo, cfg, model, seed);
    case BaselineKind::brd_ncg: return run_brd_ncg(world, topo, cfg, model, seed);
    case BaselineKind::etg: return run_etg(world, topo, cfg, model, seed, bcfg.etg);
    case BaselineKind::ga: return run_ga(world, topo, cfg, model, seed, bcfg.ga);
  }
  throw ConfigError("run_baseline: unknown kind");
}

}  // namespace uavnet
