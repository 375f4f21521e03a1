#pragma once

#include "uavnet/ag_epg.hpp"

#include <string>
#include <vector>

namespace uavnet {

enum class BaselineKind { brd_epg, brd_ncg, etg, ga };

struct EtgConfig {
  std::size_t grid = 5;          // G×G horizontal lattice around the start position
  double span = 200.0;           // m, half-width of the horizontal lattice
  std::size_t altitude_levels = 3;
  std::size_t power_levels = 4;
  double step = 0.5;             // replicator step on [0, 1]-normalized fitness
};

struct GaConfig {
  std::size_t population = 30;
  std::size_t generations = 200;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;   // per gene
  double sigma_position = 50.0; // m
  double sigma_power = 0.15;    // W
};

struct BaselineConfig {
  EtgConfig etg;
  GaConfig ga;

  void validate() const;
};

std::string to_string(BaselineKind kind);

// AG-EPG without exploration or backtracking: a fixed-step gradient ascent that
// stops at the first step that does not improve.
DeployResult run_brd_epg(const WorldState& world, const LinkTopology& topo,
                         const GameConfig& cfg, const ModelParams& model, std::uint64_t seed);

// Simultaneous selfish best responses on ρ_i2; no audit.
DeployResult run_brd_ncg(const WorldState& world, const LinkTopology& topo,
                         const GameConfig& cfg, const ModelParams& model, std::uint64_t seed);

// x_s ← x_s + step·x_s·(f_s − f̄), then renormalized onto the simplex.
Vector replicator_update(const Vector& shares, const Vector& fitness, double step);

DeployResult run_etg(const WorldState& world, const LinkTopology& topo, const GameConfig& cfg,
                     const ModelParams& model, std::uint64_t seed, const EtgConfig& etg = {});

struct Chromosome {
  std::vector<DeployStrategy> genes;
  std::vector<std::size_t> server;  // user -> UAV
};

// Per-gene Gaussian perturbation clipped to the flight box and power bounds.
Chromosome mutate(const Chromosome& c, const WorldState& world, const GaConfig& ga, Rng& rng);
Chromosome uniform_crossover(const Chromosome& a, const Chromosome& b, Rng& rng);
// Binary tournament; ties go to the first draw.
std::size_t tournament_select(const std::vector<double>& fitness, Rng& rng);

struct GaTrace {
  std::vector<double> best_fitness;  // per generation
  std::vector<Chromosome> best;      // per generation
};

// Generic GA loop shared by run_ga and tests: fitness must be deterministic.
template <typename Fitness>
std::pair<Chromosome, GaTrace> evolve(std::vector<Chromosome> population,
                                      const WorldState& world, const GaConfig& ga, Rng& rng,
                                      Fitness&& fitness);

DeployResult run_ga(const WorldState& world, const LinkTopology& topo, const GameConfig& cfg,
                    const ModelParams& model, std::uint64_t seed, const GaConfig& ga = {});

DeployResult run_baseline(BaselineKind kind, const WorldState& world, const LinkTopology& topo,
                          const GameConfig& cfg, const ModelParams& model, std::uint64_t seed,
                          const BaselineConfig& bcfg = {});

// ---- template implementation ----

template <typename Fitness>
std::pair<Chromosome, GaTrace> evolve(std::vector<Chromosome> population,
                                      const WorldState& world, const GaConfig& ga, Rng& rng,
                                      Fitness&& fitness) {
  std::vector<double> fit(population.size());
  for (std::size_t k = 0; k < population.size(); ++k) fit[k] = fitness(population[k]);
  GaTrace trace;
  auto best_index = [&] {
    std::size_t b = 0;
    for (std::size_t k = 1; k < fit.size(); ++k) {
      if (fit[k] > fit[b]) b = k;
    }
    return b;
  };
  for (std::size_t gen = 0; gen < ga.generations; ++gen) {
    const std::size_t elite = best_index();
    std::vector<Chromosome> next{population[elite]};
    std::vector<double> next_fit{fit[elite]};
    while (next.size() < population.size()) {
      const Chromosome& a = population[tournament_select(fit, rng)];
      const Chromosome& b = population[tournament_select(fit, rng)];
      Chromosome child = rng.bernoulli(ga.crossover_rate) ? uniform_crossover(a, b, rng) : a;
      if (ga.mutation_rate > 0.0) child = mutate(child, world, ga, rng);
      next_fit.push_back(fitness(child));
      next.push_back(std::move(child));
    }
    population = std::move(next);
    fit = std::move(next_fit);
    const std::size_t b = best_index();
    trace.best_fitness.push_back(fit[b]);
    trace.best.push_back(population[b]);
  }
  return {population[best_index()], trace};
}

}  // namespace uavnet
