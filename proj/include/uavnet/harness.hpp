#pragma once

#include "uavnet/ag_epg.hpp"
#include "uavnet/baselines.hpp"
#include "uavnet/l3_epg.hpp"
#include "uavnet/rag.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace uavnet {

// Weight generation settings used when a run asks for RAG weights.
struct RagSettings {
  std::string corpus_dir;  // resolved against the scenario file
  std::size_t block_size = 4;
  std::size_t top_k = 3;
  std::size_t dimension = 256;
  rag::Emphasis emphasis = rag::Emphasis::balanced;
};

// Fully resolved scenario. UAV positions are placed per seed (k-means), and so
// are user positions when only a count is given.
struct Scenario {
  std::string origin;  // file the scenario came from
  WorldState world;    // uavs sized to n_uavs; users empty when random
  std::size_t n_uavs = 10;
  std::size_t n_users = 20;
  bool random_users = true;
  std::vector<Vec3> uav_positions;  // explicit start positions; empty means k-means
  double initial_power = 2.0;      // W
  double initial_energy = 5.0e5;   // J, E_max
  ModelParams model;
  GameConfig game;
  BaselineConfig baselines;
  RagSettings rag;
};

// Throws ConfigError naming the offending field and constraint.
Scenario parse_scenario(const nlohmann::json& doc, const std::string& origin = "<memory>");
Scenario load_scenario(const std::string& path);

// Every field that influenced a run, defaults included.
nlohmann::json resolved_config(const Scenario& sc);

// World for one seed with n UAVs: users drawn (if random), UAVs at the k-means
// centroids with initial power and energy.
WorldState instantiate(const Scenario& sc, std::size_t n_uavs, std::uint64_t seed);

// Mock-generated weights from the scenario's knowledge corpus.
rag::WeightProposal rag_weights(const Scenario& sc, const WorldState& world);

enum class Algorithm { l3_ag, brd_epg, brd_ncg, etg, ga };
std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);
const std::vector<Algorithm>& all_algorithms();

enum class WeightSource { config, rag };

struct ExperimentSpec {
  std::string scenario_path;
  Algorithm algorithm = Algorithm::l3_ag;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::size_t> sweep;  // N values; empty means the scenario's count
  std::string output_dir;          // empty: nothing written
  WeightSource weights = WeightSource::config;
  bool snapshots = false;
  std::size_t jobs = 0;  // worker threads; 0 picks hardware concurrency

  void validate() const;
};

struct RunRecord {
  std::string algorithm;
  std::size_t n_uavs = 0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  double throughput = 0.0;  // bits/s
  double energy = 0.0;      // J
  double latency = 0.0;     // s
  std::size_t links = 0;
  std::size_t rounds_p1 = 0;
  std::size_t rounds_p2 = 0;
  double correlation = 0.0;  // pooled over P1 and P2 audits
  double r2 = 0.0;
  bool feasible = false;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one row
};

struct RunGroup {
  std::string algorithm;
  std::size_t n_uavs = 0;
  std::size_t seeds = 0;
  Aggregate objective, throughput, energy, latency, links;
};

struct RunReport {
  std::vector<RunRecord> rows;    // ordered by (algorithm, n, seed list order)
  std::vector<RunGroup> groups;   // one per (algorithm, n)
};

std::vector<RunGroup> aggregate(const std::vector<RunRecord>& rows);

// Everything one (algorithm, n, seed) job produced.
struct RunArtifacts {
  RunRecord record;
  WorldState initial_world;
  P1Result p1;
  DeployResult p2;
  GameConfig game;  // after weight resolution
  std::optional<rag::WeightProposal> proposal;
};

// One job: instantiate → solve_p1 → P2 solver. Errors are rethrown with the
// seed named.
RunArtifacts run_single(const Scenario& sc, Algorithm algo, std::size_t n_uavs,
                        std::uint64_t seed, WeightSource weights, bool snapshots);

// Runs every seed × sweep point for spec.algorithm and writes the per-run
// exports, report.json, report.csv and resolved_config.json.
RunReport run_pipeline(const ExperimentSpec& spec);

// Same grid for every algorithm in `algos` with paired seeds (at least five);
// additionally writes comparison.csv with one row per algorithm × N.
RunReport compare_algorithms(const ExperimentSpec& spec, const std::vector<Algorithm>& algos);

// ---- exports ----

inline constexpr const char* kConvergenceHeader =
    "round,player,delta_utility,delta_potential,potential,link_count";

std::string format_double(double v);  // %.17g
std::string convergence_csv(const ConvergenceTrace& trace);
nlohmann::json snapshots_json(const ConvergenceTrace& trace);
nlohmann::json deployment_json(const DeployResult& result);
nlohmann::json summary_json(const RunRecord& record, const ConvergenceTrace& p1,
                            const ConvergenceTrace& p2);
nlohmann::json report_json(const RunReport& report);
std::string report_csv(const RunReport& report);
std::string comparison_csv(const RunReport& report);

// Writes via a temporary file and rename; throws Error when unwritable.
void write_file_atomic(const std::string& path, const std::string& content);

// convergence_p1.csv, convergence_p2.csv, snapshots.json (when recorded),
// deployment.json and summary.json under `dir`.
void export_traces(const RunArtifacts& run, const std::string& dir);

}  // namespace uavnet
