#include "uavnet/errors.hpp"
#include "uavnet/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace uavnet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string data_path(const std::string& rel) { return std::string(UAVNET_DATA_DIR) + "/" + rel; }

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string config_error(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uavnet_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("scenario validation names the field") {
  CHECK(config_error({{"uavs", {{"altitude_band", {300, 100}}}}}).find("uavs.altitude_band") !=
        std::string::npos);
  CHECK(config_error({{"uavs", {{"power_bounds", {2, 1}}}}}).find("uavs.power_bounds") !=
        std::string::npos);
  CHECK(config_error({{"area", {-1, 10}}}).find("area") != std::string::npos);
  CHECK(config_error({{"uavz", 3}}).find("uavz") != std::string::npos);
  CHECK(config_error({{"users", {{"count", 3}, {"positions", {{1, 2}}}}}}).find("users") !=
        std::string::npos);
  CHECK(config_error({{"uavs", {{"count", 3}, {"positions", {{1, 2, 150}}}}}})
            .find("uavs.count") != std::string::npos);
  CHECK_THROWS_AS(load_scenario(data_path("scenarios/missing.json")), ConfigError);
}

TEST_CASE("resolved config echoes defaults") {
  const Scenario sc = parse_scenario(json::object());
  const json r = resolved_config(sc);
  CHECK(r["uavs"]["energy"]["circuit_power_w"].get<double>() == 0.1);
  CHECK(r["uavs"]["count"].get<std::size_t>() == 10);
  CHECK(r["uavs"]["altitude_band"][0].get<double>() == 100.0);
  // The echo parses back to the same resolved configuration.
  CHECK(resolved_config(parse_scenario(r)) == r);
}

TEST_CASE("bundled scenarios load") {
  const Scenario def = load_scenario(data_path("scenarios/default.json"));
  CHECK(def.n_uavs == 10);
  CHECK(def.n_users == 20);
  const Scenario sh = load_scenario(data_path("scenarios/shadowed.json"));
  CHECK(sh.n_uavs == 4);
  CHECK_FALSE(sh.world.obstacles.empty());
  const WorldState w = instantiate(sh, sh.n_uavs, 1);
  CHECK(w.uavs.size() == 4);
  CHECK(w.users.size() == sh.n_users);
}

TEST_CASE("instantiation is seeded") {
  const Scenario sc = load_scenario(data_path("scenarios/default.json"));
  const WorldState a = instantiate(sc, 6, 3), b = instantiate(sc, 6, 3), c = instantiate(sc, 6, 4);
  REQUIRE(a.uavs.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.uavs[i].position == b.uavs[i].position);
    CHECK(a.uavs[i].tx_power == sc.initial_power);
    CHECK(a.uavs[i].residual_energy == sc.initial_energy);
  }
  CHECK(a.users[0].position != c.users[0].position);
}

TEST_CASE("two-UAV smoke run keeps its single link") {
  const Scenario sc = load_scenario(data_path("scenarios/smoke.json"));
  const RunArtifacts run = run_single(sc, Algorithm::l3_ag, 2, 1, WeightSource::config, true);
  CHECK(run.record.links == 1);
  CHECK(run.record.feasible);
  CHECK(run.p1.trace.snapshots.size() == run.p1.trace.rounds);
}

TEST_CASE("exports") {
  ConvergenceTrace empty;
  CHECK(convergence_csv(empty) == std::string(kConvergenceHeader) + "\n");
  CHECK(format_double(0.1) == "0.10000000000000001");

  const Scenario sc = load_scenario(data_path("scenarios/smoke.json"));
  const RunArtifacts run = run_single(sc, Algorithm::l3_ag, 2, 7, WeightSource::config, true);
  const json s = summary_json(run.record, run.p1.trace, run.p2.trace);
  const json back = json::parse(s.dump(2));
  CHECK(back == s);
  CHECK(back["throughput"].get<double>() == run.record.throughput);
  CHECK(back["energy"].get<double>() == run.record.energy);
  CHECK(back["seed"].get<std::uint64_t>() == 7);
  CHECK(snapshots_json(run.p1.trace)["snapshots"].size() == run.p1.trace.rounds);

  const fs::path dir = scratch("exports");
  export_traces(run, dir.string());
  for (const char* f : {"convergence_p1.csv", "convergence_p2.csv", "snapshots.json",
                        "deployment.json", "summary.json"})
    CHECK(fs::exists(dir / f));
  const std::string p2 = slurp(dir / "convergence_p2.csv");
  CHECK(p2.rfind(kConvergenceHeader, 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("aggregation") {
  std::vector<RunRecord> rows(3);
  for (std::size_t k = 0; k < 3; ++k) {
    rows[k].algorithm = "x";
    rows[k].n_uavs = 4;
    rows[k].seed = k;
    rows[k].energy = double(k + 1);
  }
  const auto g = aggregate(rows);
  REQUIRE(g.size() == 1);
  CHECK(g[0].seeds == 3);
  CHECK(g[0].energy.mean == doctest::Approx(2.0));
  CHECK(g[0].energy.stddev == doctest::Approx(1.0));
}

TEST_CASE("experiment validation") {
  ExperimentSpec spec;
  spec.scenario_path = data_path("scenarios/smoke.json");
  spec.seeds = {};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.seeds = {1, 2};
  CHECK_THROWS_AS(compare_algorithms(spec, all_algorithms()), ConfigError);
  CHECK(parse_algorithm("brd_ncg") == Algorithm::brd_ncg);
  CHECK_THROWS_AS(parse_algorithm("sgd"), ConfigError);
  for (Algorithm a : all_algorithms()) CHECK(parse_algorithm(to_string(a)) == a);
}

TEST_CASE("pipeline reruns are byte-identical") {
  ExperimentSpec spec;
  spec.scenario_path = data_path("scenarios/smoke.json");
  spec.seeds = {1, 2, 3, 4, 5};
  spec.snapshots = true;
  spec.jobs = 3;
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  spec.output_dir = a.string();
  compare_algorithms(spec, all_algorithms());
  spec.output_dir = b.string();
  spec.jobs = 1;
  compare_algorithms(spec, all_algorithms());

  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a);
    ++files;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / rel), rel.string());
  }
  CHECK(files > 5 * all_algorithms().size());
  CHECK(fs::exists(a / "comparison.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("rag weights feed the game") {
  const Scenario sc = load_scenario(data_path("scenarios/default.json"));
  const RunArtifacts run = run_single(sc, Algorithm::l3_ag, 4, 1, WeightSource::rag, false);
  REQUIRE(run.proposal.has_value());
  CHECK(run.game.eta == run.proposal->eta);
  CHECK_FALSE(run.proposal->source_chunk_ids.empty());
}
