#include "uavnet/harness.hpp"

#include "uavnet/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace uavnet {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---- schema helpers ----

[[noreturn]] void fail(const std::string& field, const std::string& constraint) {
  throw ConfigError("scenario field '" + field + "': " + constraint);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) fail(join(path, k), "unknown field");
  }
}

const json* child(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& obj, const std::string& path, const char* key, double fallback) {
  const json* v = child(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) fail(join(path, key), "must be a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) fail(join(path, key), "must be finite");
  return x;
}

double positive(const json& obj, const std::string& path, const char* key, double fallback) {
  const double x = number(obj, path, key, fallback);
  if (!(x > 0.0)) fail(join(path, key), "must be > 0");
  return x;
}

double non_negative(const json& obj, const std::string& path, const char* key, double fallback) {
  const double x = number(obj, path, key, fallback);
  if (x < 0.0) fail(join(path, key), "must be >= 0");
  return x;
}

std::size_t count(const json& obj, const std::string& path, const char* key, std::size_t fallback,
                  std::size_t min_value) {
  const json* v = child(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || v->get<long long>() < 0)
    fail(join(path, key), "must be a non-negative integer");
  const auto x = v->get<std::size_t>();
  if (x < min_value) fail(join(path, key), "must be >= " + std::to_string(min_value));
  return x;
}

bool flag(const json& obj, const std::string& path, const char* key, bool fallback) {
  const json* v = child(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(join(path, key), "must be a boolean");
  return v->get<bool>();
}

std::string text(const json& obj, const std::string& path, const char* key, std::string fallback) {
  const json* v = child(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(join(path, key), "must be a string");
  return v->get<std::string>();
}

template <std::size_t K>
std::array<double, K> numbers(const json& obj, const std::string& path, const char* key,
                              std::array<double, K> fallback) {
  const json* v = child(obj, key);
  if (!v) return fallback;
  if (!v->is_array() || v->size() != K)
    fail(join(path, key), "must be an array of " + std::to_string(K) + " numbers");
  std::array<double, K> out{};
  for (std::size_t i = 0; i < K; ++i) {
    if (!(*v)[i].is_number()) fail(join(path, key), "must hold numbers");
    out[i] = (*v)[i].get<double>();
    if (!std::isfinite(out[i])) fail(join(path, key), "must be finite");
  }
  return out;
}

Vec2 pair(const json& obj, const std::string& path, const char* key, const Vec2& fallback) {
  const auto a = numbers<2>(obj, path, key, {fallback.x(), fallback.y()});
  return {a[0], a[1]};
}

const json& section(const json& obj, const char* key) {
  static const json empty = json::object();
  const json* v = child(obj, key);
  return v ? *v : empty;
}

std::array<double, 3> weights(const json& obj, const std::string& path, const char* key) {
  const auto w = numbers<3>(obj, path, key, {1.0, 1.0, 1.0});
  for (double x : w) {
    if (x < 0.0) fail(join(path, key), "weights must be >= 0");
  }
  return w;
}

std::string to_string(UtilityConvention c) {
  return c == UtilityConvention::literal ? "literal" : "aligned";
}

std::string to_string(DropGate g) {
  switch (g) {
    case DropGate::los_only: return "los_only";
    case DropGate::any: return "any";
    case DropGate::nlos_only: return "nlos_only";
  }
  return "los_only";
}

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json matrix(const BinaryMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(static_cast<int>(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Finite doubles round-trip; non-finite values become null.
json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

// ---- scenario ----

Scenario parse_scenario(const json& doc, const std::string& origin) {
  check_keys(doc, "", {"uavs", "users", "area", "obstacles", "radio", "latency", "weights",
                       "scales", "game", "baselines", "rag"});
  Scenario sc;
  sc.origin = origin;
  WorldState& w = sc.world;

  w.area = pair(doc, "", "area", {10000.0, 10000.0});
  if (!(w.area.x() > 0.0 && w.area.y() > 0.0)) fail("area", "both extents must be > 0");

  const json& u = section(doc, "uavs");
  check_keys(u, "uavs", {"count", "positions", "altitude_band", "power_bounds", "comm_radius",
                         "initial_power", "slot_length", "energy"});
  w.altitude_band = pair(u, "uavs", "altitude_band", {100.0, 300.0});
  if (!(w.altitude_band.x() <= w.altitude_band.y()))
    fail("uavs.altitude_band", "z_min must not exceed z_max");
  if (w.altitude_band.x() < 0.0) fail("uavs.altitude_band", "z_min must be >= 0");
  w.power_bounds = pair(u, "uavs", "power_bounds", {0.5, 2.0});
  if (!(w.power_bounds.x() > 0.0 && w.power_bounds.x() <= w.power_bounds.y()))
    fail("uavs.power_bounds", "need 0 < p_min <= p_max");
  w.comm_radius = positive(u, "uavs", "comm_radius", 4000.0);
  w.slot_length = positive(u, "uavs", "slot_length", 10.0);
  sc.initial_power = number(u, "uavs", "initial_power", w.power_bounds.y());
  if (sc.initial_power < w.p_min() || sc.initial_power > w.p_max())
    fail("uavs.initial_power", "must lie within power_bounds");
  if (const json* pos = child(u, "positions")) {
    if (!pos->is_array() || pos->empty()) fail("uavs.positions", "must be a non-empty array");
    for (std::size_t i = 0; i < pos->size(); ++i) {
      const json& p = (*pos)[i];
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
          !p[2].is_number())
        fail("uavs.positions[" + std::to_string(i) + "]", "must be [x, y, z]");
      sc.uav_positions.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
    sc.n_uavs = count(u, "uavs", "count", sc.uav_positions.size(), 1);
    if (sc.n_uavs != sc.uav_positions.size())
      fail("uavs.count", "must equal the number of positions");
  } else {
    sc.n_uavs = count(u, "uavs", "count", 10, 1);
  }

  const json& e = section(u, "energy");
  check_keys(e, "uavs.energy", {"initial_j", "circuit_power_w", "profile_drag", "air_density",
                                "rotor_area", "tip_speed", "induced_correction", "weight_n",
                                "fuselage_drag", "gravity"});
  EnergyParams& ep = sc.model.energy;
  sc.initial_energy = non_negative(e, "uavs.energy", "initial_j", 5.0e5);
  ep.circuit_power_w = non_negative(e, "uavs.energy", "circuit_power_w", ep.circuit_power_w);
  ep.profile_drag = non_negative(e, "uavs.energy", "profile_drag", ep.profile_drag);
  ep.air_density = positive(e, "uavs.energy", "air_density", ep.air_density);
  ep.rotor_area = positive(e, "uavs.energy", "rotor_area", ep.rotor_area);
  ep.tip_speed = non_negative(e, "uavs.energy", "tip_speed", ep.tip_speed);
  ep.induced_correction = non_negative(e, "uavs.energy", "induced_correction", ep.induced_correction);
  ep.weight_n = non_negative(e, "uavs.energy", "weight_n", ep.weight_n);
  ep.fuselage_drag = non_negative(e, "uavs.energy", "fuselage_drag", ep.fuselage_drag);
  ep.gravity = positive(e, "uavs.energy", "gravity", ep.gravity);

  const json& us = section(doc, "users");
  check_keys(us, "users", {"count", "positions", "script"});
  if (const json* pos = child(us, "positions")) {
    if (child(us, "count")) fail("users", "give either count or positions, not both");
    if (!pos->is_array() || pos->empty()) fail("users.positions", "must be a non-empty array");
    sc.random_users = false;
    for (std::size_t m = 0; m < pos->size(); ++m) {
      const json& p = (*pos)[m];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        fail("users.positions[" + std::to_string(m) + "]", "must be [x, y]");
      w.users.push_back({m, Vec3(p[0].get<double>(), p[1].get<double>(), 0.0)});
    }
    sc.n_users = w.users.size();
  } else {
    sc.n_users = count(us, "users", "count", 20, 1);
  }
  if (const json* script = child(us, "script")) {
    if (!script->is_array()) fail("users.script", "must be an array");
    for (std::size_t k = 0; k < script->size(); ++k) {
      const std::string path = "users.script[" + std::to_string(k) + "]";
      const json& s = (*script)[k];
      check_keys(s, path, {"slot", "user", "position"});
      const std::size_t user = count(s, path, "user", 0, 0);
      if (user >= sc.n_users) fail(path + ".user", "must index an existing user");
      const Vec2 p = pair(s, path, "position", {0.0, 0.0});
      w.user_script.push_back({count(s, path, "slot", 0, 0), user, Vec3(p.x(), p.y(), 0.0)});
    }
  }

  if (const json* obs = child(doc, "obstacles")) {
    if (!obs->is_array()) fail("obstacles", "must be an array");
    for (std::size_t k = 0; k < obs->size(); ++k) {
      const std::string path = "obstacles[" + std::to_string(k) + "]";
      const json& o = (*obs)[k];
      check_keys(o, path, {"center", "size", "height"});
      if (!child(o, "center") || !child(o, "size") || !child(o, "height"))
        fail(path, "needs center, size and height");
      const Vec2 c = pair(o, path, "center", {0.0, 0.0});
      const Vec2 s = pair(o, path, "size", {1.0, 1.0});
      if (!(s.x() > 0.0 && s.y() > 0.0)) fail(path + ".size", "extents must be > 0");
      w.obstacles.push_back({c.x(), c.y(), s.x(), s.y(), positive(o, path, "height", 1.0)});
    }
  }

  const json& r = section(doc, "radio");
  check_keys(r, "radio", {"carrier_hz", "bandwidth_hz", "noise_density_dbm_hz", "temperature_k",
                          "tx_gain_dbi", "rx_gain_dbi", "xi_los_db", "xi_nlos_db", "env_a",
                          "env_b", "path_loss_exponent", "fading", "obstacles_block_a2g"});
  RadioParams& rp = sc.model.radio;
  rp.carrier_hz = positive(r, "radio", "carrier_hz", rp.carrier_hz);
  rp.bandwidth_hz = positive(r, "radio", "bandwidth_hz", rp.bandwidth_hz);
  if (child(r, "temperature_k")) {
    if (child(r, "noise_density_dbm_hz"))
      fail("radio.temperature_k", "cannot be combined with noise_density_dbm_hz");
    rp.noise_density_dbm_hz.reset();
    rp.temperature_k = positive(r, "radio", "temperature_k", 290.0);
  } else {
    rp.noise_density_dbm_hz = number(r, "radio", "noise_density_dbm_hz", -174.0);
  }
  rp.tx_gain_dbi = number(r, "radio", "tx_gain_dbi", rp.tx_gain_dbi);
  rp.rx_gain_dbi = number(r, "radio", "rx_gain_dbi", rp.rx_gain_dbi);
  rp.xi_los_db = number(r, "radio", "xi_los_db", rp.xi_los_db);
  rp.xi_nlos_db = number(r, "radio", "xi_nlos_db", rp.xi_nlos_db);
  if (rp.xi_nlos_db < rp.xi_los_db) fail("radio.xi_nlos_db", "must be >= xi_los_db");
  rp.env_a = positive(r, "radio", "env_a", rp.env_a);
  rp.env_b = positive(r, "radio", "env_b", rp.env_b);
  rp.path_loss_exponent = positive(r, "radio", "path_loss_exponent", 2.5);
  const std::string fading = text(r, "radio", "fading", "expected");
  if (fading == "expected") rp.fading = FadingMode::expected;
  else if (fading == "stochastic") rp.fading = FadingMode::stochastic;
  else fail("radio.fading", "must be 'expected' or 'stochastic'");
  rp.obstacles_block_a2g = flag(r, "radio", "obstacles_block_a2g", rp.obstacles_block_a2g);

  const json& l = section(doc, "latency");
  check_keys(l, "latency", {"packet_bits"});
  sc.model.latency.packet_bits = positive(l, "latency", "packet_bits", sc.model.latency.packet_bits);

  GameConfig& g = sc.game;
  const json& wt = section(doc, "weights");
  check_keys(wt, "weights", {"eta", "psi", "objective"});
  g.eta = weights(wt, "weights", "eta");
  g.psi = weights(wt, "weights", "psi");
  g.objective_weights = weights(wt, "weights", "objective");

  const json& s = section(doc, "scales");
  check_keys(s, "scales", {"throughput", "energy", "latency", "interference"});
  g.scales.throughput = positive(s, "scales", "throughput", g.scales.throughput);
  g.scales.energy = positive(s, "scales", "energy", g.scales.energy);
  g.scales.latency = positive(s, "scales", "latency", g.scales.latency);
  g.scales.interference = positive(s, "scales", "interference", g.scales.interference);

  const json& gm = section(doc, "game");
  check_keys(gm, "game", {"temperature", "convention", "drop_gate", "allow_readd", "steps",
                          "exploration", "rounds"});
  g.temperature = positive(gm, "game", "temperature", g.temperature);
  const std::string conv = text(gm, "game", "convention", to_string(g.convention));
  if (conv == "literal") g.convention = UtilityConvention::literal;
  else if (conv == "aligned") g.convention = UtilityConvention::aligned;
  else fail("game.convention", "must be 'literal' or 'aligned'");
  const std::string gate = text(gm, "game", "drop_gate", to_string(g.drop_gate));
  if (gate == "los_only") g.drop_gate = DropGate::los_only;
  else if (gate == "any") g.drop_gate = DropGate::any;
  else if (gate == "nlos_only") g.drop_gate = DropGate::nlos_only;
  else fail("game.drop_gate", "must be 'los_only', 'any' or 'nlos_only'");
  g.allow_readd = flag(gm, "game", "allow_readd", g.allow_readd);
  const json& st = section(gm, "steps");
  check_keys(st, "game.steps", {"position", "power", "fd_epsilon", "inner_iterations"});
  g.grad_step_pos = positive(st, "game.steps", "position", g.grad_step_pos);
  g.grad_step_power = positive(st, "game.steps", "power", g.grad_step_power);
  g.fd_epsilon = positive(st, "game.steps", "fd_epsilon", g.fd_epsilon);
  g.inner_iterations = count(st, "game.steps", "inner_iterations", g.inner_iterations, 1);
  const json& ex = section(gm, "exploration");
  check_keys(ex, "game.exploration", {"eps0", "decay", "radius"});
  g.explore_eps0 = non_negative(ex, "game.exploration", "eps0", g.explore_eps0);
  if (g.explore_eps0 > 1.0) fail("game.exploration.eps0", "must be <= 1");
  g.explore_decay = positive(ex, "game.exploration", "decay", g.explore_decay);
  if (g.explore_decay > 1.0) fail("game.exploration.decay", "must be <= 1");
  g.explore_radius = non_negative(ex, "game.exploration", "radius", g.explore_radius);
  const json& rd = section(gm, "rounds");
  check_keys(rd, "game.rounds", {"max", "stall_window", "stall_tolerance"});
  g.max_rounds = count(rd, "game.rounds", "max", g.max_rounds, 1);
  g.stall_window = count(rd, "game.rounds", "stall_window", g.stall_window, 1);
  g.stall_tolerance = non_negative(rd, "game.rounds", "stall_tolerance", g.stall_tolerance);

  const json& b = section(doc, "baselines");
  check_keys(b, "baselines", {"etg", "ga"});
  const json& etg = section(b, "etg");
  check_keys(etg, "baselines.etg", {"grid", "span", "altitude_levels", "power_levels", "step"});
  EtgConfig& ec = sc.baselines.etg;
  ec.grid = count(etg, "baselines.etg", "grid", ec.grid, 1);
  ec.span = non_negative(etg, "baselines.etg", "span", ec.span);
  ec.altitude_levels = count(etg, "baselines.etg", "altitude_levels", ec.altitude_levels, 1);
  ec.power_levels = count(etg, "baselines.etg", "power_levels", ec.power_levels, 1);
  ec.step = positive(etg, "baselines.etg", "step", ec.step);
  const json& ga = section(b, "ga");
  check_keys(ga, "baselines.ga", {"population", "generations", "crossover_rate", "mutation_rate",
                                  "sigma_position", "sigma_power"});
  GaConfig& gc = sc.baselines.ga;
  gc.population = count(ga, "baselines.ga", "population", gc.population, 2);
  gc.generations = count(ga, "baselines.ga", "generations", gc.generations, 1);
  gc.crossover_rate = non_negative(ga, "baselines.ga", "crossover_rate", gc.crossover_rate);
  gc.mutation_rate = non_negative(ga, "baselines.ga", "mutation_rate", gc.mutation_rate);
  gc.sigma_position = non_negative(ga, "baselines.ga", "sigma_position", gc.sigma_position);
  gc.sigma_power = non_negative(ga, "baselines.ga", "sigma_power", gc.sigma_power);

  const json& rg = section(doc, "rag");
  check_keys(rg, "rag", {"corpus", "block_size", "top_k", "dimension", "emphasis"});
  sc.rag.corpus_dir = text(rg, "rag", "corpus", "../knowledge");
  if (origin != "<memory>" && fs::path(sc.rag.corpus_dir).is_relative())
    sc.rag.corpus_dir = (fs::path(origin).parent_path() / sc.rag.corpus_dir).lexically_normal().string();
  sc.rag.block_size = count(rg, "rag", "block_size", sc.rag.block_size, 1);
  sc.rag.top_k = count(rg, "rag", "top_k", sc.rag.top_k, 1);
  sc.rag.dimension = count(rg, "rag", "dimension", sc.rag.dimension, 1);
  try {
    sc.rag.emphasis = rag::parse_emphasis(text(rg, "rag", "emphasis", "balanced"));
  } catch (const ConfigError&) {
    fail("rag.emphasis", "must be throughput, energy, latency or balanced");
  }

  // Placeholder UAVs so that world-level invariants can be checked now.
  w.uavs.clear();
  for (std::size_t i = 0; i < sc.n_uavs; ++i) {
    UavState uav;
    uav.id = i;
    uav.position = sc.uav_positions.empty()
                       ? Vec3(0.0, 0.0, 0.5 * (w.z_min() + w.z_max()))
                       : sc.uav_positions[i];
    uav.tx_power = sc.initial_power;
    uav.residual_energy = sc.initial_energy;
    w.uavs.push_back(uav);
  }
  try {
    WorldState probe = w;
    if (sc.random_users) probe.users.push_back({0, Vec3(0.0, 0.0, 0.0)});
    validate_world(probe);
    sc.model.validate();
    g.validate();
    sc.baselines.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(std::string("scenario: ") + err.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("scenario file not found: " + path);
  json doc;
  try {
    is >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("scenario " + path + " is not valid JSON: " + e.what());
  }
  return parse_scenario(doc, path);
}

json resolved_config(const Scenario& sc) {
  const WorldState& w = sc.world;
  const auto& ep = sc.model.energy;
  const auto& rp = sc.model.radio;
  const auto& g = sc.game;
  json uavs{{"count", sc.n_uavs},
            {"altitude_band", {w.z_min(), w.z_max()}},
            {"power_bounds", {w.p_min(), w.p_max()}},
            {"comm_radius", w.comm_radius},
            {"initial_power", sc.initial_power},
            {"slot_length", w.slot_length},
            {"energy",
             {{"initial_j", sc.initial_energy},
              {"circuit_power_w", ep.circuit_power_w},
              {"profile_drag", ep.profile_drag},
              {"air_density", ep.air_density},
              {"rotor_area", ep.rotor_area},
              {"tip_speed", ep.tip_speed},
              {"induced_correction", ep.induced_correction},
              {"weight_n", ep.weight_n},
              {"fuselage_drag", ep.fuselage_drag},
              {"gravity", ep.gravity}}}};
  if (!sc.uav_positions.empty()) {
    json pos = json::array();
    for (const auto& p : sc.uav_positions) pos.push_back(vec(p));
    uavs["positions"] = pos;
  }
  json users = json::object();
  if (sc.random_users) {
    users["count"] = sc.n_users;
  } else {
    json pos = json::array();
    for (const auto& u : w.users) pos.push_back({u.position.x(), u.position.y()});
    users["positions"] = pos;
  }
  json script = json::array();
  for (const auto& s : w.user_script)
    script.push_back({{"slot", s.slot}, {"user", s.user}, {"position", {s.position.x(), s.position.y()}}});
  users["script"] = script;
  json obstacles = json::array();
  for (const auto& o : w.obstacles)
    obstacles.push_back({{"center", {o.center_x, o.center_y}}, {"size", {o.width, o.depth}}, {"height", o.height}});
  json radio{{"carrier_hz", rp.carrier_hz},
             {"bandwidth_hz", rp.bandwidth_hz},
             {"tx_gain_dbi", rp.tx_gain_dbi},
             {"rx_gain_dbi", rp.rx_gain_dbi},
             {"xi_los_db", rp.xi_los_db},
             {"xi_nlos_db", rp.xi_nlos_db},
             {"env_a", rp.env_a},
             {"env_b", rp.env_b},
             {"path_loss_exponent", rp.path_loss_exponent},
             {"fading", rp.fading == FadingMode::expected ? "expected" : "stochastic"},
             {"obstacles_block_a2g", rp.obstacles_block_a2g}};
  if (rp.noise_density_dbm_hz) radio["noise_density_dbm_hz"] = *rp.noise_density_dbm_hz;
  if (rp.temperature_k) radio["temperature_k"] = *rp.temperature_k;
  const auto& ec = sc.baselines.etg;
  const auto& gc = sc.baselines.ga;
  return json{
      {"uavs", uavs},
      {"users", users},
      {"area", {w.area.x(), w.area.y()}},
      {"obstacles", obstacles},
      {"radio", radio},
      {"latency", {{"packet_bits", sc.model.latency.packet_bits}}},
      {"weights", {{"eta", g.eta}, {"psi", g.psi}, {"objective", g.objective_weights}}},
      {"scales",
       {{"throughput", g.scales.throughput},
        {"energy", g.scales.energy},
        {"latency", g.scales.latency},
        {"interference", g.scales.interference}}},
      {"game",
       {{"temperature", g.temperature},
        {"convention", to_string(g.convention)},
        {"drop_gate", to_string(g.drop_gate)},
        {"allow_readd", g.allow_readd},
        {"steps",
         {{"position", g.grad_step_pos},
          {"power", g.grad_step_power},
          {"fd_epsilon", g.fd_epsilon},
          {"inner_iterations", g.inner_iterations}}},
        {"exploration",
         {{"eps0", g.explore_eps0}, {"decay", g.explore_decay}, {"radius", g.explore_radius}}},
        {"rounds",
         {{"max", g.max_rounds},
          {"stall_window", g.stall_window},
          {"stall_tolerance", g.stall_tolerance}}}}},
      {"baselines",
       {{"etg",
         {{"grid", ec.grid},
          {"span", ec.span},
          {"altitude_levels", ec.altitude_levels},
          {"power_levels", ec.power_levels},
          {"step", ec.step}}},
        {"ga",
         {{"population", gc.population},
          {"generations", gc.generations},
          {"crossover_rate", gc.crossover_rate},
          {"mutation_rate", gc.mutation_rate},
          {"sigma_position", gc.sigma_position},
          {"sigma_power", gc.sigma_power}}}}},
      {"rag",
       {{"corpus", sc.rag.corpus_dir},
        {"block_size", sc.rag.block_size},
        {"top_k", sc.rag.top_k},
        {"dimension", sc.rag.dimension},
        {"emphasis", rag::to_string(sc.rag.emphasis)}}}};
}

namespace {

// In-range UAV graph connected and every user within R_c of some UAV.
bool placement_usable(const WorldState& w) {
  const std::size_t n = w.n_uavs();
  LinkTopology topo(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (distance(w.uavs[i].position, w.uavs[j].position) <= w.comm_radius)
        topo = topo.with_link(i, j, true);
  if (!is_connected(topo)) return false;
  for (const auto& u : w.users) {
    const bool covered = std::any_of(w.uavs.begin(), w.uavs.end(), [&](const UavState& a) {
      return distance(a.position, u.position) <= w.comm_radius;
    });
    if (!covered) return false;
  }
  return true;
}

constexpr std::size_t kPlacementAttempts = 1000;

}  // namespace

WorldState instantiate(const Scenario& sc, std::size_t n_uavs, std::uint64_t seed) {
  if (!sc.uav_positions.empty() && n_uavs != sc.uav_positions.size())
    throw ConfigError("scenario fixes " + std::to_string(sc.uav_positions.size()) +
                      " UAV positions; cannot run with N=" + std::to_string(n_uavs));
  // Random draws are repeated on fresh streams until the placement admits a
  // connected full-connect topology and covers every user.
  const std::size_t attempts =
      sc.uav_positions.empty() || sc.random_users ? kPlacementAttempts : 1;
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    WorldState w = sc.world;
    if (sc.random_users) {
      Rng rng(mix(seed, 11 + 100 * attempt));
      w.users.clear();
      for (std::size_t m = 0; m < sc.n_users; ++m) {
        const double x = rng.uniform(0.0, w.area.x());
        const double y = rng.uniform(0.0, w.area.y());
        w.users.push_back({m, Vec3(x, y, 0.0)});
      }
    }
    const std::vector<Vec3> positions =
        sc.uav_positions.empty()
            ? kmeans_init(w.users, n_uavs, mix(seed, 12 + 100 * attempt), w.altitude_band)
            : sc.uav_positions;
    w.uavs.clear();
    for (std::size_t i = 0; i < n_uavs; ++i) {
      UavState uav;
      uav.id = i;
      uav.position = positions[i];
      uav.tx_power = sc.initial_power;
      uav.residual_energy = sc.initial_energy;
      w.uavs.push_back(uav);
    }
    validate_world(w);
    if (attempts == 1 || placement_usable(w)) return w;
  }
  throw ConnectivityError("no connected, covering placement found in " +
                          std::to_string(kPlacementAttempts) + " draws");
}

rag::WeightProposal rag_weights(const Scenario& sc, const WorldState& world) {
  rag::HashedBowEmbedder embedder(sc.rag.dimension);
  const auto docs = rag::load_corpus_dir(sc.rag.corpus_dir);
  const auto index = rag::build_index(rag::chunk_corpus(docs, sc.rag.block_size), embedder,
                                      sc.rag.block_size);
  if (index.chunks.empty()) throw ConfigError("rag: corpus " + sc.rag.corpus_dir + " is empty");
  const auto digest = rag::digest_scenario(world, sc.rag.emphasis);
  const auto hits = rag::retrieve_topk(index, rag::query_for(digest),
                                       std::min(sc.rag.top_k, index.chunks.size()), embedder);
  rag::MockGenerator generator;
  return generator.generate(digest, hits);
}

// ---- algorithms ----

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::l3_ag: return "l3_ag";
    case Algorithm::brd_epg: return "brd_epg";
    case Algorithm::brd_ncg: return "brd_ncg";
    case Algorithm::etg: return "etg";
    case Algorithm::ga: return "ga";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& s) {
  for (Algorithm a : all_algorithms()) {
    if (to_string(a) == s) return a;
  }
  throw ConfigError("unknown algorithm '" + s + "' (expected l3_ag, brd_epg, brd_ncg, etg or ga)");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{Algorithm::l3_ag, Algorithm::brd_epg,
                                          Algorithm::brd_ncg, Algorithm::etg, Algorithm::ga};
  return all;
}

void ExperimentSpec::validate() const {
  if (seeds.empty()) throw ConfigError("experiment: at least one seed is required");
  for (std::size_t n : sweep) {
    if (n < 2) throw ConfigError("experiment: sweep values must be >= 2");
  }
}

namespace {

template <typename E>
[[noreturn]] void rethrow_with(const E&, const std::string& what) {
  throw E(what);
}

std::string job_label(Algorithm algo, std::size_t n, std::uint64_t seed) {
  return to_string(algo) + " N=" + std::to_string(n) + " seed " + std::to_string(seed) + ": ";
}

}  // namespace

RunArtifacts run_single(const Scenario& sc, Algorithm algo, std::size_t n_uavs,
                        std::uint64_t seed, WeightSource weights, bool snapshots) {
  const std::string label = job_label(algo, n_uavs, seed);
  try {
    RunArtifacts run;
    run.initial_world = instantiate(sc, n_uavs, seed);
    run.game = sc.game;
    if (weights == WeightSource::rag) {
      run.proposal = rag_weights(sc, run.initial_world);
      rag::apply_weights(run.game, *run.proposal);
    }
    run.p1 = solve_p1(run.initial_world, run.game, sc.model, mix(seed, 21), snapshots);
    const std::uint64_t p2_seed = mix(seed, 22);
    switch (algo) {
      case Algorithm::l3_ag:
        run.p2 = solve_p2(run.initial_world, run.p1.topology, run.game, sc.model, p2_seed, snapshots);
        break;
      case Algorithm::brd_epg:
        run.p2 = run_baseline(BaselineKind::brd_epg, run.initial_world, run.p1.topology, run.game,
                              sc.model, p2_seed, sc.baselines);
        break;
      case Algorithm::brd_ncg:
        run.p2 = run_baseline(BaselineKind::brd_ncg, run.initial_world, run.p1.topology, run.game,
                              sc.model, p2_seed, sc.baselines);
        break;
      case Algorithm::etg:
        run.p2 = run_baseline(BaselineKind::etg, run.initial_world, run.p1.topology, run.game,
                              sc.model, p2_seed, sc.baselines);
        break;
      case Algorithm::ga:
        run.p2 = run_baseline(BaselineKind::ga, run.initial_world, run.p1.topology, run.game,
                              sc.model, p2_seed, sc.baselines);
        break;
    }

    const DeployState& st = run.p2.state;
    RadioParams radio = sc.model.radio;
    radio.fading = FadingMode::expected;
    const auto env = build_environment(st.world, st.topo, st.assoc, radio);
    const auto obj = global_objective(st.world, st.topo, st.assoc, env, run.game, sc.model);

    std::vector<DeviationAudit> pooled = run.p1.trace.audits;
    pooled.insert(pooled.end(), run.p2.trace.audits.begin(), run.p2.trace.audits.end());
    const auto stats = consistency(pooled);

    RunRecord& rec = run.record;
    rec.algorithm = to_string(algo);
    rec.n_uavs = n_uavs;
    rec.seed = seed;
    rec.objective = obj.value;
    rec.throughput = obj.throughput;
    rec.energy = obj.energy;
    rec.latency = obj.latency;
    rec.links = st.topo.link_count();
    rec.rounds_p1 = run.p1.trace.rounds;
    rec.rounds_p2 = run.p2.trace.rounds;
    rec.correlation = stats.correlation;
    rec.r2 = stats.r2;
    rec.feasible = obj.constraints.feasible();
    return run;
  } catch (const InfeasibleCoverageError& e) {
    throw InfeasibleCoverageError(e.user(), label + e.what());
  } catch (const ConnectivityError& e) {
    rethrow_with(e, label + e.what());
  } catch (const DuplicateCentroidError& e) {
    rethrow_with(e, label + e.what());
  } catch (const ConfigError& e) {
    rethrow_with(e, label + e.what());
  } catch (const Error& e) {
    throw Error(label + e.what());
  }
}

// ---- aggregation ----

std::vector<RunGroup> aggregate(const std::vector<RunRecord>& rows) {
  std::vector<RunGroup> groups;
  std::map<std::pair<std::string, std::size_t>, std::vector<const RunRecord*>> by_key;
  std::vector<std::pair<std::string, std::size_t>> order;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.algorithm, r.n_uavs);
    if (!by_key.count(key)) order.push_back(key);
    by_key[key].push_back(&r);
  }
  auto agg = [](const std::vector<const RunRecord*>& rs, auto field) {
    Aggregate a;
    const double n = static_cast<double>(rs.size());
    for (const auto* r : rs) a.mean += field(*r);
    a.mean /= n;
    if (rs.size() > 1) {
      double ss = 0.0;
      for (const auto* r : rs) ss += (field(*r) - a.mean) * (field(*r) - a.mean);
      a.stddev = std::sqrt(ss / (n - 1.0));
    }
    return a;
  };
  for (const auto& key : order) {
    const auto& rs = by_key[key];
    RunGroup g;
    g.algorithm = key.first;
    g.n_uavs = key.second;
    g.seeds = rs.size();
    g.objective = agg(rs, [](const RunRecord& r) { return r.objective; });
    g.throughput = agg(rs, [](const RunRecord& r) { return r.throughput; });
    g.energy = agg(rs, [](const RunRecord& r) { return r.energy; });
    g.latency = agg(rs, [](const RunRecord& r) { return r.latency; });
    g.links = agg(rs, [](const RunRecord& r) { return static_cast<double>(r.links); });
    groups.push_back(g);
  }
  return groups;
}

// ---- exports ----

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string convergence_csv(const ConvergenceTrace& trace) {
  std::string out = std::string(kConvergenceHeader) + "\n";
  for (const auto& a : trace.audits) {
    out += std::to_string(a.round) + "," + std::to_string(a.player) + "," +
           format_double(a.delta_utility) + "," + format_double(a.delta_potential) + "," +
           format_double(a.potential) + "," + std::to_string(a.link_count) + "\n";
  }
  return out;
}

json snapshots_json(const ConvergenceTrace& trace) {
  json snaps = json::array();
  for (std::size_t r = 0; r < trace.snapshots.size(); ++r)
    snaps.push_back({{"round", r}, {"link_count", trace.link_count.at(r)},
                     {"adjacency", matrix(trace.snapshots[r])}});
  return {{"rounds", trace.rounds}, {"snapshots", snaps}};
}

json deployment_json(const DeployResult& result) {
  const DeployState& st = result.state;
  json uavs = json::array();
  for (const auto& u : st.world.uavs)
    uavs.push_back({{"id", u.id},
                    {"position", vec(u.position)},
                    {"velocity", vec(u.velocity)},
                    {"power", u.tx_power}});
  json users = json::array();
  for (const auto& u : st.world.users) users.push_back({{"id", u.id}, {"position", vec(u.position)}});
  return {{"algorithm", result.algorithm},
          {"uavs", uavs},
          {"users", users},
          {"adjacency", matrix(st.topo.adjacency())},
          {"association", matrix(st.assoc.served)},
          {"totals",
           {{"throughput", real(result.metrics.total_throughput())},
            {"energy", real(result.metrics.total_energy())},
            {"latency", real(result.metrics.total_latency())}}}};
}

namespace {

json record_json(const RunRecord& r) {
  return {{"algorithm", r.algorithm},
          {"n_uavs", r.n_uavs},
          {"seed", r.seed},
          {"objective", real(r.objective)},
          {"throughput", real(r.throughput)},
          {"energy", real(r.energy)},
          {"latency", real(r.latency)},
          {"links", r.links},
          {"rounds_p1", r.rounds_p1},
          {"rounds_p2", r.rounds_p2},
          {"correlation", real(r.correlation)},
          {"r2", real(r.r2)},
          {"feasible", r.feasible}};
}

json aggregate_json(const Aggregate& a) { return {{"mean", real(a.mean)}, {"stddev", real(a.stddev)}}; }

}  // namespace

json summary_json(const RunRecord& record, const ConvergenceTrace& p1, const ConvergenceTrace& p2) {
  json j = record_json(record);
  j["p1"] = {{"rounds_to_converge", p1.rounds}, {"converged", p1.converged},
             {"initial_link_count", p1.initial_link_count}};
  j["p2"] = {{"rounds_to_converge", p2.rounds}, {"converged", p2.converged},
             {"initial_potential", real(p2.initial_potential)},
             {"final_potential", real(p2.potential.empty() ? p2.initial_potential : p2.potential.back())}};
  return j;
}

json report_json(const RunReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(record_json(r));
  json groups = json::array();
  for (const auto& g : report.groups)
    groups.push_back({{"algorithm", g.algorithm},
                      {"n_uavs", g.n_uavs},
                      {"seeds", g.seeds},
                      {"objective", aggregate_json(g.objective)},
                      {"throughput", aggregate_json(g.throughput)},
                      {"energy", aggregate_json(g.energy)},
                      {"latency", aggregate_json(g.latency)},
                      {"links", aggregate_json(g.links)}});
  return {{"rows", rows}, {"aggregates", groups}};
}

std::string report_csv(const RunReport& report) {
  std::string out =
      "algorithm,n_uavs,seed,objective,throughput,energy,latency,links,rounds_p1,rounds_p2,"
      "correlation,r2,feasible\n";
  for (const auto& r : report.rows) {
    out += r.algorithm + "," + std::to_string(r.n_uavs) + "," + std::to_string(r.seed) + "," +
           format_double(r.objective) + "," + format_double(r.throughput) + "," +
           format_double(r.energy) + "," + format_double(r.latency) + "," +
           std::to_string(r.links) + "," + std::to_string(r.rounds_p1) + "," +
           std::to_string(r.rounds_p2) + "," + format_double(r.correlation) + "," +
           format_double(r.r2) + "," + (r.feasible ? "1" : "0") + "\n";
  }
  return out;
}

std::string comparison_csv(const RunReport& report) {
  std::string out =
      "n_uavs,algorithm,seeds,throughput_mean,throughput_std,energy_mean,energy_std,"
      "latency_mean,latency_std,objective_mean,objective_std\n";
  std::vector<const RunGroup*> gs;
  for (const auto& g : report.groups) gs.push_back(&g);
  std::stable_sort(gs.begin(), gs.end(),
                   [](const RunGroup* a, const RunGroup* b) { return a->n_uavs < b->n_uavs; });
  for (const auto* g : gs) {
    out += std::to_string(g->n_uavs) + "," + g->algorithm + "," + std::to_string(g->seeds) + "," +
           format_double(g->throughput.mean) + "," + format_double(g->throughput.stddev) + "," +
           format_double(g->energy.mean) + "," + format_double(g->energy.stddev) + "," +
           format_double(g->latency.mean) + "," + format_double(g->latency.stddev) + "," +
           format_double(g->objective.mean) + "," + format_double(g->objective.stddev) + "\n";
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + path);
    os << content;
    if (!os) throw Error("write failed for " + path);
  }
  fs::rename(tmp, target, ec);
  if (ec) throw Error("cannot move " + tmp + " to " + path + ": " + ec.message());
}

void export_traces(const RunArtifacts& run, const std::string& dir) {
  const fs::path d(dir);
  write_file_atomic((d / "convergence_p1.csv").string(), convergence_csv(run.p1.trace));
  write_file_atomic((d / "convergence_p2.csv").string(), convergence_csv(run.p2.trace));
  if (!run.p1.trace.snapshots.empty())
    write_file_atomic((d / "snapshots.json").string(), snapshots_json(run.p1.trace).dump(2) + "\n");
  json dep = deployment_json(run.p2);
  if (run.proposal) dep["weights"] = json::parse(rag::to_json(*run.proposal));
  write_file_atomic((d / "deployment.json").string(), dep.dump(2) + "\n");
  write_file_atomic((d / "summary.json").string(),
                    summary_json(run.record, run.p1.trace, run.p2.trace).dump(2) + "\n");
}

// ---- orchestration ----

namespace {

struct Job {
  Algorithm algo;
  std::size_t n;
  std::uint64_t seed;
};

// Runs f(k) for k in [0, count) on `jobs` threads. The exception of the
// lowest failing index is rethrown, so failures are deterministic too.
template <typename F>
void parallel_for(std::size_t count, std::size_t jobs, F&& f) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RunReport run_grid(const ExperimentSpec& spec, const Scenario& sc,
                   const std::vector<Algorithm>& algos) {
  const std::vector<std::size_t> sweep = spec.sweep.empty() ? std::vector<std::size_t>{sc.n_uavs}
                                                            : spec.sweep;
  std::vector<Job> jobs;
  for (Algorithm a : algos)
    for (std::size_t n : sweep)
      for (std::uint64_t s : spec.seeds) jobs.push_back({a, n, s});

  RunReport report;
  report.rows.resize(jobs.size());
  parallel_for(jobs.size(), spec.jobs, [&](std::size_t k) {
    const Job& job = jobs[k];
    const auto run = run_single(sc, job.algo, job.n, job.seed, spec.weights, spec.snapshots);
    if (!spec.output_dir.empty()) {
      const fs::path dir = fs::path(spec.output_dir) / to_string(job.algo) /
                           ("n" + std::to_string(job.n)) / ("seed" + std::to_string(job.seed));
      export_traces(run, dir.string());
    }
    report.rows[k] = run.record;
  });
  report.groups = aggregate(report.rows);
  return report;
}

json spec_json(const ExperimentSpec& spec, const std::vector<Algorithm>& algos) {
  json a = json::array();
  for (Algorithm x : algos) a.push_back(to_string(x));
  return {{"scenario", spec.scenario_path},
          {"algorithms", a},
          {"seeds", spec.seeds},
          {"sweep", spec.sweep},
          {"weights", spec.weights == WeightSource::rag ? "rag" : "config"},
          {"snapshots", spec.snapshots}};
}

void write_common(const ExperimentSpec& spec, const Scenario& sc,
                  const std::vector<Algorithm>& algos, const RunReport& report) {
  const fs::path out(spec.output_dir);
  json resolved{{"experiment", spec_json(spec, algos)}, {"scenario", resolved_config(sc)}};
  write_file_atomic((out / "resolved_config.json").string(), resolved.dump(2) + "\n");
  write_file_atomic((out / "report.json").string(), report_json(report).dump(2) + "\n");
  write_file_atomic((out / "report.csv").string(), report_csv(report));
}

}  // namespace

RunReport run_pipeline(const ExperimentSpec& spec) {
  spec.validate();
  const Scenario sc = load_scenario(spec.scenario_path);
  const std::vector<Algorithm> algos{spec.algorithm};
  RunReport report = run_grid(spec, sc, algos);
  if (!spec.output_dir.empty()) write_common(spec, sc, algos, report);
  return report;
}

RunReport compare_algorithms(const ExperimentSpec& spec, const std::vector<Algorithm>& algos) {
  spec.validate();
  if (algos.empty()) throw ConfigError("compare: no algorithms given");
  if (spec.seeds.size() < 5) throw ConfigError("compare: at least 5 paired seeds are required");
  const Scenario sc = load_scenario(spec.scenario_path);
  RunReport report = run_grid(spec, sc, algos);
  if (!spec.output_dir.empty()) {
    write_common(spec, sc, algos, report);
    write_file_atomic((fs::path(spec.output_dir) / "comparison.csv").string(), comparison_csv(report));
  }
  return report;
}

}  // namespace uavnet
