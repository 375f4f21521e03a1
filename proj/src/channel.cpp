#include "uavnet/channel.hpp"

#include "uavnet/errors.hpp"

#include <algorithm>

namespace uavnet {

namespace {

// Co-located nodes would put log10(0) into the path loss; distances inside the
// simulator are floored at one metre.
constexpr double kMinSimDistance = 1.0;

double antenna_gain(const RadioParams& p) { return db_to_linear(p.tx_gain_dbi + p.rx_gain_dbi); }

}  // namespace

void RadioParams::validate() const {
  if (!(bandwidth_hz > 0.0)) throw ConfigError("radio.bandwidth_hz must be positive");
  if (!(carrier_hz > 0.0)) throw ConfigError("radio.carrier_hz must be positive");
  if (xi_nlos_db < xi_los_db) throw ConfigError("radio.xi_nlos_db must be >= xi_los_db");
  if (!(env_a > 0.0 && env_b > 0.0)) throw ConfigError("radio.env_a and env_b must be positive");
  if (!(path_loss_exponent > 0.0)) throw ConfigError("radio.path_loss_exponent must be positive");
  if (noise_density_dbm_hz && temperature_k)
    throw ConfigError("radio: noise_density_dbm_hz and temperature_k are mutually exclusive");
  if (!noise_density_dbm_hz && !temperature_k)
    throw ConfigError("radio: one of noise_density_dbm_hz or temperature_k is required");
  if (temperature_k && !(*temperature_k > 0.0))
    throw ConfigError("radio.temperature_k must be positive");
}

double path_loss_a2a(double d, int los, const RadioParams& params) {
  if (!(d > 0.0)) throw DomainError("path_loss_a2a: distance must be positive");
  const double excess = los ? params.xi_los_db : params.xi_nlos_db;
  return free_space_loss_db(d, params.carrier_hz, params.path_loss_exponent) + excess;
}

double los_probability(double theta_deg, const RadioParams& params) {
  const double a = params.env_a;
  return 1.0 / (1.0 + a * std::exp(-params.env_b * (theta_deg - a)));
}

double path_loss_a2g(double d, double p_los, const RadioParams& params, Rng* draw) {
  if (!(d > 0.0)) throw DomainError("path_loss_a2g: distance must be positive");
  if (p_los < 0.0 || p_los > 1.0) throw DomainError("path_loss_a2g: p_los outside [0, 1]");
  const double fspl = free_space_loss_db(d, params.carrier_hz, params.path_loss_exponent);
  if (params.fading == FadingMode::expected) {
    return fspl + p_los * params.xi_los_db + (1.0 - p_los) * params.xi_nlos_db;
  }
  if (draw == nullptr) throw ConfigError("path_loss_a2g: stochastic fading requires an rng");
  return fspl + (draw->bernoulli(p_los) ? params.xi_los_db : params.xi_nlos_db);
}

double noise_power(const RadioParams& params) {
  if (params.noise_density_dbm_hz && params.temperature_k)
    throw ConfigError("radio: noise_density_dbm_hz and temperature_k are mutually exclusive");
  if (params.temperature_k) return kBoltzmann * *params.temperature_k * params.bandwidth_hz;
  if (!params.noise_density_dbm_hz) throw ConfigError("radio: no noise configuration");
  return std::pow(10.0, (*params.noise_density_dbm_hz - 30.0) / 10.0) * params.bandwidth_hz;
}

double a2a_gain(const Vec3& a, const Vec3& b, std::span<const Obstacle> obstacles,
                const RadioParams& params) {
  // Lexicographic order so (a, b) and (b, a) share one floating-point path.
  const bool swap = std::lexicographical_compare(b.data(), b.data() + 3, a.data(), a.data() + 3);
  const Vec3& p = swap ? b : a;
  const Vec3& q = swap ? a : b;
  const int los = los_between(p, q, obstacles);
  const double d = std::max(distance(p, q), kMinSimDistance);
  return antenna_gain(params) * db_to_linear(-path_loss_a2a(d, los, params));
}

double effective_p_los(const Vec3& uav, const Vec3& user, std::span<const Obstacle> obstacles,
                       const RadioParams& params) {
  if (params.obstacles_block_a2g && !los_between(uav, user, obstacles)) return 0.0;
  return los_probability(elevation_angle(uav, user), params);
}

double a2g_gain(const Vec3& uav, const Vec3& user, std::span<const Obstacle> obstacles,
                const RadioParams& params) {
  const double p_los = effective_p_los(uav, user, obstacles, params);
  const double d = std::max(distance(uav, user), kMinSimDistance);
  RadioParams expected = params;
  expected.fading = FadingMode::expected;
  return antenna_gain(params) * db_to_linear(-path_loss_a2g(d, p_los, expected));
}

Vector received_power(const Matrix& gain, const Vector& power) {
  Vector out = Vector::Zero(gain.cols());
  for (Eigen::Index r = 0; r < gain.cols(); ++r) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < gain.rows(); ++k) acc += power(k) * gain(k, r);
    out(r) = acc;
  }
  return out;
}

RadioEnvironment build_environment(const WorldState& world, const LinkTopology& topo,
                                   const Association& assoc, const RadioParams& params,
                                   Rng* draw) {
  const auto n = static_cast<Eigen::Index>(world.n_uavs());
  const auto m = static_cast<Eigen::Index>(world.n_users());
  if (static_cast<Eigen::Index>(topo.size()) != n)
    throw ContractViolation("build_environment: topology size != UAV count");
  if (static_cast<Eigen::Index>(assoc.n_uavs()) != n ||
      static_cast<Eigen::Index>(assoc.n_users()) != m)
    throw ContractViolation("build_environment: association shape != N x M");
  const bool stochastic = params.fading == FadingMode::stochastic;
  if (stochastic && draw == nullptr)
    throw ConfigError("build_environment: stochastic fading requires an rng");

  RadioEnvironment env;
  env.noise = noise_power(params);
  env.power.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) env.power(i) = world.uavs[i].tx_power;
  const double g_ant = antenna_gain(params);

  env.los_a2a = Eigen::MatrixXi::Zero(n, n);
  env.gain_a2a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vec3& qi = world.uavs[i].position;
      const Vec3& qj = world.uavs[j].position;
      const int los = los_between(qi, qj, world.obstacles);
      double h = a2a_gain(qi, qj, world.obstacles, params);
      if (stochastic && !los) h *= draw->exponential();
      env.los_a2a(i, j) = env.los_a2a(j, i) = los;
      env.gain_a2a(i, j) = env.gain_a2a(j, i) = h;
    }
  }

  env.p_los_a2g = Matrix::Zero(n, m);
  env.gain_a2g = Matrix::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const Vec3& q = world.uavs[i].position;
      const Vec3& g = world.users[k].position;
      const double p_los = effective_p_los(q, g, world.obstacles, params);
      env.p_los_a2g(i, k) = p_los;
      double h = 0.0;
      if (stochastic) {
        // Bernoulli(P_LoS) picks the branch; unit-gain fading for LoS, Rayleigh for NLoS.
        const double d = std::max(distance(q, g), kMinSimDistance);
        const bool los = draw->bernoulli(p_los);
        h = g_ant * db_to_linear(-path_loss_a2g(d, los ? 1.0 : 0.0, params, draw));
        if (!los) h *= draw->exponential();
      } else {
        h = a2g_gain(q, g, world.obstacles, params);
      }
      env.gain_a2g(i, k) = h;
    }
  }

  env.rx_total_uav = received_power(env.gain_a2a, env.power);
  env.rx_total_user = received_power(env.gain_a2g, env.power);

  env.sinr_a2a = Matrix::Zero(n, n);
  env.rate_a2a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double signal = env.power(i) * env.gain_a2a(i, j);
      const double gamma = signal / (env.rx_total_uav(j) - signal + env.noise);
      env.sinr_a2a(i, j) = gamma;
      env.rate_a2a(i, j) = shannon_rate(params.bandwidth_hz, gamma);
    }
  }
  env.sinr_a2g = Matrix::Zero(n, m);
  env.rate_a2g = Matrix::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const double signal = env.power(i) * env.gain_a2g(i, k);
      const double gamma = signal / (env.rx_total_user(k) - signal + env.noise);
      env.sinr_a2g(i, k) = gamma;
      env.rate_a2g(i, k) = shannon_rate(params.bandwidth_hz, gamma);
    }
  }
  return env;
}

Throughput throughput(const WorldState& world, const LinkTopology& topo,
                      const Association& assoc, const RadioEnvironment& env) {
  const std::size_t n = world.n_uavs();
  const std::size_t m = world.n_users();
  Throughput th;
  th.per_uav = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double own = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (topo.has_link(i, j)) {
        const double r = env.rate_a2a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        th.a2a += r;
        own += r;
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (assoc.serves(i, k)) {
        const double r = env.rate_a2g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        th.a2g += r;
        own += r;
      }
    }
    th.per_uav(static_cast<Eigen::Index>(i)) = own;
  }
  // Summed from the per-UAV credits so the decomposition is exact.
  for (std::size_t i = 0; i < n; ++i) th.total += th.per_uav(static_cast<Eigen::Index>(i));
  return th;
}

}  // namespace uavnet
