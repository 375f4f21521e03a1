#pragma once

#include "uavnet/rng.hpp"
#include "uavnet/scenario.hpp"
#include "uavnet/topology.hpp"
#include "uavnet/types.hpp"

#include <cmath>
#include <optional>
#include <span>

namespace uavnet {

enum class FadingMode { expected, stochastic };

struct RadioParams {
  double carrier_hz = 2.4e9;
  double bandwidth_hz = 2e6;
  // Exactly one of the two noise configurations may be set.
  std::optional<double> noise_density_dbm_hz = -174.0;
  std::optional<double> temperature_k;
  double tx_gain_dbi = 3.0;
  double rx_gain_dbi = 3.0;
  double xi_los_db = 1.0;
  double xi_nlos_db = 20.0;
  double env_a = 9.6;
  double env_b = 0.28;
  double path_loss_exponent = 2.0;
  FadingMode fading = FadingMode::expected;
  // Explicit obstacles on the UAV-user segment force the NLoS branch.
  bool obstacles_block_a2g = true;

  void validate() const;
};

// 10·n·log10(4π f d / c); n = 2 is free space.
template <typename Scalar>
Scalar free_space_loss_db(Scalar d, Scalar carrier_hz, Scalar exponent = Scalar(2)) {
  using std::log10;
  return Scalar(10) * exponent * log10(Scalar(4 * kPi) * carrier_hz * d / Scalar(kLightSpeed));
}

template <typename Scalar>
Scalar db_to_linear(Scalar db) {
  using std::pow;
  return pow(Scalar(10), db / Scalar(10));
}

// Shannon rate B·log2(1 + γ).
template <typename Scalar>
Scalar shannon_rate(Scalar bandwidth_hz, Scalar sinr) {
  using std::log2;
  return bandwidth_hz * log2(Scalar(1) + sinr);
}

double path_loss_a2a(double d, int los, const RadioParams& params);
double los_probability(double theta_deg, const RadioParams& params);
// Expected mode: FSPL + p·ξ_LoS + (1-p)·ξ_NLoS. Stochastic mode draws the branch
// from `draw`, which must then be non-null.
double path_loss_a2g(double d, double p_los, const RadioParams& params, Rng* draw = nullptr);
double noise_power(const RadioParams& params);

// Linear power gains G_tx·G_rx·10^(-PL/10) in expected-fading mode. Pair order
// does not matter: both functions canonicalize their arguments.
double a2a_gain(const Vec3& a, const Vec3& b, std::span<const Obstacle> obstacles,
                const RadioParams& params);
double a2g_gain(const Vec3& uav, const Vec3& user, std::span<const Obstacle> obstacles,
                const RadioParams& params);
// Effective LoS probability: elevation model, zeroed by explicit blockage.
double effective_p_los(const Vec3& uav, const Vec3& user, std::span<const Obstacle> obstacles,
                       const RadioParams& params);

// Σ_k p_k·gain(k, r) for every receiver column r, summed in index order.
Vector received_power(const Matrix& gain, const Vector& power);

struct RadioEnvironment {
  Vector power;        // p_i
  double noise = 0.0;  // σ²
  Eigen::MatrixXi los_a2a;  // ζ_ij
  Matrix p_los_a2g;    // effective P_LoS per UAV-user pair
  Matrix gain_a2a;     // h_ij, zero diagonal
  Matrix gain_a2g;     // h_im
  Matrix sinr_a2a;     // γ_ij (transmitter i, receiver j)
  Matrix sinr_a2g;     // γ_im
  Matrix rate_a2a;     // r_ij
  Matrix rate_a2g;     // r_im
  Vector rx_total_uav;   // Σ_k p_k h_kj at UAV receiver j
  Vector rx_total_user;  // Σ_k p_k h_km at user m

  // Interference-plus-noise seen by receiver `rx` when listening to `tx`.
  double interference_a2a(std::size_t tx, std::size_t rx) const {
    return rx_total_uav(static_cast<Eigen::Index>(rx)) -
           power(static_cast<Eigen::Index>(tx)) *
               gain_a2a(static_cast<Eigen::Index>(tx), static_cast<Eigen::Index>(rx)) +
           noise;
  }
};

// Every UAV transmits in every slot, so the interference field does not depend
// on the topology or the association; both are accepted for dimension checks.
RadioEnvironment build_environment(const WorldState& world, const LinkTopology& topo,
                                   const Association& assoc, const RadioParams& params,
                                   Rng* draw = nullptr);

struct Throughput {
  double a2a = 0.0;
  double a2g = 0.0;
  double total = 0.0;
  Vector per_uav;  // A2A rate credited to the lower-index endpoint, A2G to the server
};

Throughput throughput(const WorldState& world, const LinkTopology& topo,
                      const Association& assoc, const RadioEnvironment& env);

}  // namespace uavnet
