#include "uavnet/metrics.hpp"

#include "uavnet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace uavnet {

void EnergyParams::validate() const {
  const double values[] = {circuit_power_w, profile_drag, air_density, rotor_area, tip_speed,
                           induced_correction, weight_n, fuselage_drag, gravity};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError("uavs.energy: all rotary-wing constants must be positive");
  }
}

void LatencyParams::validate() const {
  if (!(packet_bits > 0.0)) throw ConfigError("latency.packet_bits must be positive");
  if (!(light_speed > 0.0)) throw ConfigError("latency.light_speed must be positive");
}

double comm_energy(double tx_power, const EnergyParams& params, double dt) {
  if (tx_power < 0.0) throw DomainError("comm_energy: negative transmit power");
  return (tx_power + params.circuit_power_w) * dt;
}

double blade_power(const EnergyParams& p) {
  return p.profile_drag / 8.0 * p.air_density * p.rotor_area * std::pow(p.tip_speed, 3);
}

double induced_power(const EnergyParams& p) {
  return (1.0 + p.induced_correction) * std::pow(p.weight_n, 1.5) /
         std::sqrt(2.0 * p.air_density * p.rotor_area);
}

double parasite_power(double speed, const EnergyParams& p) {
  return 0.5 * p.fuselage_drag * speed * speed * speed;
}

double flight_power(double speed, const EnergyParams& params) {
  if (speed < 0.0) throw DomainError("flight_power: negative speed");
  return blade_power(params) + induced_power(params) + parasite_power(speed, params);
}

double flight_energy(double v_now, double v_next, const EnergyParams& params, double dt) {
  if (v_now < 0.0 || v_next < 0.0) throw DomainError("flight_energy: negative speed");
  const double accel = 0.5 * (v_next * v_next - v_now * v_now) * params.weight_n / params.gravity;
  // No regenerative braking.
  return std::max(0.0, flight_power(v_now, params) * dt + accel);
}

double link_latency(double rate, double d, const LatencyParams& params) {
  if (rate < 0.0) throw DomainError("link_latency: negative rate");
  if (rate == 0.0) return kUnusableLatency;
  return params.packet_bits / rate + d / params.light_speed;
}

NetworkTotals network_totals(const WorldState& world, const LinkTopology& topo,
                             const Association& assoc, const RadioEnvironment& env,
                             const EnergyParams& eparams, const LatencyParams& lparams) {
  const std::size_t n = world.n_uavs();
  const std::size_t m = world.n_users();
  const double dt = world.slot_length;
  NetworkTotals out;
  out.per_uav.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& u = world.uavs[i];
    auto& t = out.per_uav[i];
    const double speed = u.velocity.norm();
    t.comm_energy = comm_energy(u.tx_power, eparams, dt);
    t.flight_energy = flight_energy(speed, speed, eparams, dt);
    t.energy = t.comm_energy + t.flight_energy;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!topo.has_link(i, j)) continue;
      t.latency += link_latency(env.rate_a2a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                distance(u.position, world.uavs[j].position), lparams);
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (!assoc.serves(i, k)) continue;
      t.latency += link_latency(env.rate_a2g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)),
                                distance(u.position, world.users[k].position), lparams);
    }
    out.energy += t.energy;
    out.latency += t.latency;
    if (t.energy > u.residual_energy) out.energy_violations.push_back(i);
  }
  return out;
}

std::vector<std::size_t> debit_energy(WorldState& world, const NetworkTotals& totals) {
  std::vector<std::size_t> depleted;
  for (std::size_t i = 0; i < world.n_uavs(); ++i) {
    auto& u = world.uavs[i];
    const double e = totals.per_uav.at(i).energy;
    if (e > u.residual_energy) depleted.push_back(i);
    u.residual_energy = std::max(0.0, u.residual_energy - e);
  }
  return depleted;
}

}  // namespace uavnet
