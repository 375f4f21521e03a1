#pragma once

#include "uavnet/channel.hpp"
#include "uavnet/scenario.hpp"
#include "uavnet/topology.hpp"

#include <limits>
#include <vector>

namespace uavnet {

// Rotary-wing constants; defaults are conventional values, not measured ones.
struct EnergyParams {
  double circuit_power_w = 0.1;
  double profile_drag = 0.012;      // δ
  double air_density = 1.225;       // ρ_air
  double rotor_area = 0.503;        // S
  double tip_speed = 120.0;         // κ_tip
  double induced_correction = 0.1;  // κ_b
  double weight_n = 20.0;           // W
  double fuselage_drag = 0.6;       // d_f
  double gravity = 9.81;

  void validate() const;
};

struct LatencyParams {
  double packet_bits = 1e6;
  double light_speed = kLightSpeed;

  void validate() const;
};

inline constexpr double kUnusableLatency = std::numeric_limits<double>::infinity();

double comm_energy(double tx_power, const EnergyParams& params, double dt);
double blade_power(const EnergyParams& params);
double induced_power(const EnergyParams& params);
double parasite_power(double speed, const EnergyParams& params);
double flight_power(double speed, const EnergyParams& params);
// Cruise energy at v_now plus the kinetic-energy change to v_next; never negative.
double flight_energy(double v_now, double v_next, const EnergyParams& params, double dt);
// L/r + d/c; kUnusableLatency when the rate is zero.
double link_latency(double rate, double d, const LatencyParams& params);

struct UavTotals {
  double comm_energy = 0.0;
  double flight_energy = 0.0;
  double energy = 0.0;
  double latency = 0.0;  // A2A links credited to the lower index, A2G to the server
};

struct NetworkTotals {
  double energy = 0.0;
  double latency = 0.0;
  std::vector<UavTotals> per_uav;
  std::vector<std::size_t> energy_violations;  // UAVs with E_i > residual energy
};

// One slot: every UAV cruises at |velocity| for Δt.
NetworkTotals network_totals(const WorldState& world, const LinkTopology& topo,
                             const Association& assoc, const RadioEnvironment& env,
                             const EnergyParams& eparams, const LatencyParams& lparams);

// Deducts per-UAV slot energy from residual_energy (floored at zero) and returns
// the indices of UAVs that could not cover their slot energy.
std::vector<std::size_t> debit_energy(WorldState& world, const NetworkTotals& totals);

}  // namespace uavnet
