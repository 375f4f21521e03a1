#include "uavnet/deploy.hpp"

#include "uavnet/errors.hpp"

namespace uavnet {

double DeployMetrics::total_throughput() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < throughput.size(); ++i) s += throughput(i);
  return s;
}

double DeployMetrics::total_energy() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < energy.size(); ++i) s += energy(i);
  return s;
}

double DeployMetrics::total_latency() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < latency.size(); ++i) s += latency(i);
  return s;
}

DeployMetrics deploy_metrics(const WorldState& world, const LinkTopology& topo,
                             const Association& assoc, const Matrix& gain_a2a,
                             const Matrix& gain_a2g, double noise, const ModelParams& model) {
  const auto n = static_cast<Eigen::Index>(world.n_uavs());
  const auto m = static_cast<Eigen::Index>(world.n_users());
  Vector power(n);
  for (Eigen::Index i = 0; i < n; ++i) power(i) = world.uavs[i].tx_power;
  const Vector rx_uav = received_power(gain_a2a, power);
  const Vector rx_user = received_power(gain_a2g, power);
  const double bw = model.radio.bandwidth_hz;
  const double dt = world.slot_length;

  DeployMetrics out;
  out.throughput = Vector::Zero(n);
  out.energy = Vector::Zero(n);
  out.latency = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& u = world.uavs[i];
    const double speed = u.velocity.norm();
    out.energy(i) = comm_energy(u.tx_power, model.energy, dt) +
                    flight_energy(speed, speed, model.energy, dt);
    double th = 0.0;
    double lat = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!topo.has_link(i, j)) continue;
      const double signal = power(i) * gain_a2a(i, j);
      const double r = shannon_rate(bw, signal / (rx_uav(j) - signal + noise));
      th += r;
      lat += link_latency(r, distance(u.position, world.uavs[j].position), model.latency);
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      if (!assoc.serves(i, k)) continue;
      const double signal = power(i) * gain_a2g(i, k);
      const double r = shannon_rate(bw, signal / (rx_user(k) - signal + noise));
      th += r;
      lat += link_latency(r, distance(u.position, world.users[k].position), model.latency);
    }
    out.throughput(i) = th;
    out.latency(i) = lat;
  }
  return out;
}

DeployMetrics deploy_metrics(const WorldState& world, const LinkTopology& topo,
                             const Association& assoc, const RadioEnvironment& env,
                             const ModelParams& model) {
  return deploy_metrics(world, topo, assoc, env.gain_a2a, env.gain_a2g, env.noise, model);
}

DeployState make_deploy_state(const WorldState& world, const LinkTopology& topo,
                              const Association& assoc) {
  DeployState s{world, topo, assoc, {}};
  for (auto& u : s.world.uavs) {
    s.anchor.push_back(u.position);
    u.velocity = Vec3::Zero();
  }
  return s;
}

void apply_strategy(DeployState& state, std::size_t i, const DeployStrategy& s) {
  auto& u = state.world.uavs.at(i);
  u.position = s.position;
  u.tx_power = s.power;
  u.velocity = (s.position - state.anchor.at(i)) / state.world.slot_length;
}

bool strategy_feasible(const DeployState& state, std::size_t i, const DeployStrategy& s) {
  const auto& w = state.world;
  if (!w.in_flight_region(s.position)) return false;
  if (s.power < w.p_min() || s.power > w.p_max()) return false;
  for (std::size_t k = 0; k < w.n_users(); ++k) {
    if (state.assoc.serves(i, k) && distance(s.position, w.users[k].position) > w.comm_radius)
      return false;
  }
  return true;
}

DeployEvaluator::DeployEvaluator(DeployState state, ModelParams model)
    : state_(std::move(state)), model_(std::move(model)) {
  const auto& w = state_.world;
  if (state_.topo.size() != w.n_uavs() || state_.assoc.n_uavs() != w.n_uavs() ||
      state_.assoc.n_users() != w.n_users() || state_.anchor.size() != w.n_uavs())
    throw ContractViolation("DeployEvaluator: inconsistent state dimensions");
  RadioParams expected = model_.radio;
  expected.fading = FadingMode::expected;
  model_.radio = expected;
  noise_ = noise_power(model_.radio);
  const auto n = static_cast<Eigen::Index>(w.n_uavs());
  gain_a2a_ = Matrix::Zero(n, n);
  gain_a2g_ = Matrix::Zero(n, static_cast<Eigen::Index>(w.n_users()));
  for (std::size_t i = 0; i < w.n_uavs(); ++i)
    refresh_row(i, gain_a2a_, gain_a2g_, w.uavs[i].position);
  metrics_ = deploy_metrics(w, state_.topo, state_.assoc, gain_a2a_, gain_a2g_, noise_, model_);
}

void DeployEvaluator::refresh_row(std::size_t i, Matrix& a2a, Matrix& a2g, const Vec3& q) const {
  const auto& w = state_.world;
  const auto ii = static_cast<Eigen::Index>(i);
  for (std::size_t j = 0; j < w.n_uavs(); ++j) {
    if (j == i) continue;
    const double h = a2a_gain(q, w.uavs[j].position, w.obstacles, model_.radio);
    a2a(ii, static_cast<Eigen::Index>(j)) = h;
    a2a(static_cast<Eigen::Index>(j), ii) = h;
  }
  for (std::size_t k = 0; k < w.n_users(); ++k)
    a2g(ii, static_cast<Eigen::Index>(k)) = a2g_gain(q, w.users[k].position, w.obstacles, model_.radio);
}

DeployMetrics DeployEvaluator::evaluate(std::size_t i, const DeployStrategy& s) const {
  DeployState trial = state_;
  apply_strategy(trial, i, s);
  Matrix a2a = gain_a2a_;
  Matrix a2g = gain_a2g_;
  refresh_row(i, a2a, a2g, s.position);
  return deploy_metrics(trial.world, trial.topo, trial.assoc, a2a, a2g, noise_, model_);
}

void DeployEvaluator::commit(std::size_t i, const DeployStrategy& s) {
  apply_strategy(state_, i, s);
  refresh_row(i, gain_a2a_, gain_a2g_, s.position);
  metrics_ = deploy_metrics(state_.world, state_.topo, state_.assoc, gain_a2a_, gain_a2g_, noise_,
                            model_);
}

void DeployEvaluator::set_association(const Association& assoc) {
  if (assoc.n_uavs() != state_.world.n_uavs() || assoc.n_users() != state_.world.n_users())
    throw ContractViolation("DeployEvaluator: association shape mismatch");
  state_.assoc = assoc;
  metrics_ = deploy_metrics(state_.world, state_.topo, state_.assoc, gain_a2a_, gain_a2g_, noise_,
                            model_);
}

RadioEnvironment DeployEvaluator::environment() const {
  return build_environment(state_.world, state_.topo, state_.assoc, model_.radio);
}

}  // namespace uavnet
