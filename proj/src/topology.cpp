#include "uavnet/topology.hpp"

#include "uavnet/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <deque>

namespace uavnet {

LinkTopology LinkTopology::complete(std::size_t n) {
  LinkTopology t(n);
  t.adj_.setOnes();
  t.adj_.diagonal().setZero();
  return t;
}

LinkTopology LinkTopology::from_matrix(const BinaryMatrix& adj) {
  if (adj.rows() != adj.cols()) throw ConfigError("adjacency must be square");
  for (Eigen::Index i = 0; i < adj.rows(); ++i) {
    if (adj(i, i) != 0) throw ConfigError("adjacency diagonal must be zero");
    for (Eigen::Index j = 0; j < adj.cols(); ++j) {
      if (adj(i, j) > 1) throw ConfigError("adjacency entries must be 0 or 1");
      if (adj(i, j) != adj(j, i)) throw ConfigError("adjacency must be symmetric");
    }
  }
  LinkTopology t;
  t.adj_ = adj;
  return t;
}

std::size_t LinkTopology::degree(std::size_t i) const {
  return static_cast<std::size_t>(adj_.row(static_cast<Eigen::Index>(i)).cast<int>().sum());
}

std::size_t LinkTopology::link_count() const {
  return static_cast<std::size_t>(adj_.cast<int>().sum() / 2);
}

std::vector<std::size_t> LinkTopology::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < size(); ++j) {
    if (adj_(i, j)) out.push_back(j);
  }
  return out;
}

LinkTopology LinkTopology::with_link(std::size_t i, std::size_t j, bool present) const {
  if (i == j) throw ContractViolation("self links are not allowed");
  LinkTopology t = *this;
  t.adj_(i, j) = t.adj_(j, i) = present ? 1 : 0;
  return t;
}

double algebraic_connectivity(const LinkTopology& topo) {
  if (topo.size() < 2) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian(topo), Eigen::EigenvaluesOnly);
  // Eigenvalues come back ascending; clamp round-off below zero.
  return std::max(0.0, solver.eigenvalues()(1));
}

bool is_connected(const LinkTopology& topo) {
  const std::size_t n = topo.size();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (topo.has_link(u, v) && !seen[v]) {
        seen[v] = 1;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == n;
}

SpectralReport spectral_report(const LinkTopology& topo) {
  SpectralReport r;
  r.degree = topo.adjacency().cast<double>().rowwise().sum();
  r.lambda2 = algebraic_connectivity(topo);
  r.connected = is_connected(topo);
  r.spectral_agrees = (r.lambda2 > kConnectivityTolerance) == r.connected || topo.size() < 2;
  return r;
}

GuardedRemoval guarded_remove(const LinkTopology& topo, std::size_t i, std::size_t j) {
  if (i == j || !topo.has_link(i, j)) return {topo, false};
  LinkTopology candidate = topo.with_link(i, j, false);
  if (!is_connected(candidate)) return {topo, false};
  return {std::move(candidate), true};
}

std::size_t Association::load(std::size_t i) const {
  return static_cast<std::size_t>(served.row(static_cast<Eigen::Index>(i)).cast<int>().sum());
}

}  // namespace uavnet
