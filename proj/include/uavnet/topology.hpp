#pragma once

#include "uavnet/types.hpp"

#include <vector>

namespace uavnet {

// Undirected UAV link graph: symmetric 0/1 adjacency with zero diagonal.
class LinkTopology {
 public:
  LinkTopology() = default;
  explicit LinkTopology(std::size_t n) : adj_(BinaryMatrix::Zero(n, n)) {}

  static LinkTopology complete(std::size_t n);
  // Throws ConfigError unless `adj` is square, symmetric, 0/1 with zero diagonal.
  static LinkTopology from_matrix(const BinaryMatrix& adj);

  std::size_t size() const { return static_cast<std::size_t>(adj_.rows()); }
  bool has_link(std::size_t i, std::size_t j) const { return adj_(i, j) != 0; }
  std::size_t degree(std::size_t i) const;
  std::size_t link_count() const;
  std::vector<std::size_t> neighbors(std::size_t i) const;
  const BinaryMatrix& adjacency() const { return adj_; }

  LinkTopology with_link(std::size_t i, std::size_t j, bool present) const;

  friend bool operator==(const LinkTopology& a, const LinkTopology& b) {
    return a.adj_ == b.adj_;
  }

 private:
  BinaryMatrix adj_;
};

// L = ∇ - A.
template <typename Scalar = double>
MatrixT<Scalar> laplacian(const LinkTopology& topo) {
  const auto n = static_cast<Eigen::Index>(topo.size());
  MatrixT<Scalar> lap = -topo.adjacency().template cast<Scalar>();
  for (Eigen::Index i = 0; i < n; ++i) lap(i, i) = -lap.row(i).sum();
  return lap;
}

// λ2 of the Laplacian via a dense symmetric eigensolve.
double algebraic_connectivity(const LinkTopology& topo);

// Breadth-first reachability from node 0.
bool is_connected(const LinkTopology& topo);

inline constexpr double kConnectivityTolerance = 1e-6;

struct SpectralReport {
  Vector degree;
  double lambda2 = 0.0;
  bool connected = false;       // BFS verdict
  bool spectral_agrees = true;  // (lambda2 > tol) == connected
};

SpectralReport spectral_report(const LinkTopology& topo);

struct GuardedRemoval {
  LinkTopology topology;
  bool accepted = false;
};

// Removes (i, j) only if the graph stays connected; otherwise returns the input.
GuardedRemoval guarded_remove(const LinkTopology& topo, std::size_t i, std::size_t j);

// c_im: user m served by UAV i.
struct Association {
  BinaryMatrix served;  // N x M

  Association() = default;
  Association(std::size_t n_uavs, std::size_t n_users)
      : served(BinaryMatrix::Zero(n_uavs, n_users)) {}

  std::size_t n_uavs() const { return static_cast<std::size_t>(served.rows()); }
  std::size_t n_users() const { return static_cast<std::size_t>(served.cols()); }
  bool serves(std::size_t i, std::size_t m) const { return served(i, m) != 0; }
  std::size_t load(std::size_t i) const;

  friend bool operator==(const Association& a, const Association& b) {
    return a.served == b.served;
  }
};

}  // namespace uavnet
