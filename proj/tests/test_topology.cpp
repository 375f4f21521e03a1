#include "uavnet/errors.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/topology.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <vector>

using namespace uavnet;

namespace {

std::vector<std::pair<std::size_t, std::size_t>> pairs_of(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

LinkTopology from_mask(std::size_t n, unsigned mask) {
  LinkTopology t(n);
  const auto pairs = pairs_of(n);
  for (std::size_t e = 0; e < pairs.size(); ++e)
    if (mask & (1u << e)) t = t.with_link(pairs[e].first, pairs[e].second, true);
  return t;
}

// Oracle independent of the library's solver: general (non-symmetric) eigensolve.
double lambda2_oracle(const LinkTopology& t) {
  Eigen::EigenSolver<Matrix> es(laplacian(t));
  std::vector<double> ev;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) ev.push_back(es.eigenvalues()(k).real());
  std::sort(ev.begin(), ev.end());
  return ev[1];
}

// Union-find reachability, independent of the BFS under test.
bool connected_oracle(const LinkTopology& t) {
  std::vector<std::size_t> parent(t.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [i, j] : pairs_of(t.size()))
    if (t.has_link(i, j)) parent[find(i)] = find(j);
  for (std::size_t i = 1; i < t.size(); ++i)
    if (find(i) != find(0)) return false;
  return true;
}

LinkTopology random_graph(std::size_t n, double p, Rng& rng) {
  LinkTopology t(n);
  for (auto [i, j] : pairs_of(n))
    if (rng.bernoulli(p)) t = t.with_link(i, j, true);
  return t;
}

}  // namespace

TEST_CASE("Laplacian") {
  CHECK(laplacian(LinkTopology(3)).isZero());
  Matrix k2(2, 2);
  k2 << 1, -1, -1, 1;
  CHECK(laplacian(LinkTopology::complete(2)) == k2);
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const Matrix l = laplacian(random_graph(7, 0.4, rng));
    CHECK(l.rowwise().sum().isZero());
    CHECK(l == l.transpose());
  }
}

TEST_CASE("algebraic connectivity") {
  for (std::size_t n = 2; n <= 6; ++n) {
    CHECK(algebraic_connectivity(LinkTopology::complete(n)) == doctest::Approx(double(n)).epsilon(1e-9));
    CHECK(lambda2_oracle(LinkTopology::complete(n)) == doctest::Approx(double(n)).epsilon(1e-9));
  }
  const LinkTopology p3 = LinkTopology(3).with_link(0, 1, true).with_link(1, 2, true);
  CHECK(algebraic_connectivity(p3) == doctest::Approx(1.0).epsilon(1e-9));
  const LinkTopology split = LinkTopology(4).with_link(0, 1, true).with_link(2, 3, true);
  CHECK(algebraic_connectivity(split) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("BFS and spectral verdicts agree on every graph with five nodes") {
  std::size_t agree = 0;
  for (unsigned mask = 0; mask < 1024; ++mask) {
    const LinkTopology t = from_mask(5, mask);
    const SpectralReport r = spectral_report(t);
    CHECK(r.connected == connected_oracle(t));
    CHECK(r.lambda2 == doctest::Approx(lambda2_oracle(t)).epsilon(1e-9));
    CHECK(r.lambda2 >= -1e-12);
    if (r.spectral_agrees && ((r.lambda2 > kConnectivityTolerance) == is_connected(t))) ++agree;
    if (r.connected) CHECK(t.link_count() >= 4);
  }
  CHECK(agree == 1024);
}

TEST_CASE("38 connected graphs on four labelled nodes") {
  std::size_t connected = 0;
  for (unsigned mask = 0; mask < 64; ++mask) connected += is_connected(from_mask(4, mask));
  CHECK(connected == 38);
}

TEST_CASE("guarded removal") {
  const LinkTopology path = LinkTopology(3).with_link(0, 1, true).with_link(1, 2, true);
  const GuardedRemoval bridge = guarded_remove(path, 0, 1);
  CHECK_FALSE(bridge.accepted);
  CHECK(bridge.topology == path);

  const LinkTopology cycle = path.with_link(0, 2, true);
  const GuardedRemoval chord = guarded_remove(cycle, 0, 2);
  CHECK(chord.accepted);
  CHECK(chord.topology == path);

  const LinkTopology k4 = LinkTopology::complete(4);
  for (auto [i, j] : pairs_of(4)) {
    const GuardedRemoval r = guarded_remove(k4, i, j);
    CHECK(r.accepted);
    CHECK(r.topology.link_count() == 5);
  }

  const GuardedRemoval missing = guarded_remove(path, 0, 2);
  CHECK_FALSE(missing.accepted);
  CHECK(missing.topology == path);
}

TEST_CASE("guarded removal preserves connectivity and λ2 never grows") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    LinkTopology t = LinkTopology::complete(7);
    double lambda = algebraic_connectivity(t);
    for (int step = 0; step < 40; ++step) {
      const std::size_t i = rng.index(7), j = rng.index(7);
      if (i == j || !t.has_link(i, j)) continue;
      const GuardedRemoval r = guarded_remove(t, i, j);
      t = r.topology;
      CHECK(is_connected(t));
      CHECK(t.adjacency() == t.adjacency().transpose());
      CHECK(t.adjacency().diagonal().isZero());
      const double next = algebraic_connectivity(t);
      CHECK(next <= lambda + 1e-9);
      lambda = next;
    }
  }
}

TEST_CASE("from_matrix validates the adjacency") {
  BinaryMatrix a = BinaryMatrix::Zero(3, 3);
  a(0, 1) = 1;
  CHECK_THROWS_AS(LinkTopology::from_matrix(a), ConfigError);
  a(1, 0) = 1;
  CHECK(LinkTopology::from_matrix(a).link_count() == 1);
  a(2, 2) = 1;
  CHECK_THROWS_AS(LinkTopology::from_matrix(a), ConfigError);
}
