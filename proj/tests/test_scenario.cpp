#include "uavnet/errors.hpp"
#include "uavnet/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

using namespace uavnet;

namespace {

WorldState small_world() {
  WorldState w;
  w.area = {1000.0, 1000.0};
  w.altitude_band = {100.0, 300.0};
  w.slot_length = 1.0;
  for (std::size_t i = 0; i < 2; ++i) {
    UavState u;
    u.id = i;
    u.position = {100.0 + 200.0 * static_cast<double>(i), 100.0, 150.0};
    u.tx_power = 1.0;
    w.uavs.push_back(u);
  }
  w.users.push_back({0, {500.0, 500.0, 0.0}});
  return w;
}

// Independent oracle: sample the open segment densely and test box membership.
bool sampled_hit(const Vec3& a, const Vec3& b, const Obstacle& box) {
  const Vec3 lo = box.min_corner(), hi = box.max_corner();
  for (int k = 1; k < 20000; ++k) {
    const Vec3 p = a + (b - a) * (k / 20000.0);
    if ((p.array() > lo.array()).all() && (p.array() < hi.array()).all()) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("distance examples") {
  CHECK(distance<double>(Vec3(0, 0, 0), Vec3(0, 0, 0)) == 0.0);
  CHECK(distance<double>(Vec3(0, 0, 100), Vec3(300, 400, 100)) == doctest::Approx(500.0));
  CHECK(distance<double>(Vec3(1, 2, 3), Vec3(4, 6, 3)) == doctest::Approx(5.0));
}

TEST_CASE("distance is symmetric and obeys the triangle inequality") {
  Rng rng(7);
  for (int t = 0; t < 500; ++t) {
    Vec3 a, b, c;
    for (int k = 0; k < 3; ++k) {
      a[k] = rng.uniform(-1e3, 1e3);
      b[k] = rng.uniform(-1e3, 1e3);
      c[k] = rng.uniform(-1e3, 1e3);
    }
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9);
  }
}

TEST_CASE("line of sight") {
  const std::vector<Obstacle> none;
  CHECK(los_between({0, 0, 200}, {100, 0, 200}, none) == 1);

  const Obstacle tower{50.0, 0.0, 10.0, 10.0, 300.0};
  const std::vector<Obstacle> one{tower};
  CHECK(los_between({0, 0, 200}, {100, 0, 200}, one) == 0);
  CHECK(sampled_hit({0, 0, 200}, {100, 0, 200}, tower));

  const Obstacle low{50.0, 0.0, 10.0, 10.0, 100.0};
  CHECK(los_between({0, 0, 200}, {100, 0, 200}, std::vector<Obstacle>{low}) == 1);
}

TEST_CASE("segment test agrees with dense sampling, is symmetric and monotone") {
  Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    Obstacle box{rng.uniform(200, 800), rng.uniform(200, 800), rng.uniform(20, 200),
                 rng.uniform(20, 200), rng.uniform(20, 250)};
    const Vec3 a(rng.uniform(0, 1000), rng.uniform(0, 1000), rng.uniform(0, 300));
    const Vec3 b(rng.uniform(0, 1000), rng.uniform(0, 1000), rng.uniform(0, 300));
    const bool hit = segment_hits_obstacle(a, b, box);
    CHECK(hit == segment_hits_obstacle(b, a, box));
    // Sampling can only miss grazing hits, never invent one.
    if (sampled_hit(a, b, box)) CHECK(hit);

    const Obstacle other{rng.uniform(0, 1000), rng.uniform(0, 1000), 50, 50, 100};
    const std::vector<Obstacle> both{box, other};
    const std::vector<Obstacle> fewer{other};
    if (los_between(a, b, both) == 1) CHECK(los_between(a, b, fewer) == 1);
  }
}

TEST_CASE("elevation angle") {
  CHECK(elevation_angle({5, 5, 100}, {5, 5, 0}) == 90.0);
  CHECK(elevation_angle({100, 0, 100}, {0, 0, 0}) == doctest::Approx(45.0));
  CHECK(elevation_angle({0, 173.205, 100}, {0, 0, 0}) == doctest::Approx(30.0).epsilon(1e-5));
}

TEST_CASE("mobility: velocity first, then position") {
  WorldState w = small_world();
  w.uavs[0].position = {0, 0, 100};
  w.uavs[0].velocity = {1, 2, 0};
  std::vector<Vec3> acc(2, Vec3::Zero());
  WorldState next = step_mobility(w, acc);
  CHECK(next.uavs[0].position.isApprox(Vec3(1, 2, 100)));
  CHECK(next.uavs[1].position == w.uavs[1].position);
  CHECK(next.slot == 1);

  w.uavs[0].velocity = Vec3::Zero();
  acc[0] = {2, 0, 0};
  next = step_mobility(w, acc);
  CHECK(next.uavs[0].velocity.isApprox(Vec3(2, 0, 0)));
  CHECK(next.uavs[0].position.isApprox(Vec3(2, 0, 100)));
}

TEST_CASE("mobility keeps every UAV inside the flight region") {
  Rng rng(3);
  WorldState w = small_world();
  for (int t = 0; t < 200; ++t) {
    std::vector<Vec3> acc;
    for (std::size_t i = 0; i < w.n_uavs(); ++i)
      acc.emplace_back(rng.uniform(-300, 300), rng.uniform(-300, 300), rng.uniform(-300, 300));
    w = step_mobility(w, acc);
    for (const auto& u : w.uavs) CHECK(w.in_flight_region(u.position));
  }
}

TEST_CASE("scripted user waypoint applies at its slot") {
  WorldState w = small_world();
  w.user_script.push_back({2, 0, {10.0, 20.0, 0.0}});
  std::vector<Vec3> acc(2, Vec3::Zero());
  w = step_mobility(w, acc);
  CHECK(w.users[0].position.isApprox(Vec3(500, 500, 0)));
  w = step_mobility(w, acc);
  CHECK(w.users[0].position.isApprox(Vec3(10, 20, 0)));
}

TEST_CASE("k-means examples") {
  const std::vector<GroundUser> two{{0, {0, 0, 0}}, {1, {2, 0, 0}}};
  const auto c = kmeans_init(two, 1, 1, {100.0, 300.0});
  REQUIRE(c.size() == 1);
  CHECK(c[0].isApprox(Vec3(1, 0, 200)));

  const std::vector<GroundUser> square{
      {0, {0, 0, 0}}, {1, {10, 0, 0}}, {2, {0, 10, 0}}, {3, {10, 10, 0}}};
  auto corners = kmeans_init(square, 4, 5, {100.0, 300.0});
  std::sort(corners.begin(), corners.end(), [](const Vec3& a, const Vec3& b) {
    return std::tie(a.x(), a.y()) < std::tie(b.x(), b.y());
  });
  const std::vector<Vec3> expected{{0, 0, 200}, {0, 10, 200}, {10, 0, 200}, {10, 10, 200}};
  for (std::size_t k = 0; k < 4; ++k) CHECK(corners[k].isApprox(expected[k]));

  const std::vector<GroundUser> dup{{0, {5, 5, 0}}, {1, {5, 5, 0}}};
  CHECK_THROWS_AS(kmeans_init(dup, 2, 1, {100.0, 300.0}), DuplicateCentroidError);
}

TEST_CASE("k-means cost never increases and is reproducible") {
  Rng rng(19);
  std::vector<GroundUser> users;
  for (std::size_t m = 0; m < 20; ++m)
    users.push_back({m, {rng.uniform(0, 10000), rng.uniform(0, 10000), 0.0}});
  const auto r = kmeans_cluster(users, 10, 42, 200.0);
  REQUIRE(!r.cost_history.empty());
  for (std::size_t k = 1; k < r.cost_history.size(); ++k)
    CHECK(r.cost_history[k] <= r.cost_history[k - 1]);

  // Recompute the final cost from the assignment.
  double cost = 0.0;
  for (std::size_t m = 0; m < users.size(); ++m) {
    const Vec3& c = r.centroids[r.assignment[m]];
    cost += std::pow(users[m].position.x() - c.x(), 2) + std::pow(users[m].position.y() - c.y(), 2);
  }
  CHECK(cost == doctest::Approx(r.cost_history.back()));

  const auto again = kmeans_cluster(users, 10, 42, 200.0);
  for (std::size_t k = 0; k < 10; ++k) CHECK(again.centroids[k] == r.centroids[k]);
}

TEST_CASE("world validation") {
  WorldState w = small_world();
  CHECK_NOTHROW(validate_world(w));
  w.uavs[0].position.z() = 50.0;
  CHECK_THROWS_AS(validate_world(w), ConfigError);
  w = small_world();
  w.users.clear();
  CHECK_THROWS_AS(validate_world(w), ConfigError);
  w = small_world();
  w.uavs.pop_back();
  CHECK_THROWS_AS(validate_world(w), ConfigError);
}
