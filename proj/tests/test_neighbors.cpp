#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "gravinterp/neighbors.hpp"
#include "oracles.hpp"

using namespace gravinterp;

namespace {

void expect_matches_brute(const SpatialIndex& index, const std::vector<CartesianPoint>& pts,
                          const CartesianPoint& q, std::size_t k) {
  const auto got = index.k_nearest(q, k);
  const auto want = oracle::brute_knn(pts, q, k);
  ASSERT_EQ(got.size(), k);
  for (std::size_t i = 0; i < k; ++i) {
    EXPECT_EQ(got.indices[i], want[i].second) << "rank " << i;
    EXPECT_EQ(got.distances[i], want[i].first) << "rank " << i;
  }
  EXPECT_EQ(got.delta, want.back().first);
}

/// Points on an integer lattice produce many exact distance ties.
std::vector<CartesianPoint> lattice_cloud(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> u(-5, 5);
  std::vector<CartesianPoint> out(n);
  for (auto& p : out) p = {double(u(rng)), double(u(rng)), double(u(rng))};
  return out;
}

}  // namespace

TEST(SpatialIndex, Singleton) {
  const std::vector<CartesianPoint> pts{{1, 2, 3}};
  const SpatialIndex index(pts);
  const auto nb = index.k_nearest({10, -4, 2}, 1);
  EXPECT_EQ(nb.indices, std::vector<std::size_t>{0});
  EXPECT_DOUBLE_EQ(nb.delta, distance({10, -4, 2}, {1, 2, 3}));
}

TEST(SpatialIndex, EmptyIsError) {
  EXPECT_THROW(SpatialIndex(std::vector<CartesianPoint>{}), ArgumentError);
}

TEST(SpatialIndex, RandomCloudMatchesBruteForce) {
  std::mt19937_64 rng(1);
  const auto pts = oracle::random_cloud(rng, 1000, 1e5);
  const SpatialIndex index(pts);
  for (const auto& q : oracle::random_cloud(rng, 50, 1.2e5)) expect_matches_brute(index, pts, q, 20);
}

TEST(SpatialIndex, DuplicatesReturnedBeforeFartherPoints) {
  const std::vector<CartesianPoint> pts{{5, 0, 0}, {1, 0, 0}, {3, 0, 0}, {1, 0, 0}};
  const SpatialIndex index(pts);
  const auto nb = index.k_nearest({0, 0, 0}, 3);
  EXPECT_EQ(nb.indices, (std::vector<std::size_t>{1, 3, 2}));
}

TEST(SpatialIndex, CoincidentQueryComesFirst) {
  std::mt19937_64 rng(2);
  const auto pts = oracle::random_cloud(rng, 200, 10.0);
  const SpatialIndex index(pts);
  const auto nb = index.k_nearest(pts[57], 5);
  EXPECT_EQ(nb.indices.front(), 57u);
  EXPECT_EQ(nb.distances.front(), 0.0);
}

TEST(SpatialIndex, AllPointsWhenNEqualsCount) {
  std::mt19937_64 rng(3);
  const auto pts = oracle::random_cloud(rng, 37, 10.0);
  const SpatialIndex index(pts);
  expect_matches_brute(index, pts, {0.5, 0.5, 0.5}, 37);
  EXPECT_THROW(index.k_nearest({0, 0, 0}, 38), ArgumentError);
  EXPECT_THROW(index.k_nearest({0, 0, 0}, 0), ArgumentError);
}

TEST(SpatialIndex, TieOrderMatchesBruteForce) {
  std::mt19937_64 rng(4);
  const auto pts = lattice_cloud(rng, 500);
  const SpatialIndex index(pts);
  for (const auto& q : lattice_cloud(rng, 40)) expect_matches_brute(index, pts, q, 10);
}

TEST(SpatialIndex, OracleEquivalenceAcrossK) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> size(121, 2000);
  for (int instance = 0; instance < 10; ++instance) {
    const auto pts = instance % 2 ? lattice_cloud(rng, size(rng)) : oracle::random_cloud(rng, size(rng), 1.0);
    const SpatialIndex index(pts);
    for (const std::size_t k : {1u, 4u, 10u, 20u, 121u})
      for (const auto& q : oracle::random_cloud(rng, 5, 5.0)) expect_matches_brute(index, pts, q, k);
  }
}

TEST(SpatialIndex, DeltaIsMonotoneInN) {
  std::mt19937_64 rng(6);
  const auto pts = oracle::random_cloud(rng, 300, 1.0);
  const SpatialIndex index(pts);
  const CartesianPoint q{0.1, -0.2, 0.3};
  double prev = 0.0;
  for (std::size_t n = 1; n <= 300; ++n) {
    const auto nb = index.k_nearest(q, n);
    EXPECT_GE(nb.delta, prev);
    prev = nb.delta;
    for (std::size_t i = 1; i < nb.size(); ++i) EXPECT_LE(nb.distances[i - 1], nb.distances[i]);
  }
}

TEST(SpatialIndex, ConcurrentQueriesAreDeterministic) {
  std::mt19937_64 rng(7);
  const auto pts = oracle::random_cloud(rng, 2000, 1.0);
  const auto queries = oracle::random_cloud(rng, 200, 1.0);
  const SpatialIndex index(pts);
  std::vector<NeighborSet> serial;
  for (const auto& q : queries) serial.push_back(index.k_nearest(q, 20));

  std::vector<std::vector<NeighborSet>> per_thread(4, std::vector<NeighborSet>(queries.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < 4; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = 0; i < queries.size(); ++i) per_thread[t][i] = index.k_nearest(queries[i], 20);
      });
  }
  for (const auto& run : per_thread)
    for (std::size_t i = 0; i < queries.size(); ++i) {
      EXPECT_EQ(run[i].indices, serial[i].indices);
      EXPECT_EQ(run[i].distances, serial[i].distances);
    }
}

TEST(FillDistance, MaxOfNearest) {
  const std::vector<CartesianPoint> known{{0, 0, 0}};
  const std::vector<CartesianPoint> queries{{3, 0, 0}, {0, 4, 0}};
  EXPECT_EQ(fill_distance(SpatialIndex(known), queries), 4.0);
}

TEST(FillDistance, CoincidentQueriesGiveZero) {
  std::mt19937_64 rng(8);
  const auto pts = oracle::random_cloud(rng, 30, 1.0);
  const std::vector<CartesianPoint> queries(pts.begin(), pts.begin() + 10);
  EXPECT_EQ(fill_distance(SpatialIndex(pts), queries), 0.0);
}

TEST(FillDistance, MatchesDoubleLoop) {
  std::mt19937_64 rng(9);
  const auto known = oracle::random_cloud(rng, 200, 1.0);
  const auto queries = oracle::random_cloud(rng, 50, 1.0);
  EXPECT_EQ(fill_distance(SpatialIndex(known), queries), oracle::brute_fill_distance(known, queries));
  EXPECT_THROW(fill_distance(SpatialIndex(known), std::vector<CartesianPoint>{}), ArgumentError);
}
