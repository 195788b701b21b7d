#pragma once

// Exact k-nearest-neighbor search over known points (Euclidean, 3-D).
//
// The index is a k-d tree built once and then only read, so one instance can
// serve queries from many threads. Results are ordered by (distance, index),
// which makes them identical to a brute-force sort with index tie-break.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "gravinterp/errors.hpp"
#include "gravinterp/point.hpp"

namespace gravinterp {

/// The n nearest known points to one query, closest first.
struct NeighborSet {
  std::vector<std::size_t> indices;
  std::vector<double> distances;
  /// Distance to the n-th nearest neighbor.
  double delta = 0.0;

  std::size_t size() const { return indices.size(); }
};

class SpatialIndex {
 public:
  explicit SpatialIndex(std::span<const CartesianPoint> points, std::size_t leaf_size = 8)
      : points_(points.begin(), points.end()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    if (points_.empty()) throw ArgumentError("spatial index requires at least one point");
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
    build(0, points_.size());
  }

  std::size_t size() const { return points_.size(); }
  const CartesianPoint& point(std::size_t i) const { return points_[i]; }

  /// Exact n nearest neighbors of `query`; ties broken by ascending index.
  NeighborSet k_nearest(const CartesianPoint& query, std::size_t n) const {
    if (n < 1 || n > points_.size())
      throw ArgumentError("k_nearest: n=" + std::to_string(n) + " outside [1, " +
                          std::to_string(points_.size()) + "]");
    std::vector<Candidate> heap;
    heap.reserve(n + 1);
    search(0, query, n, heap);
    std::sort_heap(heap.begin(), heap.end());

    NeighborSet out;
    out.indices.reserve(n);
    out.distances.reserve(n);
    for (const auto& c : heap) {
      out.indices.push_back(c.index);
      out.distances.push_back(std::sqrt(c.d2));
    }
    out.delta = out.distances.back();
    return out;
  }

 private:
  struct Candidate {
    double d2;
    std::size_t index;
    friend bool operator<(const Candidate& a, const Candidate& b) {
      return a.d2 < b.d2 || (a.d2 == b.d2 && a.index < b.index);
    }
  };

  struct Node {
    // Leaf: [begin, end) into order_. Inner: split plane plus children.
    std::size_t begin = 0;
    std::size_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    int axis = -1;
    double split = 0.0;
  };

  static double coord(const CartesianPoint& p, int axis) {
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
  }

  std::uint32_t build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size_) return id;

    std::array<double, 3> lo{}, hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
      const auto& p = points_[order_[i]];
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], coord(p, a));
        hi[a] = std::max(hi[a], coord(p, a));
      }
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a)
      if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
    if (hi[axis] == lo[axis]) return id;  // all coincident: keep as leaf

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                       return coord(points_[a], axis) < coord(points_[b], axis);
                     });
    const double split = coord(points_[order_[mid]], axis);
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    auto& node = nodes_[id];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  void search(std::uint32_t id, const CartesianPoint& q, std::size_t n,
              std::vector<Candidate>& heap) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const Candidate c{squared_distance(q, points_[order_[i]]), order_[i]};
        if (heap.size() < n) {
          heap.push_back(c);
          std::push_heap(heap.begin(), heap.end());
        } else if (c < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = c;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    const double diff = coord(q, node.axis) - node.split;
    const auto near = diff < 0.0 ? node.left : node.right;
    const auto far = diff < 0.0 ? node.right : node.left;
    search(near, q, n, heap);
    // Points on the far side are at least |diff| away. Equality must still be
    // visited: a tie there may carry a smaller index.
    if (heap.size() < n || diff * diff <= heap.front().d2) search(far, q, n, heap);
  }

  std::vector<CartesianPoint> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

inline SpatialIndex build_index(std::span<const CartesianPoint> points) {
  return SpatialIndex(points);
}

inline NeighborSet k_nearest(const SpatialIndex& index, const CartesianPoint& query, std::size_t n) {
  return index.k_nearest(query, n);
}

/// Max over queries of the distance to the nearest known point.
inline double fill_distance(const SpatialIndex& known, std::span<const CartesianPoint> queries) {
  if (queries.empty()) throw ArgumentError("fill_distance requires at least one query point");
  double ell = 0.0;
  for (const auto& q : queries) ell = std::max(ell, known.k_nearest(q, 1).delta);
  return ell;
}

}  // namespace gravinterp
