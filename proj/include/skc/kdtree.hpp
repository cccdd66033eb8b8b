// Copyright 2026 The skc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "skc/errors.hpp"

namespace skc {

/// Static kd-tree over fixed-dimension real vectors with exact Euclidean
/// queries.  The point storage is not owned; it must outlive the tree.
/// Ties in distance are broken towards the smaller point index, so query
/// results match a deterministic linear scan.
class KdTree {
 public:
  struct Hit {
    std::uint32_t index = 0;
    double dist2 = std::numeric_limits<double>::infinity();
  };

  KdTree(const double* points, std::size_t count, int dim)
      : pts_(points), n_(count), dim_(dim) {
    if (count == 0) throw UsageError("KdTree: empty point set");
    order_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) order_[i] = static_cast<std::uint32_t>(i);
    nodes_.reserve(2 * n_ / kLeafSize + 2);
    root_ = build(0, n_);
  }

  Hit nearest(const double* q) const {
    Hit best;
    search(root_, q, 1, &best, nullptr);
    return best;
  }

  /// k nearest points, sorted by (distance, index).
  std::vector<Hit> k_nearest(const double* q, std::size_t k) const {
    if (k == 0) return {};
    std::vector<Hit> heap;
    heap.reserve(k + 1);
    Hit bound;
    KnnState st{&heap, k, &bound};
    search(root_, q, k, &bound, &st);
    std::sort(heap.begin(), heap.end(), hit_less);
    return heap;
  }

  /// All points within Euclidean distance r of q, as sorted indices.
  std::vector<std::uint32_t> radius_search(const double* q, double r) const {
    std::vector<std::uint32_t> out;
    radius(root_, q, r * r, &out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kLeafSize = 16;

  struct Node {
    int split_dim = -1;       // -1 marks a leaf
    double split_value = 0.0;
    std::int32_t left = -1, right = -1;
    std::uint32_t begin = 0, end = 0;  // range into order_ (leaves)
  };

  struct KnnState {
    std::vector<Hit>* heap;
    std::size_t k;
    Hit* bound;
  };

  static bool hit_less(const Hit& a, const Hit& b) {
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    return a.index < b.index;
  }

  const double* coord(std::uint32_t idx) const { return pts_ + std::size_t(idx) * dim_; }

  std::int32_t build(std::size_t begin, std::size_t end) {
    Node node;
    if (end - begin <= kLeafSize) {
      node.begin = static_cast<std::uint32_t>(begin);
      node.end = static_cast<std::uint32_t>(end);
      nodes_.push_back(node);
      return static_cast<std::int32_t>(nodes_.size() - 1);
    }
    // Split along the widest spread within this range.
    int best_dim = 0;
    double best_spread = -1.0;
    for (int d = 0; d < dim_; ++d) {
      double lo = coord(order_[begin])[d], hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = coord(order_[i])[d];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = d;
      }
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double va = coord(a)[best_dim];
                       const double vb = coord(b)[best_dim];
                       if (va != vb) return va < vb;
                       return a < b;
                     });
    node.split_dim = best_dim;
    node.split_value = coord(order_[mid])[best_dim];
    nodes_.push_back(node);
    const auto id = static_cast<std::int32_t>(nodes_.size() - 1);
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  double dist2(const double* q, std::uint32_t idx) const {
    const double* p = coord(idx);
    double acc = 0.0;
    for (int d = 0; d < dim_; ++d) {
      const double diff = q[d] - p[d];
      acc += diff * diff;
    }
    return acc;
  }

  void consider(const Hit& cand, std::size_t k, Hit* bound, KnnState* st) const {
    if (st == nullptr) {
      if (hit_less(cand, *bound)) *bound = cand;
      return;
    }
    auto& heap = *st->heap;
    if (heap.size() < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end(), hit_less);
    } else if (hit_less(cand, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), hit_less);
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end(), hit_less);
    }
    if (heap.size() == k) *bound = heap.front();
  }

  void search(std::int32_t node_id, const double* q, std::size_t k, Hit* bound,
              KnnState* st) const {
    const Node& node = nodes_[node_id];
    if (node.split_dim < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        consider(Hit{order_[i], dist2(q, order_[i])}, k, bound, st);
      }
      return;
    }
    const double delta = q[node.split_dim] - node.split_value;
    const std::int32_t near = delta < 0.0 ? node.left : node.right;
    const std::int32_t far = delta < 0.0 ? node.right : node.left;
    search(near, q, k, bound, st);
    if (delta * delta <= bound->dist2) {
      search(far, q, k, bound, st);
    }
  }

  void radius(std::int32_t node_id, const double* q, double r2,
              std::vector<std::uint32_t>* out) const {
    const Node& node = nodes_[node_id];
    if (node.split_dim < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        if (dist2(q, order_[i]) <= r2) out->push_back(order_[i]);
      }
      return;
    }
    const double delta = q[node.split_dim] - node.split_value;
    const std::int32_t near = delta < 0.0 ? node.left : node.right;
    const std::int32_t far = delta < 0.0 ? node.right : node.left;
    radius(near, q, r2, out);
    if (delta * delta <= r2) radius(far, q, r2, out);
  }

  const double* pts_;
  std::size_t n_;
  int dim_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace skc
