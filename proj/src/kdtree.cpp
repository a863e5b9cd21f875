// Copyright 2026 The cylrad Authors
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

#include "cylrad/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "cylrad/errors.hpp"

namespace cylrad {

namespace {
constexpr int kLeafSize = 8;
}

KdTree::KdTree(std::span<const Eigen::Vector3d> points, int dims)
    : pts_(points.begin(), points.end()), dims_(dims) {
  if (dims != 2 && dims != 3) throw InputError("kd-tree supports 2 or 3 dimensions");
  if (pts_.empty()) throw InputError("kd-tree needs at least one point");
  nodes_.reserve(2 * pts_.size() / kLeafSize + 1);
  build(0, static_cast<int>(pts_.size()), 0);
}

int KdTree::build(int begin, int end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  // Split on the axis of largest spread.
  Eigen::Vector3d lo = pts_[begin], hi = pts_[begin];
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(pts_[i]);
    hi = hi.cwiseMax(pts_[i]);
  }
  int axis = 0;
  for (int d = 1; d < dims_; ++d) {
    if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
  }
  if (hi[axis] == lo[axis]) return id;  // all points coincide

  const int mid = begin + (end - begin) / 2;
  std::nth_element(pts_.begin() + begin, pts_.begin() + mid, pts_.begin() + end,
                   [axis](const auto& a, const auto& b) { return a[axis] < b[axis]; });
  nodes_[id].axis = axis;
  nodes_[id].split = pts_[mid][axis];
  const int l = build(begin, mid, depth + 1);
  const int r = build(mid, end, depth + 1);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

double KdTree::dist2(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
  double s = 0.0;
  for (int d = 0; d < dims_; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

void KdTree::search(int id, const Eigen::Vector3d& q, double& best) const {
  const Node& n = nodes_[id];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i) best = std::min(best, dist2(pts_[i], q));
    return;
  }
  const double diff = q[n.axis] - n.split;
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  search(near, q, best);
  if (diff * diff < best) search(far, q, best);
}

double KdTree::nearest_squared(const Eigen::Vector3d& q) const {
  double best = std::numeric_limits<double>::infinity();
  search(0, q, best);
  return best;
}

}  // namespace cylrad
