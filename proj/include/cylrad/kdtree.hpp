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

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace cylrad {

/// Static kd-tree over the first `dims` (2 or 3) coordinates of a point set.
class KdTree {
 public:
  KdTree(std::span<const Eigen::Vector3d> points, int dims);

  /// Squared distance from `q` to the nearest stored point.
  double nearest_squared(const Eigen::Vector3d& q) const;

 private:
  struct Node {
    int begin = 0;
    int end = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(int begin, int end, int depth);
  void search(int node, const Eigen::Vector3d& q, double& best) const;
  double dist2(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const;

  std::vector<Eigen::Vector3d> pts_;
  std::vector<Node> nodes_;
  int dims_;
};

}  // namespace cylrad
