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

#include <string>

#include <Eigen/Core>

namespace cylrad {

/// Planar platform velocity recovered from one rotation of data.
struct MotionEstimate {
  double speed_m_s = 0.0;
  double heading_rad = 0.0;
  int inlier_count = 0;
  double residual_rms_hz = 0.0;
  /// Speed below the observability floor; heading carried over.
  bool degenerate = false;
  /// Inlier ratio fell below the configured floor.
  bool low_confidence = false;

  static MotionEstimate stationary() { return {}; }
  static MotionEstimate from_velocity(double speed_m_s, double heading_rad);

  Eigen::Vector3d velocity() const;
};

/// Single-line `key=value` record.
std::string format_motion_record(const MotionEstimate& m);
MotionEstimate parse_motion_record(const std::string& line);

}  // namespace cylrad
