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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cylrad/ego_motion.hpp"
#include "cylrad/imaging.hpp"
#include "cylrad/motion_estimate.hpp"
#include "cylrad/pointcloud.hpp"
#include "cylrad/scenario.hpp"

namespace cylrad {

struct CloudMetrics {
  double chamfer_2d_m = 0.0;
  double chamfer_3d_m = 0.0;
  double mhd_2d_m = 0.0;
  double mhd_3d_m = 0.0;
  std::size_t points = 0;
};

struct PipelineResult {
  RawCube cube;
  MotionEstimate estimated_motion;
  /// Motion used for imaging: the estimate, or stationary when compensation is off.
  MotionEstimate imaging_motion;
  Heatmap3D heatmap;
  std::vector<Detection> detections;
  PointCloud cloud;
  PointCloud truth;
  std::vector<Cluster> clusters;
  CloudMetrics metrics;
};

/// Reflector positions of the scenario at t = 0, intensity = amplitude.
PointCloud truth_cloud(const Scenario& s);

/// Chamfer and modified Hausdorff distances in 2D and 3D.
CloudMetrics evaluate_cloud(const PointCloud& pred, const PointCloud& truth);

/// Motion-estimation parameters used by the pipeline (RANSAC seeded from the scenario).
MotionPipelineParams pipeline_motion_params(const Scenario& s);

Heatmap3D form_image(const RawCube& cube, const Scenario& s, const MotionEstimate& motion);

/**
 * simulate -> estimate motion -> beamform with the estimate -> CFAR ->
 * metrics against the reflector truth. Errors are re-thrown with the stage
 * name prefixed ("motion: ...").
 */
PipelineResult run_pipeline(const Scenario& s);

/// Structured `key = value` report; contains no timing, so it is reproducible.
void write_report(std::ostream& os, const PipelineResult& r);

struct SweepRow {
  double dv_m_s = 0.0;
  double dtheta_rad = 0.0;
  CloudMetrics metrics;
};

/// Re-images the pipeline's cube with the estimated motion perturbed by every
/// (dv, dtheta) pair and scores each resulting cloud.
std::vector<SweepRow> sweep_motion_error(const Scenario& s, const PipelineResult& base,
                                         std::span<const double> dv_m_s,
                                         std::span<const double> dtheta_rad);

/// Header `dv_m_s,dtheta_rad,chamfer_2d,chamfer_3d,mhd_2d,mhd_3d,num_points`.
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

/// FNV-1a over heatmap magnitudes and point coordinates; pins outputs in reports.
unsigned long long heatmap_checksum(const Heatmap3D& heat);
unsigned long long cloud_checksum(const PointCloud& cloud);

}  // namespace cylrad
