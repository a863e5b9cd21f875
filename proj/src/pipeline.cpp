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

#include "cylrad/pipeline.hpp"

#include <cstdio>
#include <ostream>

#include "cylrad/errors.hpp"
#include "cylrad/text_format.hpp"

namespace cylrad {

namespace {

// Stream id for the RANSAC seed, kept apart from the per-chirp noise streams.
constexpr std::uint64_t kRansacStream = 0x52414e5341430000ULL;

template <typename F>
auto staged(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(std::string(stage) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(stage) + ": " + e.what());
  }
}

std::string hex(unsigned long long v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", v);
  return buf;
}

}  // namespace

PointCloud truth_cloud(const Scenario& s) {
  PointCloud c;
  for (const auto& r : s.reflectors) c.points.push_back({r.to_reflector().position(), r.amplitude});
  return c;
}

CloudMetrics evaluate_cloud(const PointCloud& pred, const PointCloud& truth) {
  if (pred.empty()) throw NumericalError("point cloud is empty; nothing to score");
  if (truth.empty()) throw InputError("ground-truth cloud is empty");
  CloudMetrics m;
  m.chamfer_2d_m = chamfer(pred, truth, MetricDims::Two);
  m.chamfer_3d_m = chamfer(pred, truth, MetricDims::Three);
  m.mhd_2d_m = modified_hausdorff(pred, truth, MetricDims::Two);
  m.mhd_3d_m = modified_hausdorff(pred, truth, MetricDims::Three);
  m.points = pred.size();
  return m;
}

MotionPipelineParams pipeline_motion_params(const Scenario& s) {
  MotionPipelineParams p;
  p.ransac.seed = derive_seed(s.require_seed(), kRansacStream);
  return p;
}

Heatmap3D form_image(const RawCube& cube, const Scenario& s, const MotionEstimate& motion) {
  return s.fast_beamforming ? beamform_fast(cube, s.grid, motion)
                            : beamform_compensated(cube, s.grid, motion);
}

PipelineResult run_pipeline(const Scenario& s) {
  s.validate();
  PipelineResult r;
  r.cube = staged("simulate", [&] {
    const auto scene = s.scene();
    return simulate(scene, s.trajectory(), s.cfg, s.simulation_options());
  });
  r.estimated_motion = staged("motion", [&] {
    return estimate_motion_from_cube(r.cube, pipeline_motion_params(s)).estimate;
  });
  r.imaging_motion = s.compensate_motion ? r.estimated_motion : MotionEstimate::stationary();
  r.heatmap = staged("image", [&] { return form_image(r.cube, s, r.imaging_motion); });
  staged("pointcloud", [&] {
    r.detections = cfar_detect(r.heatmap, s.cfar);
    r.cloud = detections_to_cloud(r.heatmap, r.detections);
    r.clusters = cluster_detections(r.heatmap, r.detections);
    return 0;
  });
  r.truth = truth_cloud(s);
  r.metrics = staged("metrics", [&] { return evaluate_cloud(r.cloud, r.truth); });
  return r;
}

void write_report(std::ostream& os, const PipelineResult& r) {
  auto d = [](double v) { return format_double(v); };
  const auto& m = r.estimated_motion;
  os << "schema = cylrad-report/1\n";
  os << "speed_m_s = " << d(m.speed_m_s) << "\n";
  os << "heading_rad = " << d(m.heading_rad) << "\n";
  os << "inliers = " << m.inlier_count << "\n";
  os << "residual_rms_hz = " << d(m.residual_rms_hz) << "\n";
  os << "degenerate = " << (m.degenerate ? 1 : 0) << "\n";
  os << "low_confidence = " << (m.low_confidence ? 1 : 0) << "\n";
  os << "imaging_speed_m_s = " << d(r.imaging_motion.speed_m_s) << "\n";
  os << "imaging_heading_rad = " << d(r.imaging_motion.heading_rad) << "\n";
  os << "points = " << r.metrics.points << "\n";
  os << "clusters = " << r.clusters.size() << "\n";
  os << "chamfer_2d_m = " << d(r.metrics.chamfer_2d_m) << "\n";
  os << "chamfer_3d_m = " << d(r.metrics.chamfer_3d_m) << "\n";
  os << "mhd_2d_m = " << d(r.metrics.mhd_2d_m) << "\n";
  os << "mhd_3d_m = " << d(r.metrics.mhd_3d_m) << "\n";
  os << "heatmap_fnv1a = " << hex(heatmap_checksum(r.heatmap)) << "\n";
  os << "cloud_fnv1a = " << hex(cloud_checksum(r.cloud)) << "\n";
}

std::vector<SweepRow> sweep_motion_error(const Scenario& s, const PipelineResult& base,
                                         std::span<const double> dv_m_s,
                                         std::span<const double> dtheta_rad) {
  std::vector<SweepRow> rows;
  const auto& est = base.estimated_motion;
  for (double dv : dv_m_s) {
    for (double dt : dtheta_rad) {
      const double speed = est.speed_m_s + dv;
      if (speed < 0.0) throw InputError("perturbed speed " + format_double(speed) + " is negative");
      const auto motion = MotionEstimate::from_velocity(speed, est.heading_rad + dt);
      const auto heat = staged("image", [&] { return form_image(base.cube, s, motion); });
      const auto cloud = staged("pointcloud", [&] { return cfar_extract(heat, s.cfar); });
      rows.push_back({dv, dt, staged("metrics", [&] { return evaluate_cloud(cloud, base.truth); })});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "dv_m_s,dtheta_rad,chamfer_2d,chamfer_3d,mhd_2d,mhd_3d,num_points\n";
  for (const auto& r : rows) {
    os << format_double(r.dv_m_s) << "," << format_double(r.dtheta_rad) << ","
       << format_double(r.metrics.chamfer_2d_m) << "," << format_double(r.metrics.chamfer_3d_m)
       << "," << format_double(r.metrics.mhd_2d_m) << "," << format_double(r.metrics.mhd_3d_m)
       << "," << r.metrics.points << "\n";
  }
}

unsigned long long heatmap_checksum(const Heatmap3D& heat) {
  const auto v = heat.values();
  return fnv1a64(v.data(), v.size() * sizeof(double));
}

unsigned long long cloud_checksum(const PointCloud& cloud) {
  unsigned long long h = fnv1a64(nullptr, 0);
  for (const auto& p : cloud.points) {
    const double vals[4] = {p.xyz.x(), p.xyz.y(), p.xyz.z(), p.intensity};
    h = fnv1a64(vals, sizeof(vals), h);
  }
  return h;
}

}  // namespace cylrad
