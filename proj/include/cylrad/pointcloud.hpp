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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cylrad/imaging.hpp"

namespace cylrad {

struct CloudPoint {
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
  double intensity = 0.0;
};

/// Points in the robot frame at t = 0 (m).
struct PointCloud {
  std::vector<CloudPoint> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

struct CfarParams {
  int guard = 2;
  /// Training cells on each side of the cell under test.
  int train = 8;
  double pfa = 1e-4;
  /// Multiplies the CA-CFAR scale factor; 1 gives the nominal pfa.
  double threshold_scale = 1.0;
  /// Also require magnitude within this many dB of the heatmap peak. Keeps
  /// the beam's angular sidelobes out of noise-free clouds.
  std::optional<double> min_relative_db = 12.0;
};

struct Detection {
  HeatmapIndex index;
  double magnitude = 0.0;
};

/// CA-CFAR scale factor on power for `cells` training cells: M (pfa^(-1/M) - 1).
double cfar_scale(int cells, double pfa);

/**
 * Square-law cell-averaging CFAR along range on every (azimuth, elevation)
 * ray. Near the ends of a ray the window is truncated and the scale factor
 * recomputed for the cells available.
 */
std::vector<Detection> cfar_detect(const Heatmap3D& heat, const CfarParams& params = {});

/// Detection at (azimuth, elevation) direction scaled by its bin range.
PointCloud detections_to_cloud(const Heatmap3D& heat, std::span<const Detection> dets);

PointCloud cfar_extract(const Heatmap3D& heat, const CfarParams& params = {});

struct Cluster {
  std::vector<std::size_t> members;
  /// Magnitude-weighted centroid in grid coordinates.
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;
  double range_m = 0.0;
  double peak_magnitude = 0.0;
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
};

/// Groups detections by 26-connectivity in (azimuth, elevation, range) index
/// space, wrapping azimuth on full-circle grids. Strongest cluster first.
std::vector<Cluster> cluster_detections(const Heatmap3D& heat, std::span<const Detection> dets);

enum class MetricDims { Two, Three };

/// Mean over `from` of the distance to the nearest point of `to`.
double directed_mean_nn(const PointCloud& from, const PointCloud& to, MetricDims dims);

/// Average of the two directed mean nearest-neighbour distances.
double chamfer(const PointCloud& a, const PointCloud& b, MetricDims dims);

/// Larger of the two directed mean nearest-neighbour distances.
double modified_hausdorff(const PointCloud& a, const PointCloud& b, MetricDims dims);

/// Ranges (m) in row-major order; 0 marks "no return".
struct RangeImage {
  int rows = 0;
  int cols = 0;
  std::vector<double> range_m;

  double at(int r, int c) const { return range_m[static_cast<std::size_t>(r) * cols + c]; }
};

RangeImage range_image(const PeakRangeImage& peak);

/// Mean |pred - truth| over pixels whose mask entry is 0. An empty mask
/// includes every pixel.
double range_image_mae(const RangeImage& pred, const RangeImage& truth,
                       std::span<const std::uint8_t> mask = {});

/// ASCII PLY with double properties x y z intensity.
void write_ply(std::ostream& os, const PointCloud& cloud);
PointCloud read_ply(std::istream& is);
void save_ply(const std::string& path, const PointCloud& cloud);
PointCloud load_ply(const std::string& path);

/// One CSV row per image row, comma-separated ranges in meters.
void write_range_csv(std::ostream& os, const RangeImage& img);
RangeImage read_range_csv(std::istream& is);

/// Binary 16-bit PGM (P5, maxval 65535, big-endian) in millimeters, clamped.
void write_range_pgm16(std::ostream& os, const RangeImage& img);
RangeImage read_range_pgm16(std::istream& is);

}  // namespace cylrad
