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

#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cylrad/fft.hpp"
#include "cylrad/motion_estimate.hpp"
#include "cylrad/radar_config.hpp"
#include "cylrad/scene.hpp"

namespace cylrad {

/// Azimuth x elevation x range sampling of the output volume. Angular bins
/// are cell centers: azimuth_min + (i + 0.5) * step.
struct ImagingGrid {
  int azimuth_bins = 512;
  int elevation_bins = 64;
  int range_bins = 256;
  double azimuth_min_rad = 0.0;
  double azimuth_max_rad = kTwoPi;
  double elevation_min_rad = -kPi / 4.0;
  double elevation_max_rad = kPi / 4.0;

  double azimuth_step() const { return (azimuth_max_rad - azimuth_min_rad) / azimuth_bins; }
  double elevation_step() const {
    return (elevation_max_rad - elevation_min_rad) / elevation_bins;
  }
  double azimuth(int i) const { return azimuth_min_rad + (i + 0.5) * azimuth_step(); }
  double elevation(int j) const { return elevation_min_rad + (j + 0.5) * elevation_step(); }
  bool full_circle() const;

  void validate() const;
};

struct HeatmapIndex {
  int azimuth = 0;
  int elevation = 0;
  int range = 0;
};

/// Beamformed magnitudes stored (azimuth, elevation, range), range fastest.
class Heatmap3D {
 public:
  Heatmap3D() = default;
  Heatmap3D(ImagingGrid grid, RadarConfig cfg);

  const ImagingGrid& grid() const { return grid_; }
  const RadarConfig& config() const { return cfg_; }
  double range_bin_m() const { return cfg_.range_resolution_m(); }

  double& at(int i, int j, int k) { return data_[index(i, j, k)]; }
  double at(int i, int j, int k) const { return data_[index(i, j, k)]; }
  std::span<double> ray(int i, int j) {
    return {data_.data() + index(i, j, 0), static_cast<std::size_t>(grid_.range_bins)};
  }
  std::span<const double> ray(int i, int j) const {
    return {data_.data() + index(i, j, 0), static_cast<std::size_t>(grid_.range_bins)};
  }
  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  HeatmapIndex argmax() const;
  double max_value() const;

  /// Platform velocity the image was formed with, and whether ranges were
  /// migrated to the t = 0 frame along each look direction.
  void set_platform_motion(const Eigen::Vector3d& velocity, bool range_migrated);
  const Eigen::Vector3d& platform_velocity() const { return velocity_; }
  bool range_migrated() const { return range_migrated_; }

  /// World position (t = 0 frame) of a return at `range_m` along look
  /// direction (azimuth, elevation). Adds the platform displacement at the
  /// beam's look time that the range does not already account for.
  Position3 voxel_position(double azimuth_rad, double elevation_rad, double range_m) const;

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * grid_.elevation_bins + j) * grid_.range_bins + k;
  }

  ImagingGrid grid_;
  RadarConfig cfg_;
  std::vector<double> data_;
  Eigen::Vector3d velocity_ = Eigen::Vector3d::Zero();
  bool range_migrated_ = true;
};

/// Time at which the boresight points at `azimuth_rad` during the rotation.
double look_time_s(const RadarConfig& cfg, double azimuth_rad);

struct BeamformOptions {
  WindowKind range_window = WindowKind::Hann;
  /// Shift each beam's fast-time spectrum by the platform displacement along
  /// the look direction at that beam's boresight time, so ranges refer to the
  /// t = 0 frame. Applied after coherent summation; no effect when v = 0.
  bool range_migration = true;
  /// Reference ranges to the rotation center instead of the antenna circle by
  /// shifting each beam by r cos(elevation).
  bool center_range_reference = true;
  /// Overrides the cube's fov_window_rad when set.
  std::optional<double> fov_window_rad;
  /// Steer every fast-time sample with its own instantaneous wavenumber
  /// 4 pi (f0 + B n / N) / c instead of the start-of-chirp one.
  bool wideband_steering = false;
  /// Focus the planar aperture on a spherical wavefront from this range
  /// instead of a plane wave.
  std::optional<double> focus_range_m;
};

/// Chirp indices whose boresight lies within half the FOV window of `azimuth`.
std::vector<int> summation_window(const RadarConfig& cfg, double azimuth_rad);

/// Windowed fast-time FFT magnitude, first `range_bins` bins; bin k <-> k dR.
std::vector<double> range_profile(std::span<const cplx> beam, int range_bins,
                                  WindowKind window = WindowKind::Hann);

/// Coherent sum over antennas and windowed chirps with a stationary platform.
Heatmap3D beamform_static(const RawCube& cube, const ImagingGrid& grid,
                          const BeamformOptions& opts = {});

/// Coherent sum with antenna positions displaced by v t.
Heatmap3D beamform_compensated(const RawCube& cube, const ImagingGrid& grid,
                               const MotionEstimate& motion, const BeamformOptions& opts = {});

/**
 * Same result as beamform_compensated, computed as two 1D steps: an
 * elevation sum over the vertical antennas per chirp, then an azimuth and
 * motion sum over the planar geometry.
 */
Heatmap3D beamform_fast(const RawCube& cube, const ImagingGrid& grid, const MotionEstimate& motion,
                        const BeamformOptions& opts = {});

/// Same container as RawCube with magic "CRHM"; payload is f32 magnitudes.
/// The header keeps grid extents, bandwidth, rotation radius and rate, and
/// platform velocity; other config fields revert to defaults on reading.
void write_heatmap(std::ostream& os, const Heatmap3D& heat);
Heatmap3D read_heatmap(std::istream& is);
void save_heatmap(const std::string& path, const Heatmap3D& heat);
Heatmap3D load_heatmap(const std::string& path);

/// Peak-over-range image (rows = elevation, columns = azimuth).
struct PeakRangeImage {
  int rows = 0;
  int cols = 0;
  std::vector<double> range_m;
  std::vector<double> magnitude;
};

PeakRangeImage peak_range_image(const Heatmap3D& heat);
/// ASCII PGM (P2) of magnitude normalized to 0..255, top row = highest elevation.
void write_peak_pgm(std::ostream& os, const PeakRangeImage& img);
/// CSV rows: azimuth_rad,elevation_rad,range_m,magnitude.
void write_peak_csv(std::ostream& os, const PeakRangeImage& img, const ImagingGrid& grid);

}  // namespace cylrad
