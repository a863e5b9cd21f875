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

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cylrad {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double angle);
/// Wraps an angle into [-pi, pi).
double wrap_pi(double angle);

using Position3 = Eigen::Vector3d;
using UnitVec3 = Eigen::Vector3d;

/**
 * Geometry and waveform of the rotating radar.
 *
 * The robot frame is right-handed with z up and its origin at the rotation
 * center at t = 0. Slow time is sampled once per chirp at
 * t_k = k / (chirps_per_rotation * rotation_rate); each chirp is treated as
 * instantaneous (stop-and-hop).
 */
struct RadarConfig {
  double rotation_radius_m = 0.08;
  double angular_speed_rad_s = 4.0 * kPi;
  std::vector<double> antenna_heights_m;
  double wavelength_m = 0.0038;
  double bandwidth_hz = 4e9;
  int samples_per_chirp = 256;
  int chirps_per_rotation = 1200;
  double max_range_m = 10.0;
  double fov_window_rad = kPi / 2.0;

  /// Default device: 8 vertical antennas at lambda/2 spacing starting at z = 0.
  static RadarConfig defaults();

  /// Replaces the antenna list with `count` antennas at lambda/2 spacing.
  void set_uniform_antennas(int count, double first_height_m = 0.0);

  /// Throws InputError describing the first violated invariant.
  void validate() const;

  int num_antennas() const { return static_cast<int>(antenna_heights_m.size()); }
  double range_resolution_m() const { return kSpeedOfLight / (2.0 * bandwidth_hz); }
  /// Largest range representable by the complex fast-time FFT.
  double unambiguous_range_m() const { return samples_per_chirp * range_resolution_m(); }
  double rotation_period_s() const { return kTwoPi / angular_speed_rad_s; }
  double chirp_interval_s() const { return rotation_period_s() / chirps_per_rotation; }
  double slow_time_rate_hz() const { return 1.0 / chirp_interval_s(); }
  double chirp_time_s(int k) const { return k * chirp_interval_s(); }
  /// Wavelength at the middle of the sweep. The phase of a Hann-windowed range
  /// bin follows this wavelength, not the start-of-chirp one.
  double center_wavelength_m() const {
    return kSpeedOfLight / (kSpeedOfLight / wavelength_m + 0.5 * bandwidth_hz);
  }
};

struct Direction {
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;

  void validate() const;
};

struct ResolutionReport {
  double azimuth_res_rad;
  double elevation_res_rad;
  double range_res_m;
};

/// Location of vertical antenna `a` at time `t` for a stationary platform.
Position3 antenna_position(const RadarConfig& cfg, int a, double t);

UnitVec3 direction_vector(const Direction& d);

/// Closed-form resolutions: 0.36 lambda/r azimuth, 1.98/A elevation, c/2B range.
ResolutionReport theoretical_resolutions(const RadarConfig& cfg);

void write_config(std::ostream& os, const RadarConfig& cfg);
RadarConfig read_config(std::istream& is, const std::string& source_name = "<config>");
RadarConfig load_config(const std::string& path);

/// Applies a single `key = value` pair to a config. Returns false when the key
/// is not a RadarConfig field.
bool apply_config_key(RadarConfig& cfg, const std::string& key, const std::string& value);

}  // namespace cylrad
