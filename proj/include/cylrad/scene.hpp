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
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cylrad/radar_config.hpp"

namespace cylrad {

/// Static point reflector, polar coordinates in the robot frame at t = 0.
struct Reflector {
  double range_m = 0.0;
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;
  double amplitude = 1.0;

  Position3 position() const;
};

/// Constant planar platform velocity over one rotation.
struct Trajectory {
  double speed_m_s = 0.0;
  double heading_rad = 0.0;

  Eigen::Vector3d velocity() const;
};

/// Azimuth amplitude pattern of the radar board relative to boresight.
struct RadiationPattern {
  enum class Model { Omni, CosinePower };

  Model model = Model::CosinePower;
  double exponent = 0.0;
  double fov_cutoff_rad = kPi / 2.0;

  static RadiationPattern omni(double cutoff_rad = kPi);
  /// cos^k pattern whose two-sided power width at -3 dB equals `beamwidth_3db_rad`.
  static RadiationPattern cosine_power(double beamwidth_3db_rad = deg2rad(30.0),
                                       double cutoff_rad = kPi / 2.0);
};

/// Amplitude gain in [0, 1]; 1 at zero offset, 0 at or beyond a cutoff below pi.
double radiation_gain(const RadiationPattern& p, double offset_rad);

/// Elevation half-angle within which the simulated gain is flat.
inline constexpr double kElevationHalfWidthRad = kPi / 4.0;

/**
 * Complex IF samples indexed (antenna a, chirp t, fast-time sample n),
 * stored contiguously in that order.
 */
class RawCube {
 public:
  RawCube() = default;
  RawCube(RadarConfig cfg, std::uint64_t seed);

  const RadarConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  int antennas() const { return antennas_; }
  int chirps() const { return chirps_; }
  int samples() const { return samples_; }

  std::complex<double>& at(int a, int t, int n) { return data_[index(a, t, n)]; }
  const std::complex<double>& at(int a, int t, int n) const { return data_[index(a, t, n)]; }

  std::span<std::complex<double>> chirp(int a, int t) {
    return {data_.data() + index(a, t, 0), static_cast<std::size_t>(samples_)};
  }
  std::span<const std::complex<double>> chirp(int a, int t) const {
    return {data_.data() + index(a, t, 0), static_cast<std::size_t>(samples_)};
  }

  std::span<const std::complex<double>> data() const { return data_; }
  std::span<std::complex<double>> data() { return data_; }

 private:
  std::size_t index(int a, int t, int n) const {
    return (static_cast<std::size_t>(a) * chirps_ + t) * samples_ + n;
  }

  RadarConfig cfg_;
  std::uint64_t seed_ = 0;
  int antennas_ = 0;
  int chirps_ = 0;
  int samples_ = 0;
  std::vector<std::complex<double>> data_;
};

/// Euclidean distance between a reflector and an antenna position.
double exact_distance(const Reflector& refl, const Position3& pos);

/// Far-field planar distance model R - r cos(wt - theta) - v t cos(theta_v - theta).
double approx_distance(const Reflector& refl, const RadarConfig& cfg, const Trajectory& traj,
                       double t);

struct SimulationOptions {
  RadiationPattern pattern = RadiationPattern::cosine_power();
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

/**
 * Synthesizes IF samples for static reflectors seen from the rotating array
 * on a moving platform.
 *
 * Sample (a, t, n) is the sum over reflectors of
 * amplitude * gain * exp(j 2 pi (n d / (N dR) + 2 d / lambda)), with d the
 * exact antenna-reflector distance at chirp start and gain the pattern
 * evaluated at the reflector's azimuth offset from boresight, seen from the
 * platform's rotation center. Noise is circular complex Gaussian with
 * E|n|^2 = noise_std^2, drawn from a per-chirp substream of `seed`.
 */
RawCube simulate(std::span<const Reflector> scene, const Trajectory& traj, const RadarConfig& cfg,
                 const SimulationOptions& opts);

/// Deterministic per-stream seed derivation (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Binary container: 96-byte little-endian header + interleaved f32 (re, im).
void write_cube(std::ostream& os, const RawCube& cube);
RawCube read_cube(std::istream& is);
void save_cube(const std::string& path, const RawCube& cube);
RawCube load_cube(const std::string& path);

}  // namespace cylrad
