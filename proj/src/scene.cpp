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

#include "cylrad/scene.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include "binary_container.hpp"
#include "cylrad/errors.hpp"

namespace cylrad {

Position3 Reflector::position() const {
  const double ce = std::cos(elevation_rad);
  return {range_m * ce * std::cos(azimuth_rad), range_m * ce * std::sin(azimuth_rad),
          range_m * std::sin(elevation_rad)};
}

Eigen::Vector3d Trajectory::velocity() const {
  return {speed_m_s * std::cos(heading_rad), speed_m_s * std::sin(heading_rad), 0.0};
}

RadiationPattern RadiationPattern::omni(double cutoff_rad) {
  return {Model::Omni, 0.0, cutoff_rad};
}

RadiationPattern RadiationPattern::cosine_power(double beamwidth_3db_rad, double cutoff_rad) {
  if (!(beamwidth_3db_rad > 0.0 && beamwidth_3db_rad < kPi)) {
    throw InputError("cosine_power beamwidth must lie in (0, pi)");
  }
  // Amplitude cos^k falls to 2^-1/2 (half power) at half the beamwidth.
  const double k = std::log(std::sqrt(0.5)) / std::log(std::cos(beamwidth_3db_rad / 2.0));
  return {Model::CosinePower, k, std::min(cutoff_rad, kPi / 2.0)};
}

double radiation_gain(const RadiationPattern& p, double offset_rad) {
  const double off = std::abs(wrap_pi(offset_rad));
  // A cutoff of pi or more spans the whole circle.
  if (p.fov_cutoff_rad < kPi && off >= p.fov_cutoff_rad) return 0.0;
  if (p.model == RadiationPattern::Model::Omni) return 1.0;
  const double c = std::cos(off);
  return c > 0.0 ? std::pow(c, p.exponent) : 0.0;
}

RawCube::RawCube(RadarConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      seed_(seed),
      antennas_(cfg_.num_antennas()),
      chirps_(cfg_.chirps_per_rotation),
      samples_(cfg_.samples_per_chirp),
      data_(static_cast<std::size_t>(antennas_) * chirps_ * samples_) {}

double exact_distance(const Reflector& refl, const Position3& pos) {
  return (refl.position() - pos).norm();
}

double approx_distance(const Reflector& refl, const RadarConfig& cfg, const Trajectory& traj,
                       double t) {
  const double wt = cfg.angular_speed_rad_s * t;
  return refl.range_m - cfg.rotation_radius_m * std::cos(wt - refl.azimuth_rad) -
         traj.speed_m_s * t * std::cos(traj.heading_rad - refl.azimuth_rad);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RawCube simulate(std::span<const Reflector> scene, const Trajectory& traj, const RadarConfig& cfg,
                 const SimulationOptions& opts) {
  cfg.validate();
  if (!(opts.noise_std >= 0.0)) throw InputError("noise_std must be >= 0");
  if (!(traj.speed_m_s >= 0.0)) throw InputError("trajectory speed must be >= 0");
  const double max_range = std::min(cfg.max_range_m, cfg.unambiguous_range_m());
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const auto& r = scene[i];
    if (!(r.range_m >= 0.0) || !(r.amplitude >= 0.0)) {
      throw InputError("reflector " + std::to_string(i) + ": range and amplitude must be >= 0");
    }
    if (r.range_m > max_range) {
      throw InputError("reflector " + std::to_string(i) + " at " + std::to_string(r.range_m) +
                       " m lies beyond the unambiguous range of " + std::to_string(max_range) +
                       " m");
    }
  }

  RawCube cube(cfg, opts.seed);
  const int A = cube.antennas();
  const int T = cube.chirps();
  const int N = cube.samples();
  const double inv_bin = 1.0 / (N * cfg.range_resolution_m());
  const double two_over_lambda = 2.0 / cfg.wavelength_m;
  const Eigen::Vector3d vel = traj.velocity();

  std::vector<Position3> targets;
  targets.reserve(scene.size());
  for (const auto& r : scene) targets.push_back(r.position());

#pragma omp parallel for schedule(static)
  for (int t = 0; t < T; ++t) {
    const double time = cfg.chirp_time_s(t);
    const double boresight = cfg.angular_speed_rad_s * time;
    const Position3 center = vel * time;

    // Pattern gain depends only on geometry seen from the rotation center.
    std::vector<double> gains(scene.size());
    for (std::size_t i = 0; i < scene.size(); ++i) {
      const Eigen::Vector3d rel = targets[i] - center;
      const double az = std::atan2(rel.y(), rel.x());
      const double el = std::atan2(rel.z(), std::hypot(rel.x(), rel.y()));
      const double el_gain = std::abs(el) <= kElevationHalfWidthRad ? 1.0 : 0.0;
      gains[i] = scene[i].amplitude * el_gain * radiation_gain(opts.pattern, az - boresight);
    }

    for (int a = 0; a < A; ++a) {
      const Position3 ant = center + Position3(cfg.rotation_radius_m * std::cos(boresight),
                                               cfg.rotation_radius_m * std::sin(boresight),
                                               cfg.antenna_heights_m[a]);
      auto chirp = cube.chirp(a, t);
      for (std::size_t i = 0; i < scene.size(); ++i) {
        if (gains[i] == 0.0) continue;
        const double d = (targets[i] - ant).norm();
        const double carrier = kTwoPi * std::fmod(two_over_lambda * d, 1.0);
        const double beat = kTwoPi * d * inv_bin;
        for (int n = 0; n < N; ++n) {
          chirp[n] += std::polar(gains[i], carrier + beat * n);
        }
      }
      if (opts.noise_std > 0.0) {
        std::mt19937_64 rng(derive_seed(opts.seed, static_cast<std::uint64_t>(a) * T + t));
        std::normal_distribution<double> gauss(0.0, opts.noise_std / std::sqrt(2.0));
        for (int n = 0; n < N; ++n) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          chirp[n] += std::complex<double>(re, im);
        }
      }
    }
  }
  return cube;
}

namespace {
constexpr std::array<char, 4> kCubeMagic{'C', 'R', 'C', 'B'};
}

void write_cube(std::ostream& os, const RawCube& cube) {
  const auto& cfg = cube.config();
  detail::ContainerHeader h;
  h.magic = kCubeMagic;
  h.dims = {static_cast<std::uint32_t>(cube.antennas()), static_cast<std::uint32_t>(cube.chirps()),
            static_cast<std::uint32_t>(cube.samples())};
  const auto& hts = cfg.antenna_heights_m;
  const double spacing = hts.size() > 1 ? hts[1] - hts[0] : cfg.wavelength_m / 2.0;
  for (std::size_t a = 0; a < hts.size(); ++a) {
    if (std::abs(hts[a] - (hts[0] + a * spacing)) > 1e-12) {
      throw InputError("cube container stores evenly spaced antenna arrays only");
    }
  }
  h.params = {cfg.rotation_radius_m, cfg.angular_speed_rad_s, cfg.wavelength_m, cfg.bandwidth_hz,
              hts.front(), spacing, cfg.max_range_m, cfg.fov_window_rad,
              std::bit_cast<double>(cube.seed())};
  detail::write_header(os, h);
  std::vector<float> buf(2 * static_cast<std::size_t>(cube.samples()));
  for (int a = 0; a < cube.antennas(); ++a) {
    for (int t = 0; t < cube.chirps(); ++t) {
      const auto chirp = cube.chirp(a, t);
      for (int n = 0; n < cube.samples(); ++n) {
        buf[2 * n] = static_cast<float>(chirp[n].real());
        buf[2 * n + 1] = static_cast<float>(chirp[n].imag());
      }
      os.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
  }
  if (!os) throw InputError("failed writing cube");
}

RawCube read_cube(std::istream& is) {
  const auto h = detail::read_header(is, kCubeMagic);
  RadarConfig cfg;
  cfg.rotation_radius_m = h.params[0];
  cfg.angular_speed_rad_s = h.params[1];
  cfg.wavelength_m = h.params[2];
  cfg.bandwidth_hz = h.params[3];
  cfg.chirps_per_rotation = static_cast<int>(h.dims[1]);
  cfg.samples_per_chirp = static_cast<int>(h.dims[2]);
  cfg.antenna_heights_m.resize(h.dims[0]);
  for (std::uint32_t a = 0; a < h.dims[0]; ++a) cfg.antenna_heights_m[a] = h.params[4] + a * h.params[5];
  cfg.max_range_m = h.params[6];
  cfg.fov_window_rad = h.params[7];
  cfg.validate();
  RawCube cube(cfg, std::bit_cast<std::uint64_t>(h.params[8]));
  std::vector<float> buf(2 * static_cast<std::size_t>(cube.samples()));
  for (int a = 0; a < cube.antennas(); ++a) {
    for (int t = 0; t < cube.chirps(); ++t) {
      if (!is.read(reinterpret_cast<char*>(buf.data()),
                   static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
        throw InputError("truncated cube payload");
      }
      auto chirp = cube.chirp(a, t);
      for (int n = 0; n < cube.samples(); ++n) chirp[n] = {buf[2 * n], buf[2 * n + 1]};
    }
  }
  return cube;
}

void save_cube(const std::string& path, const RawCube& cube) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  write_cube(out, cube);
}

RawCube load_cube(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open cube file '" + path + "'");
  return read_cube(in);
}

}  // namespace cylrad
