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

#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

#include <Eigen/Geometry>

#include "cylrad/errors.hpp"
#include "cylrad/imaging.hpp"
#include "cylrad/scene.hpp"
#include "test_support.hpp"

namespace cylrad {
namespace {

// Cartesian distance written out independently of the library.
double cartesian_distance(double R, double az, double el, double x, double y, double z) {
  const double px = R * std::cos(el) * std::cos(az);
  const double py = R * std::cos(el) * std::sin(az);
  const double pz = R * std::sin(el);
  return std::sqrt((px - x) * (px - x) + (py - y) * (py - y) + (pz - z) * (pz - z));
}

bool bit_identical(const RawCube& a, const RawCube& b) {
  if (a.data().size() != b.data().size()) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.data().size_bytes()) == 0;
}

TEST(ExactDistance, Trivial) {
  const Reflector refl{5.0, 0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(exact_distance(refl, Position3::Zero()), 5.0);
  EXPECT_NEAR(exact_distance(refl, Position3(0.08, 0.0, 0.0)), 4.92, 1e-15);
}

TEST(ExactDistance, MatchesCartesianOracle) {
  test::Gen g(21);
  for (int i = 0; i < 2000; ++i) {
    const Reflector refl{g.uniform(0.1, 20.0), g.uniform(0.0, kTwoPi), g.uniform(-1.5, 1.5), 1.0};
    const Position3 p = g.point(1.0);
    const double oracle =
        cartesian_distance(refl.range_m, refl.azimuth_rad, refl.elevation_rad, p.x(), p.y(), p.z());
    EXPECT_NEAR(exact_distance(refl, p), oracle, 1e-12);
  }
}

TEST(ApproxDistance, Trivial) {
  const RadarConfig cfg = RadarConfig::defaults();
  const Reflector refl{4.0, 1.0, 0.0, 1.0};
  const double t_face = 1.0 / cfg.angular_speed_rad_s;
  EXPECT_NEAR(approx_distance(refl, cfg, {}, t_face), 4.0 - 0.08, 1e-14);
  const double t_side = (1.0 + kPi / 2) / cfg.angular_speed_rad_s;
  EXPECT_NEAR(approx_distance(refl, cfg, {}, t_side), 4.0, 1e-14);
}

// d^2 = L^2 + Q with L the planar approximation, so 0 <= d - L <= Q / (2L).
TEST(ApproxDistance, ErrorBoundedByNeglectedTerm) {
  const RadarConfig cfg = RadarConfig::defaults();
  test::Gen g(22);
  for (int i = 0; i < 10000; ++i) {
    const Reflector refl{g.uniform(1.0, 10.0), g.uniform(0.0, kTwoPi), 0.0, 1.0};
    const Trajectory traj{g.uniform(0.0, 0.6), g.uniform(0.0, kTwoPi)};
    const double t = g.uniform(0.0, 0.5);
    const double psi = cfg.angular_speed_rad_s * t - refl.azimuth_rad;
    const double chi = traj.heading_rad - refl.azimuth_rad;
    const double vt = traj.speed_m_s * t;
    const double r = cfg.rotation_radius_m;
    const double q = std::pow(r * std::sin(psi) + vt * std::sin(chi), 2);
    const Position3 ant = antenna_position(cfg, 0, t) + traj.velocity() * t;
    const double exact = exact_distance(refl, ant);
    const double approx = approx_distance(refl, cfg, traj, t);
    EXPECT_GE(exact - approx, -1e-12);
    EXPECT_LE(exact - approx, q / (2.0 * approx) + 1e-12);
  }
}

// Where the neglected term is small against the range the error is below lambda / 8.
TEST(ApproxDistance, BelowEighthWavelengthInSmallQRegime) {
  const RadarConfig cfg = RadarConfig::defaults();
  test::Gen g(23);
  int checked = 0;
  while (checked < 2000) {
    const Reflector refl{g.uniform(1.0, 10.0), g.uniform(0.0, kTwoPi), 0.0, 1.0};
    const Trajectory traj{g.uniform(0.0, 0.6), g.uniform(0.0, kTwoPi)};
    const double t = g.uniform(0.0, 0.5);
    const Position3 ant = antenna_position(cfg, 0, t) + traj.velocity() * t;
    const Position3 rel = refl.position() - ant;
    const double q = std::pow(rel.cross(refl.position().normalized()).norm(), 2);
    if (q > 0.9 * cfg.wavelength_m * refl.range_m / 4.0) continue;
    ++checked;
    EXPECT_LT(std::abs(exact_distance(refl, ant) - approx_distance(refl, cfg, traj, t)),
              cfg.wavelength_m / 8.0);
  }
}

TEST(RadiationGain, CosinePower) {
  const auto p = RadiationPattern::cosine_power(deg2rad(30.0), deg2rad(90.0));
  EXPECT_DOUBLE_EQ(radiation_gain(p, 0.0), 1.0);
  EXPECT_EQ(radiation_gain(p, deg2rad(90.0)), 0.0);
  EXPECT_EQ(radiation_gain(p, deg2rad(120.0)), 0.0);
  const double g15 = radiation_gain(p, deg2rad(15.0));
  EXPECT_NEAR(g15 * g15, 0.5, 1e-6);
  EXPECT_NEAR(radiation_gain(p, deg2rad(-15.0)), g15, 1e-15);
}

TEST(RadiationGain, MonotoneProperty) {
  test::Gen g(24);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = RadiationPattern::cosine_power(deg2rad(g.uniform(5.0, 80.0)),
                                                  deg2rad(g.uniform(30.0, 180.0)));
    double prev = 1.0;
    for (double off = 0.0; off <= kPi; off += 0.01) {
      const double v = radiation_gain(p, off);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, prev + 1e-15);
      prev = v;
    }
  }
  const auto omni = RadiationPattern::omni();
  EXPECT_EQ(radiation_gain(omni, 2.0), 1.0);
}

TEST(Simulate, EmptySceneIsZero) {
  const RadarConfig cfg = test::small_config(64);
  const RawCube cube = simulate({}, {}, cfg, {});
  EXPECT_EQ(cube.antennas(), 8);
  EXPECT_EQ(cube.chirps(), 1200);
  EXPECT_EQ(cube.samples(), 64);
  for (const auto& s : cube.data()) ASSERT_EQ(s, cplx(0.0, 0.0));
}

// The antenna sits r in front of the rotation center when it faces the
// reflector, so the raw range is R - r.
TEST(Simulate, FacingChirpPeaksAtRangeBin) {
  const RadarConfig cfg = RadarConfig::defaults();
  for (double R : {3.08, 3.0, 5.5}) {
    const Reflector refl{R, 0.0, 0.0, 1.0};
    const RawCube cube = simulate(std::span(&refl, 1), {}, cfg, {});
    const auto profile = range_profile(cube.chirp(0, 0), 256);
    const auto peak = std::max_element(profile.begin(), profile.end()) - profile.begin();
    EXPECT_EQ(peak, std::lround((R - cfg.rotation_radius_m) / cfg.range_resolution_m())) << R;
  }
}

TEST(Simulate, PhaseSlopeAcrossFastTime) {
  const RadarConfig cfg = RadarConfig::defaults();
  const Reflector refl{3.08, 0.3, 0.1, 1.0};
  const RawCube cube = simulate(std::span(&refl, 1), {}, cfg, {});
  const int t = 40;  // boresight 12 deg, inside the mainlobe
  const double d = exact_distance(refl, antenna_position(cfg, 2, cfg.chirp_time_s(t)));
  const double expected = kTwoPi * d / (cfg.samples_per_chirp * cfg.range_resolution_m());
  const int n = cube.samples();
  std::vector<double> phase(n);
  phase[0] = std::arg(cube.at(2, t, 0));
  for (int k = 1; k < n; ++k) {
    phase[k] = phase[k - 1] + std::arg(cube.at(2, t, k) * std::conj(cube.at(2, t, k - 1)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    sx += k;
    sy += phase[k];
    sxx += double(k) * k;
    sxy += k * phase[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope / expected, 1.0, 1e-6);
}

TEST(Simulate, LinearInScene) {
  const RadarConfig cfg = test::small_config(64);
  test::Gen g(25);
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = g.scene(3, 0.5, 2.0, 10.0);
    const auto b = g.scene(2, 0.5, 2.0, 10.0);
    auto both = a;
    both.insert(both.end(), b.begin(), b.end());
    const Trajectory traj{g.uniform(0.0, 0.6), g.uniform(0.0, kTwoPi)};
    const RawCube ca = simulate(a, traj, cfg, {});
    const RawCube cb = simulate(b, traj, cfg, {});
    const RawCube cab = simulate(both, traj, cfg, {});
    double peak = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < cab.data().size(); ++i) {
      peak = std::max(peak, std::abs(cab.data()[i]));
      worst = std::max(worst, std::abs(cab.data()[i] - ca.data()[i] - cb.data()[i]));
    }
    EXPECT_LE(worst, 1e-10 * peak);
  }
}

TEST(Simulate, NoiseVariance) {
  const RadarConfig cfg = test::small_config(64);
  SimulationOptions opts;
  opts.noise_std = 0.5;
  opts.seed = 99;
  const RawCube cube = simulate({}, {}, cfg, opts);
  double power = 0.0, mean_re = 0.0;
  for (const auto& s : cube.data()) {
    power += std::norm(s);
    mean_re += s.real();
  }
  const double n = static_cast<double>(cube.data().size());
  EXPECT_NEAR(power / n, 0.25, 0.25 * 5.0 / std::sqrt(n));
  EXPECT_NEAR(mean_re / n, 0.0, 0.01);
}

TEST(Simulate, DeterministicAcrossRunsAndThreads) {
  const RadarConfig cfg = test::small_config(64);
  test::Gen g(26);
  const auto scene = g.scene(4, 1.0, 2.0, 5.0);
  SimulationOptions opts;
  opts.noise_std = 0.1;
  opts.seed = 1234;
  const Trajectory traj{0.3, 1.0};
  const int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const RawCube one = simulate(scene, traj, cfg, opts);
  omp_set_num_threads(4);
  const RawCube four = simulate(scene, traj, cfg, opts);
  omp_set_num_threads(max_threads);
  const RawCube dflt = simulate(scene, traj, cfg, opts);
  EXPECT_TRUE(bit_identical(one, four));
  EXPECT_TRUE(bit_identical(one, dflt));
  opts.seed = 1235;
  EXPECT_FALSE(bit_identical(one, simulate(scene, traj, cfg, opts)));
}

TEST(Simulate, PatternGatesChirpsFacingAway) {
  const RadarConfig cfg = test::small_config(64);
  const Reflector refl{2.0, 0.0, 0.0, 1.0};
  const RawCube cube = simulate(std::span(&refl, 1), {}, cfg, {});
  // Chirp 600 points at 180 deg, behind the 90 deg cutoff.
  for (int n = 0; n < cube.samples(); ++n) EXPECT_EQ(cube.at(0, 600, n), cplx(0.0, 0.0));
  EXPECT_GT(std::abs(cube.at(0, 0, 0)), 0.99);
}

TEST(Simulate, ElevationOutsideFlatBandIsSilent) {
  const RadarConfig cfg = test::small_config(64);
  const Reflector refl{2.0, 0.0, deg2rad(60.0), 1.0};
  const RawCube cube = simulate(std::span(&refl, 1), {}, cfg, {});
  for (const auto& s : cube.data()) ASSERT_EQ(s, cplx(0.0, 0.0));
}

TEST(DeriveSeed, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(7, s));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(CubeIo, RoundTrip) {
  RadarConfig cfg = test::small_config(32);
  cfg.set_uniform_antennas(3, 0.02);
  cfg.fov_window_rad = 1.0;
  test::Gen g(27);
  const RawCube cube = g.gaussian_cube(cfg);
  std::stringstream ss;
  write_cube(ss, cube);
  const RawCube back = read_cube(ss);
  EXPECT_EQ(back.seed(), cube.seed());
  ASSERT_EQ(back.config().antenna_heights_m.size(), 3u);
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(back.config().antenna_heights_m[a], cfg.antenna_heights_m[a], 1e-15);
  }
  EXPECT_EQ(back.config().fov_window_rad, cfg.fov_window_rad);
  EXPECT_EQ(back.config().max_range_m, cfg.max_range_m);
  ASSERT_EQ(back.data().size(), cube.data().size());
  for (std::size_t i = 0; i < cube.data().size(); ++i) {
    EXPECT_EQ(back.data()[i].real(), static_cast<float>(cube.data()[i].real()));
    EXPECT_EQ(back.data()[i].imag(), static_cast<float>(cube.data()[i].imag()));
  }
}

TEST(CubeIo, RejectsCorruptInput) {
  std::istringstream bad_magic(std::string(96, 'x'));
  EXPECT_THROW(read_cube(bad_magic), InputError);
  const RadarConfig cfg = test::small_config(32);
  std::stringstream ss;
  write_cube(ss, RawCube(cfg, 1));
  const std::string full = ss.str();
  std::istringstream truncated(full.substr(0, full.size() - 8));
  EXPECT_THROW(read_cube(truncated), InputError);
}

}  // namespace
}  // namespace cylrad
