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

#include <cstring>
#include <sstream>

#include "cylrad/errors.hpp"
#include "cylrad/imaging.hpp"
#include "cylrad/scene.hpp"
#include "test_support.hpp"

namespace cylrad {
namespace {

constexpr double kDefaultAzStep = kTwoPi / 512.0;

// Azimuth window of `half_bins` default-size bins on each side of `center`.
ImagingGrid local_grid(double center_rad, int half_bins, int el_bins, int range_bins) {
  ImagingGrid g;
  g.azimuth_bins = 2 * half_bins;
  g.azimuth_min_rad = center_rad - half_bins * kDefaultAzStep;
  g.azimuth_max_rad = center_rad + half_bins * kDefaultAzStep;
  g.elevation_bins = el_bins;
  g.range_bins = range_bins;
  return g;
}

double max_normalized_deviation(const Heatmap3D& a, const Heatmap3D& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  }
  return worst / std::max(a.max_value(), b.max_value());
}

RawCube single(const RadarConfig& cfg, const Reflector& r, Trajectory traj = {}) {
  return simulate(std::span(&r, 1), traj, cfg, {});
}

TEST(SummationWindow, CoversHalfFovEachSide) {
  const RadarConfig cfg = RadarConfig::defaults();
  const auto w = summation_window(cfg, deg2rad(40.0));
  EXPECT_EQ(w.size(), 300u);
  for (int t : w) {
    const double off = wrap_pi(cfg.angular_speed_rad_s * cfg.chirp_time_s(t) - deg2rad(40.0));
    EXPECT_LE(std::abs(off), kPi / 4 + 1e-12);
  }
  // Windows around 0 wrap across the end of the rotation.
  const auto wrap = summation_window(cfg, 0.0);
  EXPECT_TRUE(std::find(wrap.begin(), wrap.end(), 1199) != wrap.end());
}

TEST(BeamformStatic, SingleReflectorArgmax) {
  const RadarConfig cfg = test::small_config(128);
  const Reflector refl{3.0, deg2rad(40.0), 0.0, 1.0};
  const auto grid = local_grid(deg2rad(40.0), 16, 16, 128);
  const Heatmap3D heat = beamform_static(single(cfg, refl), grid);
  const auto idx = heat.argmax();
  EXPECT_LE(std::abs(grid.azimuth(idx.azimuth) - refl.azimuth_rad), grid.azimuth_step());
  EXPECT_LE(std::abs(idx.range * heat.range_bin_m() - refl.range_m), heat.range_bin_m());
  EXPECT_EQ(idx.range, 80);
}

// 2 deg is above the 0.96 deg width of the full circular aperture, which is
// what an omni antenna summed over the whole rotation sees.
TEST(BeamformStatic, TwoReflectorsTwoDegreesApart) {
  const RadarConfig cfg = test::small_config(128);
  const double c = deg2rad(40.0);
  const std::vector<Reflector> scene{{3.0, c - deg2rad(1.0), 0.0, 1.0}, {3.0, c + deg2rad(1.0), 0.0, 1.0}};
  SimulationOptions sim;
  sim.pattern = RadiationPattern::omni();
  ImagingGrid grid;
  grid.azimuth_bins = 120;
  grid.azimuth_min_rad = c - deg2rad(3.0);
  grid.azimuth_max_rad = c + deg2rad(3.0);
  grid.elevation_bins = 1;
  grid.elevation_min_rad = -1e-3;
  grid.elevation_max_rad = 1e-3;
  grid.range_bins = 128;
  BeamformOptions opts;
  opts.fov_window_rad = kTwoPi;
  const Heatmap3D heat = beamform_static(simulate(scene, {}, cfg, sim), grid, opts);
  const int k = heat.argmax().range;
  std::vector<double> cut(grid.azimuth_bins);
  for (int i = 0; i < grid.azimuth_bins; ++i) cut[i] = heat.at(i, 0, k);
  std::vector<int> maxima;
  for (int i = 1; i + 1 < grid.azimuth_bins; ++i) {
    if (cut[i] > cut[i - 1] && cut[i] >= cut[i + 1]) maxima.push_back(i);
  }
  ASSERT_GE(maxima.size(), 2u);
  std::sort(maxima.begin(), maxima.end(), [&](int a, int b) { return cut[a] > cut[b]; });
  const int lo = std::min(maxima[0], maxima[1]);
  const int hi = std::max(maxima[0], maxima[1]);
  EXPECT_NEAR(grid.azimuth(lo), c - deg2rad(1.0), deg2rad(0.35));
  EXPECT_NEAR(grid.azimuth(hi), c + deg2rad(1.0), deg2rad(0.35));
  const double saddle = *std::min_element(cut.begin() + lo, cut.begin() + hi);
  EXPECT_LT(saddle, std::sqrt(0.5) * std::min(cut[lo], cut[hi]));
}

TEST(BeamformStatic, EmptySceneIsSilent) {
  const RadarConfig cfg = test::small_config(64);
  const auto grid = local_grid(1.0, 4, 4, 64);
  const Heatmap3D ref = beamform_static(single(cfg, {2.0, 1.0, 0.0, 1.0}), grid);
  const Heatmap3D empty = beamform_static(simulate({}, {}, cfg, {}), grid);
  EXPECT_LT(empty.max_value(), 1e-9 * ref.max_value());
}

TEST(BeamformCompensated, ZeroMotionEqualsStaticBitForBit) {
  const RadarConfig cfg = test::small_config(64);
  test::Gen g(41);
  const RawCube cube = simulate(g.scene(3, 0.5, 2.0, 10.0), {}, cfg, {});
  const auto grid = local_grid(2.0, 6, 4, 64);
  const Heatmap3D s = beamform_static(cube, grid);
  for (double heading : {0.0, 2.5}) {
    const Heatmap3D c = beamform_compensated(cube, grid, MotionEstimate::from_velocity(0.0, heading));
    ASSERT_EQ(s.values().size(), c.values().size());
    EXPECT_EQ(std::memcmp(s.values().data(), c.values().data(), s.values().size_bytes()), 0);
  }
}

TEST(BeamformCompensated, MovingReflectorWithTrueMotion) {
  const RadarConfig cfg = test::small_config(128);
  const Reflector refl{3.0, deg2rad(40.0), 0.0, 1.0};
  const Trajectory traj{0.4, deg2rad(40.0)};
  const RawCube cube = single(cfg, refl, traj);
  ImagingGrid grid = local_grid(deg2rad(40.0), 64, 8, 128);
  const Heatmap3D comp =
      beamform_fast(cube, grid, MotionEstimate::from_velocity(traj.speed_m_s, traj.heading_rad));
  const auto ic = comp.argmax();
  EXPECT_LE(std::abs(grid.azimuth(ic.azimuth) - refl.azimuth_rad), grid.azimuth_step());
  EXPECT_LE(std::abs(ic.range * comp.range_bin_m() - refl.range_m), comp.range_bin_m());

  const Heatmap3D plain = beamform_fast(cube, grid, MotionEstimate::stationary());
  const auto ip = plain.argmax();
  EXPECT_GE(std::abs(ip.azimuth - ic.azimuth), 2);
}

TEST(BeamformFast, MatchesDirectOnRandomCubes) {
  test::Gen g(42);
  for (int trial = 0; trial < 6; ++trial) {
    RadarConfig cfg = test::small_config(32);
    cfg.set_uniform_antennas(g.integer(1, 8));
    const RawCube cube = g.gaussian_cube(cfg);
    ImagingGrid grid;
    grid.azimuth_bins = 12;
    grid.azimuth_min_rad = g.uniform(0.0, 5.0);
    grid.azimuth_max_rad = grid.azimuth_min_rad + 0.3;
    grid.elevation_bins = 5;
    grid.range_bins = 32;
    BeamformOptions opts;
    opts.range_migration = g.coin();
    opts.center_range_reference = g.coin();
    opts.wideband_steering = g.coin();
    if (g.coin()) opts.focus_range_m = g.uniform(0.5, 4.0);
    if (g.coin()) opts.fov_window_rad = g.uniform(0.2, kTwoPi);
    const auto motion = MotionEstimate::from_velocity(g.uniform(0.0, 0.6), g.uniform(0.0, kTwoPi));
    const Heatmap3D direct = beamform_compensated(cube, grid, motion, opts);
    const Heatmap3D fast = beamform_fast(cube, grid, motion, opts);
    EXPECT_LT(max_normalized_deviation(direct, fast), 1e-6) << "trial " << trial;
  }
}

TEST(BeamformFast, SingleAntennaIdentical) {
  RadarConfig cfg = test::small_config(32);
  cfg.set_uniform_antennas(1);
  test::Gen g(43);
  const RawCube cube = g.gaussian_cube(cfg);
  const auto grid = local_grid(1.0, 4, 3, 32);
  const auto motion = MotionEstimate::from_velocity(0.3, 1.0);
  EXPECT_LT(max_normalized_deviation(beamform_compensated(cube, grid, motion),
                                     beamform_fast(cube, grid, motion)),
            1e-12);
}

// With matched steering (spherical wavefront, per-sample wavenumber) the W
// summed chirps add in phase, while independent noise adds in power.
TEST(Beamform, CoherentGainGrowsWithWindow) {
  const RadarConfig cfg = test::small_config(128);
  const Reflector refl{3.0, deg2rad(40.0), 0.0, 1.0};
  SimulationOptions sim;
  sim.pattern = RadiationPattern::omni();
  const RawCube signal = simulate(std::span(&refl, 1), {}, cfg, sim);
  sim.noise_std = 1.0;
  sim.seed = 17;
  const RawCube noise = simulate({}, {}, cfg, sim);
  ImagingGrid grid = local_grid(deg2rad(40.0), 8, 1, 128);
  grid.azimuth_bins = 15;
  grid.azimuth_min_rad = refl.azimuth_rad - 7.5 * deg2rad(0.1);
  grid.azimuth_max_rad = refl.azimuth_rad + 7.5 * deg2rad(0.1);
  grid.elevation_min_rad = -1e-3;
  grid.elevation_max_rad = 1e-3;

  auto measure = [&](double fov) {
    BeamformOptions opts;
    opts.fov_window_rad = fov;
    opts.focus_range_m = refl.range_m;
    opts.wideband_steering = true;
    const double peak = beamform_static(signal, grid, opts).max_value();
    const Heatmap3D n = beamform_static(noise, grid, opts);
    double power = 0.0;
    for (double v : n.values()) power += v * v;
    return std::pair{peak, std::sqrt(power / n.values().size())};
  };
  const auto [p1, n1] = measure(deg2rad(30.0));
  const auto [p3, n3] = measure(deg2rad(90.0));
  const double w_ratio = 300.0 / 100.0;
  EXPECT_NEAR(p3 / p1, w_ratio, 0.05 * w_ratio);
  EXPECT_NEAR(n3 / n1, std::sqrt(w_ratio), 0.05 * std::sqrt(w_ratio));
}

TEST(Beamform, ArgmaxInvariantToAmplitude) {
  const RadarConfig cfg = test::small_config(64);
  const auto grid = local_grid(deg2rad(100.0), 8, 8, 64);
  HeatmapIndex ref{};
  for (double amp : {0.01, 1.0, 250.0}) {
    const Heatmap3D heat = beamform_fast(single(cfg, {1.7, deg2rad(100.5), 0.05, amp}), grid,
                                         MotionEstimate::stationary());
    const auto idx = heat.argmax();
    if (amp == 0.01) ref = idx;
    EXPECT_EQ(idx.azimuth, ref.azimuth);
    EXPECT_EQ(idx.elevation, ref.elevation);
    EXPECT_EQ(idx.range, ref.range);
  }
}

TEST(Beamform, RejectsGridBeyondSamples) {
  const RadarConfig cfg = test::small_config(32);
  const RawCube cube(cfg, 0);
  EXPECT_THROW(beamform_static(cube, local_grid(1.0, 2, 2, 64)), InputError);
  BeamformOptions opts;
  opts.focus_range_m = 0.05;
  EXPECT_THROW(beamform_static(cube, local_grid(1.0, 2, 2, 16), opts), InputError);
}

TEST(Heatmap, VoxelPosition) {
  RadarConfig cfg = RadarConfig::defaults();
  Heatmap3D heat(local_grid(1.0, 2, 2, 8), cfg);
  const Position3 p = heat.voxel_position(kPi / 2, 0.0, 2.0);
  EXPECT_LT((p - Position3(0.0, 2.0, 0.0)).norm(), 1e-12);

  heat.set_platform_motion({0.4, 0.0, 0.0}, true);
  // Look time a quarter turn in: 0.125 s, displacement 5 cm across the beam.
  EXPECT_LT((heat.voxel_position(kPi / 2, 0.0, 2.0) - Position3(0.05, 2.0, 0.0)).norm(), 1e-12);
  // Along the beam the migrated range already holds the displacement.
  EXPECT_LT((heat.voxel_position(0.0, 0.0, 2.0) - Position3(2.0, 0.0, 0.0)).norm(), 1e-12);
  heat.set_platform_motion({0.4, 0.0, 0.0}, false);
  EXPECT_LT((heat.voxel_position(kPi / 2, 0.0, 2.0) - Position3(0.05, 2.0, 0.0)).norm(), 1e-12);
}

TEST(HeatmapIo, RoundTrip) {
  const RadarConfig cfg = test::small_config(32);
  test::Gen g(44);
  Heatmap3D heat(local_grid(0.5, 3, 4, 16), cfg);
  for (auto& v : heat.values()) v = g.uniform(0.0, 10.0);
  heat.set_platform_motion({0.1, -0.2, 0.0}, false);
  std::stringstream ss;
  write_heatmap(ss, heat);
  const Heatmap3D back = read_heatmap(ss);
  EXPECT_EQ(back.grid().azimuth_bins, 6);
  EXPECT_EQ(back.grid().azimuth_min_rad, heat.grid().azimuth_min_rad);
  EXPECT_EQ(back.grid().elevation_bins, 4);
  EXPECT_EQ(back.range_bin_m(), heat.range_bin_m());
  EXPECT_EQ(back.platform_velocity(), heat.platform_velocity());
  EXPECT_FALSE(back.range_migrated());
  for (std::size_t i = 0; i < heat.values().size(); ++i) {
    EXPECT_EQ(back.values()[i], static_cast<float>(heat.values()[i]));
  }
}

TEST(PeakRangeImage, TopRowIsHighestElevation) {
  const RadarConfig cfg = test::small_config(32);
  Heatmap3D heat(local_grid(0.5, 1, 3, 16), cfg);
  heat.at(0, 2, 5) = 7.0;
  heat.at(1, 0, 9) = 3.0;
  const auto img = peak_range_image(heat);
  EXPECT_EQ(img.rows, 3);
  EXPECT_EQ(img.cols, 2);
  EXPECT_NEAR(img.range_m[0], 5 * heat.range_bin_m(), 1e-15);
  EXPECT_EQ(img.magnitude[0], 7.0);
  EXPECT_NEAR(img.range_m[2 * 2 + 1], 9 * heat.range_bin_m(), 1e-15);
  std::ostringstream pgm;
  write_peak_pgm(pgm, img);
  EXPECT_EQ(pgm.str().rfind("P2\n2 3\n255\n", 0), 0u);
}

}  // namespace
}  // namespace cylrad
