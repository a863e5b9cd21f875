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

#include <sstream>

#include "cylrad/errors.hpp"
#include "cylrad/scenario.hpp"
#include "cylrad/text_format.hpp"
#include "test_support.hpp"

namespace cylrad {
namespace {

Scenario parse(const std::string& text) {
  std::istringstream is(text);
  return read_scenario(is, "t.scn");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(Scenario, ParsesEntries) {
  const Scenario s = parse(
      "# comment\n"
      "schema = cylrad-scenario/1\n"
      "seed = 42\n"
      "speed_m_s = 0.25\n"
      "heading_deg = 30\n"
      "noise_std = 0.1\n"
      "reflector = 2.0 90 5\n"
      "reflector = 3.5 180 -2 0.5\n"
      "pattern = omni\n"
      "azimuth_bins = 64\n"
      "cfar_min_relative_db = none\n"
      "compensate_motion = false\n"
      "beamformer = direct\n");
  EXPECT_EQ(s.require_seed(), 42u);
  ASSERT_EQ(s.reflectors.size(), 2u);
  EXPECT_EQ(s.reflectors[0].amplitude, 1.0);
  EXPECT_EQ(s.reflectors[1].amplitude, 0.5);
  const auto scene = s.scene();
  EXPECT_NEAR(scene[0].azimuth_rad, kPi / 2, 1e-15);
  EXPECT_NEAR(scene[0].elevation_rad, deg2rad(5.0), 1e-15);
  EXPECT_NEAR(s.trajectory().heading_rad, kPi / 6, 1e-15);
  EXPECT_EQ(s.trajectory().speed_m_s, 0.25);
  EXPECT_EQ(s.pattern.model, RadiationPattern::Model::Omni);
  EXPECT_EQ(s.grid.azimuth_bins, 64);
  EXPECT_FALSE(s.cfar.min_relative_db.has_value());
  EXPECT_FALSE(s.compensate_motion);
  EXPECT_FALSE(s.fast_beamforming);
  EXPECT_EQ(s.simulation_options().seed, 42u);
  EXPECT_EQ(s.simulation_options().noise_std, 0.1);
}

TEST(Scenario, SeedIsMandatory) {
  const std::string msg = error_of("schema = cylrad-scenario/1\nreflector = 2 0 0\n");
  EXPECT_NE(msg.find("seed"), std::string::npos) << msg;
  Scenario s;
  EXPECT_THROW(s.require_seed(), InputError);
  EXPECT_THROW(s.validate(), InputError);
}

TEST(Scenario, SchemaMustComeFirst) {
  EXPECT_NE(error_of("seed = 1\nschema = cylrad-scenario/1\n").find("t.scn:1:"), std::string::npos);
  EXPECT_NE(error_of("schema = cylrad-scenario/9\nseed = 1\n").find("unsupported schema"), std::string::npos);
  EXPECT_FALSE(error_of("").empty());
  EXPECT_NE(error_of("schema = cylrad-scenario/1\nseed = 1\nschema = cylrad-scenario/1\n").find("t.scn:3:"),
            std::string::npos);
}

TEST(Scenario, ErrorsCarryLineNumbers) {
  const std::string base = "schema = cylrad-scenario/1\nseed = 1\n\n# note\n";
  EXPECT_NE(error_of(base + "bogus_key = 3\n").find("t.scn:5:"), std::string::npos);
  EXPECT_NE(error_of(base + "reflector = 1 2\n").find("t.scn:5:"), std::string::npos);
  EXPECT_NE(error_of(base + "speed_m_s = fast\n").find("t.scn:5:"), std::string::npos);
  EXPECT_NE(error_of(base + "beamformer = gpu\n").find("t.scn:5:"), std::string::npos);
  EXPECT_FALSE(error_of(base + "speed_m_s = -1\n").empty());
  EXPECT_FALSE(error_of(base + "reflector = -2 0 0\n").empty());
}

TEST(Scenario, CanonicalRoundTrip) {
  test::Gen g(91);
  for (int trial = 0; trial < 20; ++trial) {
    Scenario s;
    s.seed = g.bits();
    s.speed_m_s = g.uniform(0.0, 0.6);
    s.heading_deg = g.uniform(0.0, 360.0);
    s.noise_std = g.uniform(0.0, 0.2);
    s.grid.azimuth_bins = g.integer(8, 600);
    s.grid.elevation_min_rad = -g.uniform(0.1, 0.7);
    s.cfar.pfa = g.uniform(1e-6, 1e-2);
    if (g.coin()) s.cfar.min_relative_db.reset();
    if (g.coin()) s.pattern = RadiationPattern::omni();
    s.compensate_motion = g.coin();
    s.cfg.rotation_radius_m = g.uniform(0.02, 0.2);
    for (int i = g.integer(0, 6); i > 0; --i) {
      s.reflectors.push_back({g.uniform(0.5, 8.0), g.uniform(0.0, 360.0), g.uniform(-10.0, 10.0),
                              g.uniform(0.1, 2.0)});
    }
    std::ostringstream first;
    write_scenario(first, s);
    const Scenario back = parse(first.str());
    std::ostringstream second;
    write_scenario(second, back);
    EXPECT_EQ(first.str(), second.str());
    EXPECT_EQ(back.require_seed(), s.require_seed());
    EXPECT_EQ(back.heading_deg, s.heading_deg);
    EXPECT_EQ(back.cfg.rotation_radius_m, s.cfg.rotation_radius_m);
    ASSERT_EQ(back.reflectors.size(), s.reflectors.size());
    for (std::size_t i = 0; i < s.reflectors.size(); ++i) {
      EXPECT_EQ(back.reflectors[i].azimuth_deg, s.reflectors[i].azimuth_deg);
    }
  }
}

TEST(Scenario, ShippedScenariosLoad) {
  for (const char* name : {"static_room", "moving_room", "golden_small"}) {
    const Scenario s = load_scenario(test::source_path(std::string("scenarios/") + name + ".scn"));
    EXPECT_FALSE(s.reflectors.empty()) << name;
  }
  EXPECT_THROW(load_scenario("/nonexistent/x.scn"), InputError);
}

// Regression pin for the simulated capture of the golden scenario. A change
// here means the simulator output changed; rerun and review before updating.
TEST(Scenario, GoldenCubeChecksum) {
  const Scenario s = load_scenario(test::source_path("scenarios/golden_small.scn"));
  const RawCube cube = simulate(s.scene(), s.trajectory(), s.cfg, s.simulation_options());
  const auto data = cube.data();
  const unsigned long long h = fnv1a64(data.data(), data.size_bytes());
  EXPECT_EQ(h, 0x5d2da2bc571ddd38ULL) << std::hex << h;
}

TEST(Scenario, EmptySceneWithoutNoiseIsZero) {
  Scenario s = parse("schema = cylrad-scenario/1\nseed = 5\nsamples_per_chirp = 32\nmax_range_m = 1.2\n");
  const RawCube cube = simulate(s.scene(), s.trajectory(), s.cfg, s.simulation_options());
  for (const auto& v : cube.data()) ASSERT_EQ(v, cplx(0.0, 0.0));
}

}  // namespace
}  // namespace cylrad
