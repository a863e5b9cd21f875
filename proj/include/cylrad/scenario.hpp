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
#include <string>
#include <vector>

#include "cylrad/imaging.hpp"
#include "cylrad/pointcloud.hpp"
#include "cylrad/radar_config.hpp"
#include "cylrad/scene.hpp"

namespace cylrad {

inline constexpr const char* kScenarioSchema = "cylrad-scenario/1";

/// Reflector as written in a scenario file: angles in degrees.
struct ReflectorSpec {
  double range_m = 0.0;
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double amplitude = 1.0;

  Reflector to_reflector() const;
};

/**
 * Everything needed to reproduce a simulated capture and its processing.
 * Angles that users type are kept in degrees so that writing a scenario back
 * out reproduces the exact same doubles.
 */
struct Scenario {
  RadarConfig cfg = RadarConfig::defaults();
  std::vector<ReflectorSpec> reflectors;
  double speed_m_s = 0.0;
  double heading_deg = 0.0;
  double noise_std = 0.0;
  std::optional<std::uint64_t> seed;
  RadiationPattern pattern = RadiationPattern::cosine_power();
  ImagingGrid grid;
  CfarParams cfar;
  bool compensate_motion = true;
  bool fast_beamforming = true;

  std::vector<Reflector> scene() const;
  Trajectory trajectory() const;
  SimulationOptions simulation_options() const;
  /// Seed with the mandatory check applied.
  std::uint64_t require_seed() const;
  void validate() const;
};

/**
 * Parses the `key = value` scenario format. The first entry must be
 * `schema = cylrad-scenario/1`; diagnostics carry `source:line:`.
 */
Scenario read_scenario(std::istream& is, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

/// Canonical form; read_scenario(write_scenario(s)) reproduces s exactly.
void write_scenario(std::ostream& os, const Scenario& s);

}  // namespace cylrad
