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

#include "cylrad/radar_config.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "cylrad/errors.hpp"
#include "cylrad/text_format.hpp"

namespace cylrad {

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod can return exactly 2*pi after the correction for tiny negatives.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double wrap_pi(double angle) {
  double w = wrap_two_pi(angle + kPi) - kPi;
  return w;
}

RadarConfig RadarConfig::defaults() {
  RadarConfig cfg;
  cfg.set_uniform_antennas(8);
  return cfg;
}

void RadarConfig::set_uniform_antennas(int count, double first_height_m) {
  antenna_heights_m.resize(static_cast<std::size_t>(count));
  for (int a = 0; a < count; ++a) {
    antenna_heights_m[a] = first_height_m + a * wavelength_m / 2.0;
  }
}

void RadarConfig::validate() const {
  if (!(rotation_radius_m > 0.0)) throw InputError("rotation_radius_m must be > 0");
  if (!(angular_speed_rad_s > 0.0)) throw InputError("angular_speed_rad_s must be > 0");
  if (!(wavelength_m > 0.0)) throw InputError("wavelength_m must be > 0");
  if (!(bandwidth_hz > 0.0)) throw InputError("bandwidth_hz must be > 0");
  if (samples_per_chirp < 2) throw InputError("samples_per_chirp must be >= 2");
  if (chirps_per_rotation < 2) throw InputError("chirps_per_rotation must be >= 2");
  if (!(max_range_m > 0.0)) throw InputError("max_range_m must be > 0");
  if (!(fov_window_rad > 0.0 && fov_window_rad <= kTwoPi)) {
    throw InputError("fov_window_rad must lie in (0, 2*pi]");
  }
  if (antenna_heights_m.empty()) throw InputError("antenna_heights_m must not be empty");
  const double spacing = wavelength_m / 2.0;
  for (std::size_t a = 1; a < antenna_heights_m.size(); ++a) {
    const double step = antenna_heights_m[a] - antenna_heights_m[a - 1];
    if (!(step > 0.0)) throw InputError("antenna_heights_m must be strictly increasing");
    if (std::abs(step - spacing) > 1e-12 * spacing) {
      throw InputError("antenna_heights_m spacing must equal wavelength_m / 2");
    }
  }
}

void Direction::validate() const {
  if (!(azimuth_rad >= 0.0 && azimuth_rad < kTwoPi)) {
    throw InputError("direction azimuth must lie in [0, 2*pi)");
  }
  if (!(elevation_rad >= -kPi / 2.0 && elevation_rad <= kPi / 2.0)) {
    throw InputError("direction elevation must lie in [-pi/2, pi/2]");
  }
}

Position3 antenna_position(const RadarConfig& cfg, int a, double t) {
  if (a < 0 || a >= cfg.num_antennas()) {
    throw InputError("antenna index " + std::to_string(a) + " out of range [0, " +
                     std::to_string(cfg.num_antennas()) + ")");
  }
  const double angle = cfg.angular_speed_rad_s * t;
  return {cfg.rotation_radius_m * std::cos(angle), cfg.rotation_radius_m * std::sin(angle),
          cfg.antenna_heights_m[a]};
}

UnitVec3 direction_vector(const Direction& d) {
  const double ce = std::cos(d.elevation_rad);
  return {ce * std::cos(d.azimuth_rad), ce * std::sin(d.azimuth_rad), std::sin(d.elevation_rad)};
}

ResolutionReport theoretical_resolutions(const RadarConfig& cfg) {
  return {0.36 * cfg.wavelength_m / cfg.rotation_radius_m, 1.98 / cfg.num_antennas(),
          cfg.range_resolution_m()};
}

void write_config(std::ostream& os, const RadarConfig& cfg) {
  os << "rotation_radius_m = " << format_double(cfg.rotation_radius_m) << "\n";
  os << "angular_speed_rad_s = " << format_double(cfg.angular_speed_rad_s) << "\n";
  os << "antenna_heights_m = ";
  for (std::size_t a = 0; a < cfg.antenna_heights_m.size(); ++a) {
    os << (a ? ", " : "") << format_double(cfg.antenna_heights_m[a]);
  }
  os << "\n";
  os << "wavelength_m = " << format_double(cfg.wavelength_m) << "\n";
  os << "bandwidth_hz = " << format_double(cfg.bandwidth_hz) << "\n";
  os << "samples_per_chirp = " << cfg.samples_per_chirp << "\n";
  os << "chirps_per_rotation = " << cfg.chirps_per_rotation << "\n";
  os << "max_range_m = " << format_double(cfg.max_range_m) << "\n";
  os << "fov_window_rad = " << format_double(cfg.fov_window_rad) << "\n";
}

bool apply_config_key(RadarConfig& cfg, const std::string& key, const std::string& value) {
  const std::string ctx = "key '" + key + "'";
  if (key == "rotation_radius_m") {
    cfg.rotation_radius_m = parse_double(value, ctx);
  } else if (key == "angular_speed_rad_s") {
    cfg.angular_speed_rad_s = parse_double(value, ctx);
  } else if (key == "antenna_heights_m") {
    cfg.antenna_heights_m = parse_double_list(value, ctx);
  } else if (key == "wavelength_m") {
    cfg.wavelength_m = parse_double(value, ctx);
  } else if (key == "bandwidth_hz") {
    cfg.bandwidth_hz = parse_double(value, ctx);
  } else if (key == "samples_per_chirp") {
    cfg.samples_per_chirp = static_cast<int>(parse_int(value, ctx));
  } else if (key == "chirps_per_rotation") {
    cfg.chirps_per_rotation = static_cast<int>(parse_int(value, ctx));
  } else if (key == "max_range_m") {
    cfg.max_range_m = parse_double(value, ctx);
  } else if (key == "fov_window_rad") {
    cfg.fov_window_rad = parse_double(value, ctx);
  } else {
    return false;
  }
  return true;
}

RadarConfig read_config(std::istream& is, const std::string& source_name) {
  RadarConfig cfg = RadarConfig::defaults();
  bool heights_given = false;
  for (const auto& kv : parse_key_values(is, source_name)) {
    try {
      if (!apply_config_key(cfg, kv.key, kv.value)) {
        throw InputError("unknown key '" + kv.key + "'");
      }
    } catch (const InputError& e) {
      throw InputError(where(source_name, kv.line) + ": " + e.what());
    }
    heights_given |= kv.key == "antenna_heights_m";
  }
  // A changed wavelength without explicit heights keeps the default array shape.
  if (!heights_given) cfg.set_uniform_antennas(8);
  cfg.validate();
  return cfg;
}

RadarConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  return read_config(in, path);
}

}  // namespace cylrad
