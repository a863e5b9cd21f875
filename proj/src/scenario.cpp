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

#include "cylrad/scenario.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "cylrad/errors.hpp"
#include "cylrad/text_format.hpp"

namespace cylrad {

Reflector ReflectorSpec::to_reflector() const {
  return {range_m, deg2rad(azimuth_deg), deg2rad(elevation_deg), amplitude};
}

std::vector<Reflector> Scenario::scene() const {
  std::vector<Reflector> out;
  out.reserve(reflectors.size());
  for (const auto& r : reflectors) out.push_back(r.to_reflector());
  return out;
}

Trajectory Scenario::trajectory() const { return {speed_m_s, deg2rad(heading_deg)}; }

SimulationOptions Scenario::simulation_options() const {
  SimulationOptions o;
  o.pattern = pattern;
  o.noise_std = noise_std;
  o.seed = require_seed();
  return o;
}

std::uint64_t Scenario::require_seed() const {
  if (!seed) throw InputError("scenario has no seed; every stochastic step needs one");
  return *seed;
}

void Scenario::validate() const {
  cfg.validate();
  grid.validate();
  require_seed();
  if (!(noise_std >= 0.0)) throw InputError("noise_std must be >= 0");
  if (!(speed_m_s >= 0.0)) throw InputError("speed_m_s must be >= 0");
  for (const auto& r : reflectors) {
    if (!(r.range_m > 0.0)) throw InputError("reflector range must be > 0");
  }
}

namespace {

bool parse_bool(const std::string& v, const std::string& ctx) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError(ctx + ": expected true or false, got '" + v + "'");
}

ReflectorSpec parse_reflector(const std::string& v, const std::string& ctx) {
  std::istringstream ss(v);
  ss.imbue(std::locale::classic());
  std::vector<double> vals;
  std::string tok;
  while (ss >> tok) vals.push_back(parse_double(tok, ctx));
  if (vals.size() < 3 || vals.size() > 4) {
    throw InputError(ctx + ": expected 'range_m azimuth_deg elevation_deg [amplitude]'");
  }
  return {vals[0], vals[1], vals[2], vals.size() == 4 ? vals[3] : 1.0};
}

bool apply_scenario_key(Scenario& s, const std::string& key, const std::string& value) {
  const std::string ctx = "key '" + key + "'";
  auto num = [&] { return parse_double(value, ctx); };
  auto count = [&] { return static_cast<int>(parse_int(value, ctx)); };
  if (key == "reflector") {
    s.reflectors.push_back(parse_reflector(value, ctx));
  } else if (key == "seed") {
    s.seed = parse_uint64(value, ctx);
  } else if (key == "noise_std") {
    s.noise_std = num();
  } else if (key == "speed_m_s") {
    s.speed_m_s = num();
  } else if (key == "heading_deg") {
    s.heading_deg = num();
  } else if (key == "fov_window_deg") {
    s.cfg.fov_window_rad = deg2rad(num());
  } else if (key == "pattern") {
    if (value == "omni") {
      s.pattern = RadiationPattern::omni();
    } else if (value == "cosine") {
      s.pattern = RadiationPattern::cosine_power();
    } else {
      throw InputError(ctx + ": expected 'omni' or 'cosine'");
    }
  } else if (key == "pattern_beamwidth_deg") {
    s.pattern = RadiationPattern::cosine_power(deg2rad(num()), s.pattern.fov_cutoff_rad);
  } else if (key == "pattern_cutoff_deg") {
    s.pattern.fov_cutoff_rad = deg2rad(num());
  } else if (key == "pattern_cutoff_rad") {
    s.pattern.fov_cutoff_rad = num();
  } else if (key == "pattern_exponent") {
    s.pattern.exponent = num();
  } else if (key == "azimuth_bins") {
    s.grid.azimuth_bins = count();
  } else if (key == "elevation_bins") {
    s.grid.elevation_bins = count();
  } else if (key == "range_bins") {
    s.grid.range_bins = count();
  } else if (key == "azimuth_min_rad") {
    s.grid.azimuth_min_rad = num();
  } else if (key == "azimuth_max_rad") {
    s.grid.azimuth_max_rad = num();
  } else if (key == "elevation_min_rad") {
    s.grid.elevation_min_rad = num();
  } else if (key == "elevation_max_rad") {
    s.grid.elevation_max_rad = num();
  } else if (key == "azimuth_min_deg") {
    s.grid.azimuth_min_rad = deg2rad(num());
  } else if (key == "azimuth_max_deg") {
    s.grid.azimuth_max_rad = deg2rad(num());
  } else if (key == "elevation_min_deg") {
    s.grid.elevation_min_rad = deg2rad(num());
  } else if (key == "elevation_max_deg") {
    s.grid.elevation_max_rad = deg2rad(num());
  } else if (key == "cfar_guard") {
    s.cfar.guard = count();
  } else if (key == "cfar_train") {
    s.cfar.train = count();
  } else if (key == "cfar_pfa") {
    s.cfar.pfa = num();
  } else if (key == "cfar_min_relative_db") {
    if (value == "none") {
      s.cfar.min_relative_db.reset();
    } else {
      s.cfar.min_relative_db = num();
    }
  } else if (key == "compensate_motion") {
    s.compensate_motion = parse_bool(value, ctx);
  } else if (key == "beamformer") {
    if (value != "fast" && value != "direct") throw InputError(ctx + ": expected 'fast' or 'direct'");
    s.fast_beamforming = value == "fast";
  } else {
    return false;
  }
  return true;
}

}  // namespace

Scenario read_scenario(std::istream& is, const std::string& source) {
  const auto lines = parse_key_values(is, source);
  if (lines.empty() || lines.front().key != "schema") {
    throw InputError(where(source, lines.empty() ? 1 : lines.front().line) +
                     ": first entry must be 'schema = " + kScenarioSchema + "'");
  }
  if (lines.front().value != kScenarioSchema) {
    throw InputError(where(source, lines.front().line) + ": unsupported schema '" +
                     lines.front().value + "', expected '" + kScenarioSchema + "'");
  }
  Scenario s;
  bool heights_given = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& kv = lines[i];
    try {
      if (kv.key == "schema") throw InputError("duplicate schema entry");
      if (!apply_config_key(s.cfg, kv.key, kv.value) && !apply_scenario_key(s, kv.key, kv.value)) {
        throw InputError("unknown key '" + kv.key + "'");
      }
    } catch (const InputError& e) {
      throw InputError(where(source, kv.line) + ": " + e.what());
    }
    heights_given |= kv.key == "antenna_heights_m";
  }
  if (!heights_given) s.cfg.set_uniform_antennas(8);
  if (!s.seed) throw InputError(source + ": missing mandatory 'seed' entry");
  try {
    s.validate();
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario '" + path + "'");
  return read_scenario(in, path);
}

void write_scenario(std::ostream& os, const Scenario& s) {
  auto d = [](double v) { return format_double(v); };
  os << "schema = " << kScenarioSchema << "\n";
  os << "seed = " << s.require_seed() << "\n";
  write_config(os, s.cfg);
  os << "noise_std = " << d(s.noise_std) << "\n";
  os << "speed_m_s = " << d(s.speed_m_s) << "\n";
  os << "heading_deg = " << d(s.heading_deg) << "\n";
  if (s.pattern.model == RadiationPattern::Model::Omni) {
    os << "pattern = omni\n";
  } else {
    os << "pattern = cosine\n";
    os << "pattern_exponent = " << d(s.pattern.exponent) << "\n";
  }
  os << "pattern_cutoff_rad = " << d(s.pattern.fov_cutoff_rad) << "\n";
  os << "azimuth_bins = " << s.grid.azimuth_bins << "\n";
  os << "elevation_bins = " << s.grid.elevation_bins << "\n";
  os << "range_bins = " << s.grid.range_bins << "\n";
  os << "azimuth_min_rad = " << d(s.grid.azimuth_min_rad) << "\n";
  os << "azimuth_max_rad = " << d(s.grid.azimuth_max_rad) << "\n";
  os << "elevation_min_rad = " << d(s.grid.elevation_min_rad) << "\n";
  os << "elevation_max_rad = " << d(s.grid.elevation_max_rad) << "\n";
  os << "cfar_guard = " << s.cfar.guard << "\n";
  os << "cfar_train = " << s.cfar.train << "\n";
  os << "cfar_pfa = " << d(s.cfar.pfa) << "\n";
  os << "cfar_min_relative_db = "
     << (s.cfar.min_relative_db ? d(*s.cfar.min_relative_db) : std::string("none")) << "\n";
  os << "compensate_motion = " << (s.compensate_motion ? "true" : "false") << "\n";
  os << "beamformer = " << (s.fast_beamforming ? "fast" : "direct") << "\n";
  for (const auto& r : s.reflectors) {
    os << "reflector = " << d(r.range_m) << " " << d(r.azimuth_deg) << " " << d(r.elevation_deg)
       << " " << d(r.amplitude) << "\n";
  }
}

}  // namespace cylrad
