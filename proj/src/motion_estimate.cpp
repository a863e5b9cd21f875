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

#include "cylrad/motion_estimate.hpp"

#include <cmath>
#include <sstream>

#include "cylrad/errors.hpp"
#include "cylrad/radar_config.hpp"
#include "cylrad/text_format.hpp"

namespace cylrad {

MotionEstimate MotionEstimate::from_velocity(double speed_m_s, double heading_rad) {
  MotionEstimate m;
  m.speed_m_s = speed_m_s;
  m.heading_rad = wrap_two_pi(heading_rad);
  return m;
}

Eigen::Vector3d MotionEstimate::velocity() const {
  return {speed_m_s * std::cos(heading_rad), speed_m_s * std::sin(heading_rad), 0.0};
}

std::string format_motion_record(const MotionEstimate& m) {
  std::ostringstream os;
  os << "speed_m_s=" << format_double(m.speed_m_s) << " heading_rad=" << format_double(m.heading_rad)
     << " inliers=" << m.inlier_count << " residual_rms_hz=" << format_double(m.residual_rms_hz)
     << " degenerate=" << (m.degenerate ? 1 : 0) << " low_confidence=" << (m.low_confidence ? 1 : 0);
  return os.str();
}

MotionEstimate parse_motion_record(const std::string& line) {
  MotionEstimate m;
  std::istringstream is(line);
  std::string token;
  bool have_speed = false;
  bool have_heading = false;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw InputError("motion record: malformed token '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    const std::string ctx = "motion record field '" + key + "'";
    if (key == "speed_m_s") {
      m.speed_m_s = parse_double(value, ctx);
      have_speed = true;
    } else if (key == "heading_rad") {
      m.heading_rad = parse_double(value, ctx);
      have_heading = true;
    } else if (key == "inliers") {
      m.inlier_count = static_cast<int>(parse_int(value, ctx));
    } else if (key == "residual_rms_hz") {
      m.residual_rms_hz = parse_double(value, ctx);
    } else if (key == "degenerate") {
      m.degenerate = parse_int(value, ctx) != 0;
    } else if (key == "low_confidence") {
      m.low_confidence = parse_int(value, ctx) != 0;
    } else {
      throw InputError("motion record: unknown field '" + key + "'");
    }
  }
  if (!have_speed || !have_heading) {
    throw InputError("motion record needs speed_m_s and heading_rad");
  }
  if (m.speed_m_s < 0.0) throw InputError("motion record: negative speed");
  return m;
}

}  // namespace cylrad
