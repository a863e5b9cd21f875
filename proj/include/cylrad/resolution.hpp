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

#include <iosfwd>
#include <span>
#include <vector>

#include "cylrad/radar_config.hpp"
#include "cylrad/scene.hpp"

namespace cylrad {

/// Normalized power response |E(theta_s)|^2 over beam offsets theta_s.
struct BeamCurve {
  std::vector<double> thetas;
  std::vector<double> response;
  /// Set when the offset step exceeds 1/20 of the closed-form beamwidth.
  bool coarse = false;
};

/// Voltage response of the full circular aperture: 2 pi J0((4 pi r / lambda) sin(theta_s / 2)).
double beam_shape_analytic(double theta_s, double radius_m, double wavelength_m);

/// J0 argument x0 at which J0(x0)^2 = 1/2.
double half_power_argument();

/// Closed-form 3-dB width 4 asin(x0 lambda / (4 pi r)), about 0.36 lambda / r.
double analytic_beamwidth(double radius_m, double wavelength_m);

/// Evaluates the closed form on `thetas` as a normalized power curve.
BeamCurve analytic_curve(std::span<const double> thetas, double radius_m, double wavelength_m);

/// `n` evenly spaced offsets covering [-half_span, half_span].
std::vector<double> offset_grid(double half_span_rad, int n);

/**
 * Simpson quadrature of
 *   E(theta_s) = int g(theta) exp{j 2 pi r (cos theta - cos(theta - theta_s)) / lambda} dtheta
 * over antenna angles within fov_window/2 of the steering offset theta_s, for
 * a far reflector at azimuth 0 seen through the pattern g.
 */
BeamCurve beam_shape_numeric(double radius_m, double wavelength_m, double fov_window_rad,
                             const RadiationPattern& pattern, std::span<const double> thetas,
                             int nodes_per_turn = 8192);

/// Distance between the half-power crossings around the global maximum,
/// linearly interpolated. Throws NumericalError if a crossing is missing.
double beamwidth_3db(const BeamCurve& curve);

/// CSV with header `theta_rad,response`.
void write_beam_curve_csv(std::ostream& os, const BeamCurve& curve);

struct FovSweepRow {
  double fov_rad = 0.0;
  double beamwidth_rad = 0.0;
};

std::vector<FovSweepRow> fov_sweep(double radius_m, double wavelength_m,
                                   std::span<const double> fovs_rad,
                                   const RadiationPattern& pattern, double half_span_rad,
                                   int samples);

struct TwoPointParams {
  double range_m = 1.0;
  double center_azimuth_rad = 1.0;
  RadiationPattern pattern = RadiationPattern::cosine_power();
  /// Required dip between the two peaks, in dB of power below the weaker peak.
  double saddle_db = 3.0;
  /// Focus the image on range_m (spherical wavefront).
  bool focused = true;
  /// Steer each fast-time sample with its own wavenumber.
  bool wideband = false;
};

struct TwoPointResult {
  bool resolved = false;
  /// Power dip between the two strongest local maxima (dB); 0 when only one peak.
  double saddle_db = 0.0;
  double peak_separation_rad = 0.0;
};

/**
 * Simulates two equal reflectors at `range_m` separated by `separation_rad`
 * in azimuth, images them with beamform_static on a fine local azimuth grid
 * at zero elevation, and checks for two maxima with a sufficient saddle.
 */
TwoPointResult two_point_experiment(const RadarConfig& cfg, double separation_rad,
                                    const TwoPointParams& params = {});
bool measure_resolution_two_point(const RadarConfig& cfg, double separation_rad,
                                  const TwoPointParams& params = {});

/// Bisection for the smallest resolved separation in [lo, hi] to within `tol`.
double min_resolved_separation(const RadarConfig& cfg, double lo_rad, double hi_rad,
                               double tol_rad, const TwoPointParams& params = {});

}  // namespace cylrad
