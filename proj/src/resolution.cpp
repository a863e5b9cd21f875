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

#include "cylrad/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include "cylrad/bessel.hpp"
#include "cylrad/errors.hpp"
#include "cylrad/imaging.hpp"
#include "cylrad/text_format.hpp"

namespace cylrad {

double beam_shape_analytic(double theta_s, double radius_m, double wavelength_m) {
  return kTwoPi * bessel_j0(2.0 * kTwoPi * radius_m / wavelength_m * std::sin(0.5 * theta_s));
}

double half_power_argument() {
  // J0 decreases monotonically on [0, 2.4]; bisect J0(x)^2 = 1/2.
  double lo = 0.0;
  double hi = 2.4;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double j = bessel_j0(mid);
    (j * j > 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double analytic_beamwidth(double radius_m, double wavelength_m) {
  if (!(radius_m > 0.0) || !(wavelength_m > 0.0)) throw InputError("radius and wavelength must be > 0");
  const double s = half_power_argument() * wavelength_m / (2.0 * kTwoPi * radius_m);
  if (s >= 1.0) throw NumericalError("aperture too small for a half-power crossing");
  return 4.0 * std::asin(s);
}

namespace {

void normalize(BeamCurve& c) {
  const double peak = c.response.empty() ? 0.0 : *std::max_element(c.response.begin(), c.response.end());
  if (!(peak > 0.0)) throw NumericalError("beam response is identically zero");
  for (double& v : c.response) v /= peak;
}

bool too_coarse(std::span<const double> thetas, double radius_m, double wavelength_m) {
  if (thetas.size() < 2 || !(radius_m > 0.0)) return false;
  const double s = half_power_argument() * wavelength_m / (2.0 * kTwoPi * radius_m);
  if (s >= 1.0) return false;
  const double ref = 4.0 * std::asin(s);
  double step = 0.0;
  for (std::size_t i = 1; i < thetas.size(); ++i) step = std::max(step, thetas[i] - thetas[i - 1]);
  return step > ref / 20.0;
}

}  // namespace

BeamCurve analytic_curve(std::span<const double> thetas, double radius_m, double wavelength_m) {
  BeamCurve c;
  c.thetas.assign(thetas.begin(), thetas.end());
  c.response.reserve(thetas.size());
  for (double t : thetas) {
    const double e = beam_shape_analytic(t, radius_m, wavelength_m);
    c.response.push_back(e * e);
  }
  normalize(c);
  c.coarse = too_coarse(thetas, radius_m, wavelength_m);
  return c;
}

std::vector<double> offset_grid(double half_span_rad, int n) {
  if (n < 2 || !(half_span_rad > 0.0)) throw InputError("offset grid needs n >= 2 and a positive span");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = -half_span_rad + 2.0 * half_span_rad * i / (n - 1);
  return g;
}

BeamCurve beam_shape_numeric(double radius_m, double wavelength_m, double fov_window_rad,
                             const RadiationPattern& pattern, std::span<const double> thetas,
                             int nodes_per_turn) {
  if (!(fov_window_rad > 0.0) || fov_window_rad > kTwoPi + 1e-12) {
    throw InputError("FOV window must lie in (0, 2*pi]");
  }
  if (!(radius_m >= 0.0) || !(wavelength_m > 0.0)) throw InputError("invalid radius or wavelength");
  if (nodes_per_turn < 2) throw InputError("quadrature needs at least 2 nodes per turn");
  int intervals = static_cast<int>(std::ceil(nodes_per_turn * fov_window_rad / kTwoPi));
  intervals = std::max(2, intervals + (intervals % 2));
  const double h = fov_window_rad / intervals;
  const double k = kTwoPi * radius_m / wavelength_m;

  BeamCurve c;
  c.thetas.assign(thetas.begin(), thetas.end());
  c.response.resize(thetas.size());
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < thetas.size(); ++s) {
    const double ts = thetas[s];
    const double start = ts - 0.5 * fov_window_rad;
    std::complex<double> sum{};
    for (int i = 0; i <= intervals; ++i) {
      const double th = start + i * h;
      const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double g = radiation_gain(pattern, wrap_pi(th));
      if (g == 0.0) continue;
      sum += w * g * std::polar(1.0, k * (std::cos(th) - std::cos(th - ts)));
    }
    sum *= h / 3.0;
    c.response[s] = std::norm(sum);
  }
  normalize(c);
  c.coarse = too_coarse(thetas, radius_m, wavelength_m);
  return c;
}

double beamwidth_3db(const BeamCurve& curve) {
  const auto& r = curve.response;
  const auto& t = curve.thetas;
  if (r.size() != t.size() || r.size() < 3) throw InputError("beam curve needs >= 3 samples");
  const auto peak_it = std::max_element(r.begin(), r.end());
  const auto p = static_cast<std::size_t>(peak_it - r.begin());
  const double half = 0.5 * *peak_it;

  std::size_t lo = p;
  while (lo > 0 && r[lo] >= half) --lo;
  std::size_t hi = p;
  while (hi + 1 < r.size() && r[hi] >= half) ++hi;
  if (r[lo] >= half || r[hi] >= half) {
    throw NumericalError("no half-power crossing within the curve extent");
  }
  auto cross = [&](std::size_t below, std::size_t above) {
    const double f = (half - r[below]) / (r[above] - r[below]);
    return t[below] + f * (t[above] - t[below]);
  };
  return cross(hi, hi - 1) - cross(lo, lo + 1);
}

void write_beam_curve_csv(std::ostream& os, const BeamCurve& curve) {
  os << "theta_rad,response\n";
  for (std::size_t i = 0; i < curve.thetas.size(); ++i) {
    os << format_double(curve.thetas[i]) << "," << format_double(curve.response[i]) << "\n";
  }
}

std::vector<FovSweepRow> fov_sweep(double radius_m, double wavelength_m,
                                   std::span<const double> fovs_rad,
                                   const RadiationPattern& pattern, double half_span_rad,
                                   int samples) {
  const auto grid = offset_grid(half_span_rad, samples);
  std::vector<FovSweepRow> rows;
  for (double fov : fovs_rad) {
    const auto curve = beam_shape_numeric(radius_m, wavelength_m, fov, pattern, grid);
    rows.push_back({fov, beamwidth_3db(curve)});
  }
  return rows;
}

TwoPointResult two_point_experiment(const RadarConfig& cfg, double separation_rad,
                                    const TwoPointParams& params) {
  if (!(separation_rad > 0.0)) throw InputError("separation must be > 0");
  const double c = params.center_azimuth_rad;
  const std::vector<Reflector> scene{{params.range_m, c - 0.5 * separation_rad, 0.0, 1.0},
                                     {params.range_m, c + 0.5 * separation_rad, 0.0, 1.0}};
  SimulationOptions so;
  so.pattern = params.pattern;
  const auto cube = simulate(scene, Trajectory{}, cfg, so);

  const double margin = std::max(deg2rad(2.0), separation_rad);
  const double step = std::min(separation_rad / 16.0, deg2rad(0.02));
  ImagingGrid grid;
  grid.azimuth_min_rad = c - 0.5 * separation_rad - margin;
  grid.azimuth_max_rad = c + 0.5 * separation_rad + margin;
  grid.azimuth_bins = static_cast<int>(std::ceil((grid.azimuth_max_rad - grid.azimuth_min_rad) / step));
  grid.elevation_bins = 1;
  grid.elevation_min_rad = -1e-3;
  grid.elevation_max_rad = 1e-3;
  grid.range_bins = cfg.samples_per_chirp;
  BeamformOptions opts;
  opts.wideband_steering = params.wideband;
  if (params.focused) opts.focus_range_m = params.range_m;
  const auto heat = beamform_static(cube, grid, opts);

  std::vector<double> profile(static_cast<std::size_t>(grid.azimuth_bins));
  for (int i = 0; i < grid.azimuth_bins; ++i) {
    const auto ray = heat.ray(i, 0);
    profile[i] = *std::max_element(ray.begin(), ray.end());
  }
  std::vector<int> maxima;
  for (int i = 1; i + 1 < grid.azimuth_bins; ++i) {
    if (profile[i] > profile[i - 1] && profile[i] >= profile[i + 1]) maxima.push_back(i);
  }
  std::sort(maxima.begin(), maxima.end(), [&](int a, int b) { return profile[a] > profile[b]; });

  TwoPointResult res;
  if (maxima.size() < 2) return res;
  const int a = std::min(maxima[0], maxima[1]);
  const int b = std::max(maxima[0], maxima[1]);
  const double weaker = std::min(profile[a], profile[b]);
  const double stronger = std::max(profile[a], profile[b]);
  const double saddle = *std::min_element(profile.begin() + a, profile.begin() + b + 1);
  res.saddle_db = 20.0 * std::log10(weaker / saddle);
  res.peak_separation_rad = grid.azimuth(b) - grid.azimuth(a);
  // A main lobe flanked by a sidelobe is not a resolved pair: the two peaks
  // must be of similar height and straddle the midpoint.
  const bool balanced = 20.0 * std::log10(stronger / weaker) < params.saddle_db;
  const bool straddle = grid.azimuth(a) < c && grid.azimuth(b) > c;
  res.resolved = balanced && straddle && res.saddle_db >= params.saddle_db;
  return res;
}

bool measure_resolution_two_point(const RadarConfig& cfg, double separation_rad,
                                  const TwoPointParams& params) {
  return two_point_experiment(cfg, separation_rad, params).resolved;
}

double min_resolved_separation(const RadarConfig& cfg, double lo_rad, double hi_rad,
                               double tol_rad, const TwoPointParams& params) {
  if (!(lo_rad > 0.0) || !(hi_rad > lo_rad) || !(tol_rad > 0.0)) {
    throw InputError("need 0 < lo < hi and tol > 0");
  }
  if (!measure_resolution_two_point(cfg, hi_rad, params)) {
    throw NumericalError("upper separation bound is not resolved");
  }
  if (measure_resolution_two_point(cfg, lo_rad, params)) return lo_rad;
  while (hi_rad - lo_rad > tol_rad) {
    const double mid = 0.5 * (lo_rad + hi_rad);
    (measure_resolution_two_point(cfg, mid, params) ? hi_rad : lo_rad) = mid;
  }
  return hi_rad;
}

}  // namespace cylrad
