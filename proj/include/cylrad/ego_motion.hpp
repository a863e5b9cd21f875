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
#include <span>
#include <vector>

#include "cylrad/fft.hpp"
#include "cylrad/motion_estimate.hpp"
#include "cylrad/radar_config.hpp"
#include "cylrad/scene.hpp"

namespace cylrad {

/// Per-chirp range spectra of one antenna, indexed (chirp, range bin).
struct RangeProfiles {
  int chirps = 0;
  int bins = 0;
  std::vector<cplx> data;

  cplx at(int t, int k) const { return data[static_cast<std::size_t>(t) * bins + k]; }
};

/// Hann-windowed fast-time FFT of every chirp of antenna `antenna`.
RangeProfiles range_fft_chirps(const RawCube& cube, int antenna = 0);

/**
 * Multiplies slow-time samples by exp(j 4 pi r cos(w (t_c - t)) / lambda),
 * removing the rotation-induced phase curvature around window center t_c.
 * `times` holds the chirp time of every sample.
 */
std::vector<cplx> compensate_rotation(std::span<const cplx> slow_time, std::span<const double> times,
                                      const RadarConfig& cfg, double t_c);

struct SpectrogramParams {
  int window_len = 100;
  int hop = 25;
  /// FFT length = next power of two >= window_len * zero_pad.
  int zero_pad = 4;
  /// Neighbouring gates on each side whose power is added, so a reflector
  /// drifting across a gate boundary keeps a symmetric ridge profile.
  int gate_halfwidth = 1;
};

/**
 * Compensated slow-time spectrogram of one range gate. Rows are window
 * centers t_c, columns are FFT bins ordered from -PRF/2 upward.
 */
struct Spectrogram {
  int windows = 0;
  int nfft = 0;
  int window_len = 0;
  int hop = 0;
  int range_bin = 0;
  double chirp_interval_s = 0.0;
  std::vector<double> magnitudes;

  double at(int w, int f) const { return magnitudes[static_cast<std::size_t>(w) * nfft + f]; }
  double& at(int w, int f) { return magnitudes[static_cast<std::size_t>(w) * nfft + f]; }
  double tc(int w) const;
  double freq(int f) const;
  double bin_hz() const;

  /// Median magnitude, used as the noise floor.
  double noise_floor() const;
  /// Cells above this level count as detections (factor times the noise floor).
  double detection_threshold(double factor = 4.0) const;
};

Spectrogram build_spectrogram(const RangeProfiles& profiles, const RadarConfig& cfg, int range_bin,
                              const SpectrogramParams& params = {});
Spectrogram build_spectrogram(const RawCube& cube, int range_bin,
                              const SpectrogramParams& params = {});

/// Writes the spectrogram as CSV: header `t_c_s,<freq>...`, one row per window.
void write_spectrogram_csv(std::ostream& os, const Spectrogram& spec);

struct LineDetection {
  /// Frequency (Hz) of the line at t_c = 0; slope is fixed at 2 w^2 r / lambda.
  double intercept_hz = 0.0;
  double support = 0.0;
  /// Refined location of the strongest response along the line.
  double peak_tc = 0.0;
  double peak_f = 0.0;
  double peak_power = 0.0;
  /// Strongest cell on the line (window, frequency bin).
  int peak_window = 0;
  int peak_bin = 0;
  /// The ridge runs into the first or last window, so its peak may be cut off.
  bool truncated = false;
};

struct LineParams {
  /// Cells count only above noise_floor * floor_factor.
  double floor_factor = 4.0;
  /// Ridge columns used for refinement must exceed this fraction of the
  /// strongest ridge power.
  double profile_fraction = 0.1;
};

/// Slope of every reflector line in the compensated spectrogram (Hz per s).
double line_slope_hz_per_s(const RadarConfig& cfg);

/**
 * Fixed-slope Hough transform over the spectrogram. Lines whose accumulator
 * exceeds `threshold` times the global maximum are returned, strongest first.
 */
std::vector<LineDetection> detect_lines(const Spectrogram& spec, const RadarConfig& cfg,
                                        double threshold, const LineParams& params = {});

/// One (t_c*, f*) observation of the Doppler sinusoid.
struct SpectralPeak {
  double tc = 0.0;
  double freq_hz = 0.0;
  double weight = 1.0;
};

struct RansacParams {
  int iterations = 500;
  int batch_size = 50;
  double inlier_threshold_hz = 9.375;
  std::uint64_t seed = 1;
  double min_inlier_ratio = 0.3;
  /// Below this speed the heading is unobservable and the estimate is degenerate.
  double min_speed_m_s = 0.005;
  double previous_heading_rad = 0.0;
  /// Least-squares refits on the inlier set after consensus.
  int refinement_rounds = 3;
};

/**
 * Robust fit of f = -2 v cos(theta_v - w t_c) / lambda to peak observations:
 * RANSAC on two-point samples, then least squares in the linear basis
 * f = alpha cos(w t_c) + beta sin(w t_c). Throws NumericalError on fewer than
 * two peaks.
 */
MotionEstimate estimate_motion(std::span<const SpectralPeak> peaks, const RadarConfig& cfg,
                               const RansacParams& params = {});

struct MotionPipelineParams {
  SpectrogramParams spectrogram;
  LineParams lines;
  double line_threshold = 0.2;
  int max_gates = 8;
  double min_gate_range_m = 0.5;
  int antenna = 0;
  RansacParams ransac;
  /// When true the RANSAC inlier threshold is set to two spectral bins.
  bool threshold_from_bins = true;
};

struct MotionPipelineResult {
  MotionEstimate estimate;
  std::vector<int> gates;
  std::vector<SpectralPeak> peaks;
  std::vector<Spectrogram> spectrograms;
};

/// Gates that are local maxima of slow-time energy beyond the minimum range,
/// strongest first.
std::vector<int> select_gates(const RangeProfiles& profiles, const RadarConfig& cfg, int max_gates,
                              double min_range_m);

/// Range FFT, gate selection, spectrograms, line detection, robust fit.
MotionPipelineResult estimate_motion_from_cube(const RawCube& cube,
                                               const MotionPipelineParams& params = {});

}  // namespace cylrad
