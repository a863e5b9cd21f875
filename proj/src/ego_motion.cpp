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

#include "cylrad/ego_motion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/Dense>

#include "cylrad/errors.hpp"
#include "cylrad/text_format.hpp"

namespace cylrad {

RangeProfiles range_fft_chirps(const RawCube& cube, int antenna) {
  if (antenna < 0 || antenna >= cube.antennas()) throw InputError("antenna index out of range");
  const int T = cube.chirps();
  const int N = cube.samples();
  RangeProfiles out{T, N, std::vector<cplx>(static_cast<std::size_t>(T) * N)};
  const auto window = make_window(WindowKind::Hann, N);
#pragma omp parallel
  {
    std::vector<cplx> buf(N);
#pragma omp for schedule(static)
    for (int t = 0; t < T; ++t) {
      const auto chirp = cube.chirp(antenna, t);
      for (int n = 0; n < N; ++n) buf[n] = chirp[n] * window[n];
      fft_forward(buf, std::span<cplx>(out.data.data() + static_cast<std::size_t>(t) * N, N));
    }
  }
  return out;
}

std::vector<cplx> compensate_rotation(std::span<const cplx> slow_time, std::span<const double> times,
                                      const RadarConfig& cfg, double t_c) {
  if (times.size() != slow_time.size()) throw InputError("compensate_rotation: size mismatch");
  const double k = 2.0 * kTwoPi * cfg.rotation_radius_m / cfg.center_wavelength_m();
  std::vector<cplx> out(slow_time.size());
  for (std::size_t i = 0; i < slow_time.size(); ++i) {
    out[i] = slow_time[i] *
             std::polar(1.0, k * std::cos(cfg.angular_speed_rad_s * (t_c - times[i])));
  }
  return out;
}

double Spectrogram::tc(int w) const {
  return (w * hop + 0.5 * (window_len - 1)) * chirp_interval_s;
}

double Spectrogram::bin_hz() const { return 1.0 / (chirp_interval_s * nfft); }

double Spectrogram::freq(int f) const { return (f - nfft / 2) * bin_hz(); }

double Spectrogram::noise_floor() const {
  if (magnitudes.empty()) return 0.0;
  std::vector<double> tmp(magnitudes);
  auto mid = tmp.begin() + static_cast<std::ptrdiff_t>(tmp.size() / 2);
  std::nth_element(tmp.begin(), mid, tmp.end());
  return *mid;
}

double Spectrogram::detection_threshold(double factor) const { return factor * noise_floor(); }

Spectrogram build_spectrogram(const RangeProfiles& profiles, const RadarConfig& cfg, int range_bin,
                              const SpectrogramParams& params) {
  if (range_bin < 0 || range_bin >= profiles.bins) throw InputError("range bin out of range");
  if (params.window_len < 2 || params.hop < 1 || params.zero_pad < 1) {
    throw InputError("spectrogram window_len >= 2, hop >= 1, zero_pad >= 1 required");
  }
  if (params.window_len > profiles.chirps) {
    throw InputError("spectrogram window of " + std::to_string(params.window_len) +
                     " chirps exceeds the " + std::to_string(profiles.chirps) + " available");
  }
  Spectrogram spec;
  spec.window_len = params.window_len;
  spec.hop = params.hop;
  spec.nfft = next_pow2(params.window_len * params.zero_pad);
  spec.windows = (profiles.chirps - params.window_len) / params.hop + 1;
  spec.range_bin = range_bin;
  spec.chirp_interval_s = cfg.chirp_interval_s();
  spec.magnitudes.assign(static_cast<std::size_t>(spec.windows) * spec.nfft, 0.0);

  const auto taper = make_window(WindowKind::Hann, params.window_len);
  const int g_lo = std::max(0, range_bin - params.gate_halfwidth);
  const int g_hi = std::min(profiles.bins - 1, range_bin + params.gate_halfwidth);
  std::vector<double> times(params.window_len);
  std::vector<cplx> seg(params.window_len);
  std::vector<cplx> padded(spec.nfft), out(spec.nfft);

  for (int w = 0; w < spec.windows; ++w) {
    const int start = w * params.hop;
    const double t_c = spec.tc(w);
    for (int m = 0; m < params.window_len; ++m) times[m] = cfg.chirp_time_s(start + m);
    std::vector<double> power(spec.nfft, 0.0);
    for (int g = g_lo; g <= g_hi; ++g) {
      for (int m = 0; m < params.window_len; ++m) seg[m] = profiles.at(start + m, g);
      const auto comp = compensate_rotation(seg, times, cfg, t_c);
      std::fill(padded.begin(), padded.end(), cplx{});
      for (int m = 0; m < params.window_len; ++m) padded[m] = comp[m] * taper[m];
      fft_forward(padded, out);
      for (int f = 0; f < spec.nfft; ++f) {
        power[(f + spec.nfft / 2) % spec.nfft] += std::norm(out[f]);
      }
    }
    for (int f = 0; f < spec.nfft; ++f) spec.at(w, f) = std::sqrt(power[f]);
  }
  return spec;
}

Spectrogram build_spectrogram(const RawCube& cube, int range_bin, const SpectrogramParams& params) {
  return build_spectrogram(range_fft_chirps(cube, 0), cube.config(), range_bin, params);
}

void write_spectrogram_csv(std::ostream& os, const Spectrogram& spec) {
  os << "t_c_s";
  for (int f = 0; f < spec.nfft; ++f) os << "," << format_double(spec.freq(f));
  os << "\n";
  for (int w = 0; w < spec.windows; ++w) {
    os << format_double(spec.tc(w));
    for (int f = 0; f < spec.nfft; ++f) os << "," << format_double(spec.at(w, f));
    os << "\n";
  }
}

double line_slope_hz_per_s(const RadarConfig& cfg) {
  const double w = cfg.angular_speed_rad_s;
  return 2.0 * w * w * cfg.rotation_radius_m / cfg.center_wavelength_m();
}

namespace {

struct RidgeSample {
  int window;
  int bin;
  double tc;
  double freq;
  double power;
};

// Sub-bin peak offset from three magnitudes using a Gaussian (log-parabola) fit.
double interpolate_peak(double left, double center, double right) {
  if (left <= 0.0 || right <= 0.0 || center <= 0.0) return 0.0;
  const double l = std::log(left);
  const double c = std::log(center);
  const double r = std::log(right);
  const double denom = l - 2.0 * c + r;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

std::vector<RidgeSample> trace_ridge(const Spectrogram& spec, double slope, double intercept,
                                     int search, double floor) {
  std::vector<RidgeSample> ridge;
  const double bin_hz = spec.bin_hz();
  for (int w = 0; w < spec.windows; ++w) {
    const double tc = spec.tc(w);
    const double f_pred = intercept + slope * tc;
    const int center = static_cast<int>(std::lround(f_pred / bin_hz)) + spec.nfft / 2;
    if (center < 0 || center >= spec.nfft) continue;
    int best = -1;
    double best_mag = floor;
    for (int b = std::max(0, center - search); b <= std::min(spec.nfft - 1, center + search); ++b) {
      if (spec.at(w, b) > best_mag) {
        best_mag = spec.at(w, b);
        best = b;
      }
    }
    if (best < 0) continue;
    double offset = 0.0;
    if (best > 0 && best + 1 < spec.nfft) {
      offset = interpolate_peak(spec.at(w, best - 1), best_mag, spec.at(w, best + 1));
    }
    ridge.push_back({w, best, tc, spec.freq(best) + offset * bin_hz, best_mag * best_mag});
  }
  return ridge;
}

// Vertex of a least-squares parabola through (x, ln y); nullopt-like NaN when
// the fit is not concave.
double log_parabola_vertex(std::span<const RidgeSample> pts) {
  if (pts.size() < 3) return std::nan("");
  const double x0 = pts[pts.size() / 2].tc;
  Eigen::MatrixXd M(static_cast<Eigen::Index>(pts.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = pts[i].tc - x0;
    M(static_cast<Eigen::Index>(i), 0) = 1.0;
    M(static_cast<Eigen::Index>(i), 1) = x;
    M(static_cast<Eigen::Index>(i), 2) = x * x;
    y(static_cast<Eigen::Index>(i)) = std::log(pts[i].power);
  }
  const Eigen::Vector3d c = M.colPivHouseholderQr().solve(y);
  if (!(c(2) < 0.0)) return std::nan("");
  return x0 - c(1) / (2.0 * c(2));
}

}  // namespace

std::vector<LineDetection> detect_lines(const Spectrogram& spec, const RadarConfig& cfg,
                                        double threshold, const LineParams& params) {
  if (spec.windows <= 0 || spec.nfft <= 0 || spec.magnitudes.empty()) {
    throw InputError("detect_lines: empty spectrogram");
  }
  const double slope = line_slope_hz_per_s(cfg);
  const double floor = spec.detection_threshold(params.floor_factor);
  const double bin_hz = spec.bin_hz();
  const double f_min = spec.freq(0);
  const double f_max = spec.freq(spec.nfft - 1);
  const double c_min = f_min - slope * spec.tc(spec.windows - 1);
  const double c_max = f_max - slope * spec.tc(0);
  const int cells = static_cast<int>(std::ceil((c_max - c_min) / bin_hz)) + 1;

  std::vector<double> acc(static_cast<std::size_t>(cells), 0.0);
  bool any = false;
  for (int w = 0; w < spec.windows; ++w) {
    const double shift = slope * spec.tc(w);
    for (int f = 0; f < spec.nfft; ++f) {
      const double m = spec.at(w, f);
      if (!(m > floor)) continue;
      const auto idx = static_cast<int>(std::lround((spec.freq(f) - shift - c_min) / bin_hz));
      if (idx >= 0 && idx < cells) {
        acc[idx] += m;
        any = true;
      }
    }
  }
  if (!any) return {};

  // Hann mainlobe half-width in zero-padded bins.
  const int radius = std::max(1, static_cast<int>(std::ceil(2.0 * spec.nfft / spec.window_len)));
  const double global = *std::max_element(acc.begin(), acc.end());
  std::vector<int> maxima;
  for (int i = 0; i < cells; ++i) {
    if (!(acc[i] >= threshold * global) || acc[i] <= 0.0) continue;
    bool is_max = true;
    for (int d = -radius; d <= radius && is_max; ++d) {
      const int j = i + d;
      if (d == 0 || j < 0 || j >= cells) continue;
      is_max = d < 0 ? acc[i] > acc[j] : acc[i] >= acc[j];
    }
    if (is_max) maxima.push_back(i);
  }

  std::vector<LineDetection> lines;
  for (int i : maxima) {
    const double coarse = c_min + i * bin_hz;
    const auto ridge = trace_ridge(spec, slope, coarse, radius, floor);
    if (ridge.empty()) continue;
    const auto strongest = std::max_element(
        ridge.begin(), ridge.end(), [](const auto& a, const auto& b) { return a.power < b.power; });
    const double p_max = strongest->power;

    // Contiguous run of ridge windows around the strongest one.
    auto lo = strongest;
    auto hi = strongest;
    while (lo != ridge.begin() && std::prev(lo)->window == lo->window - 1 &&
           std::prev(lo)->power >= params.profile_fraction * p_max) {
      --lo;
    }
    while (std::next(hi) != ridge.end() && std::next(hi)->window == hi->window + 1 &&
           std::next(hi)->power >= params.profile_fraction * p_max) {
      ++hi;
    }

    double wsum = 0.0;
    double isum = 0.0;
    for (auto it = lo; it <= hi; ++it) {
      wsum += it->power;
      isum += it->power * (it->freq - slope * it->tc);
    }
    const double intercept = isum / wsum;

    std::vector<RidgeSample> core;
    for (auto it = lo; it <= hi; ++it) {
      if (it->power >= 0.25 * p_max) core.push_back(*it);
    }
    double tc_peak = log_parabola_vertex(core);
    if (!std::isfinite(tc_peak)) tc_peak = strongest->tc;
    tc_peak = std::clamp(tc_peak, lo->tc, hi->tc);

    LineDetection det;
    det.intercept_hz = intercept;
    det.support = acc[i];
    det.peak_tc = tc_peak;
    det.peak_f = intercept + slope * tc_peak;
    det.peak_power = p_max;
    det.peak_window = strongest->window;
    det.peak_bin = strongest->bin;
    det.truncated = lo->window == 0 || hi->window == spec.windows - 1;
    lines.push_back(det);
  }

  // Split accumulator peaks can refine onto the same ridge; keep the strongest.
  std::sort(lines.begin(), lines.end(),
            [](const auto& a, const auto& b) { return a.support > b.support; });
  std::vector<LineDetection> unique;
  for (const auto& l : lines) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const auto& u) {
      return std::abs(u.intercept_hz - l.intercept_hz) < radius * bin_hz;
    });
    if (!dup) unique.push_back(l);
  }
  return unique;
}

namespace {

struct SinusoidFit {
  double alpha = 0.0;
  double beta = 0.0;
};

double model(const SinusoidFit& m, double phase) {
  return m.alpha * std::cos(phase) + m.beta * std::sin(phase);
}

struct Hypothesis {
  int inliers = -1;
  double cost = 0.0;
  SinusoidFit fit;
};

bool least_squares(std::span<const SpectralPeak> peaks, std::span<const int> subset, double w,
                   SinusoidFit& out) {
  Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
  Eigen::Vector2d atb = Eigen::Vector2d::Zero();
  for (int idx : subset) {
    const double ph = w * peaks[idx].tc;
    const Eigen::Vector2d row(std::cos(ph), std::sin(ph));
    ata += row * row.transpose();
    atb += row * peaks[idx].freq_hz;
  }
  // Observations spanning a single direction (mod pi) cannot separate alpha and beta.
  if (std::abs(ata.determinant()) < 1e-9 * std::max(1.0, ata.trace() * ata.trace())) return false;
  const Eigen::Vector2d x = ata.ldlt().solve(atb);
  out = {x(0), x(1)};
  return true;
}

std::vector<int> inliers_of(std::span<const SpectralPeak> peaks, const SinusoidFit& fit, double w,
                            double thr) {
  std::vector<int> idx;
  for (int k = 0; k < static_cast<int>(peaks.size()); ++k) {
    if (std::abs(peaks[k].freq_hz - model(fit, w * peaks[k].tc)) <= thr) idx.push_back(k);
  }
  return idx;
}

}  // namespace

MotionEstimate estimate_motion(std::span<const SpectralPeak> peaks, const RadarConfig& cfg,
                               const RansacParams& params) {
  const int n = static_cast<int>(peaks.size());
  if (n < 2) {
    throw NumericalError("motion estimation needs at least 2 peaks, got " + std::to_string(n));
  }
  if (!(params.inlier_threshold_hz > 0.0)) throw InputError("inlier threshold must be > 0");
  const double w = cfg.angular_speed_rad_s;
  const double thr = params.inlier_threshold_hz;
  const int batch = std::max(1, params.batch_size);
  const int batches = std::max(1, (params.iterations + batch - 1) / batch);

  std::vector<Hypothesis> best_per_batch(static_cast<std::size_t>(batches));
#pragma omp parallel for schedule(static)
  for (int b = 0; b < batches; ++b) {
    std::mt19937_64 rng(derive_seed(params.seed, static_cast<std::uint64_t>(b)));
    std::uniform_int_distribution<int> pick(0, n - 1);
    Hypothesis best;
    const int count = std::min(batch, params.iterations - b * batch);
    for (int it = 0; it < count; ++it) {
      const int i = pick(rng);
      int j = pick(rng);
      if (i == j) j = (j + 1) % n;
      const double pi = w * peaks[i].tc;
      const double pj = w * peaks[j].tc;
      const double det = std::sin(pj - pi);
      if (std::abs(det) < 0.1) continue;
      // Cramer's rule on [cos pi, sin pi; cos pj, sin pj] [alpha; beta] = [fi; fj].
      SinusoidFit fit{(peaks[i].freq_hz * std::sin(pj) - peaks[j].freq_hz * std::sin(pi)) / det,
                      (peaks[j].freq_hz * std::cos(pi) - peaks[i].freq_hz * std::cos(pj)) / det};
      int inl = 0;
      double cost = 0.0;
      for (const auto& p : peaks) {
        const double r = p.freq_hz - model(fit, w * p.tc);
        if (std::abs(r) <= thr) {
          ++inl;
          cost += r * r;
        }
      }
      if (inl > best.inliers || (inl == best.inliers && cost < best.cost)) best = {inl, cost, fit};
    }
    best_per_batch[b] = best;
  }

  Hypothesis best;
  for (const auto& h : best_per_batch) {
    if (h.inliers > best.inliers || (h.inliers == best.inliers && h.cost < best.cost)) best = h;
  }

  std::vector<int> inliers;
  SinusoidFit fit;
  if (best.inliers < 0) {
    // Every sample was degenerate; fall back to a plain fit on all peaks.
    inliers.resize(n);
    std::iota(inliers.begin(), inliers.end(), 0);
    if (!least_squares(peaks, inliers, w, fit)) {
      throw NumericalError("peaks do not constrain the velocity (all at one azimuth)");
    }
  } else {
    fit = best.fit;
    inliers = inliers_of(peaks, fit, w, thr);
  }
  for (int round = 0; round < params.refinement_rounds; ++round) {
    SinusoidFit refined;
    if (inliers.size() < 2 || !least_squares(peaks, inliers, w, refined)) break;
    fit = refined;
    auto next = inliers_of(peaks, fit, w, thr);
    if (next == inliers) break;
    inliers = std::move(next);
  }

  double ss = 0.0;
  for (int idx : inliers) {
    const double r = peaks[idx].freq_hz - model(fit, w * peaks[idx].tc);
    ss += r * r;
  }

  MotionEstimate est;
  est.inlier_count = static_cast<int>(inliers.size());
  est.residual_rms_hz = inliers.empty() ? 0.0 : std::sqrt(ss / inliers.size());
  est.speed_m_s = 0.5 * cfg.center_wavelength_m() * std::hypot(fit.alpha, fit.beta);
  // f = -(2v/lambda) cos(theta_v - w t): alpha = -(2v/lambda) cos theta_v, beta likewise with sin.
  est.heading_rad = wrap_two_pi(std::atan2(-fit.beta, -fit.alpha));
  est.low_confidence = est.inlier_count < params.min_inlier_ratio * n;
  if (est.speed_m_s < params.min_speed_m_s) {
    est.speed_m_s = 0.0;
    est.heading_rad = wrap_two_pi(params.previous_heading_rad);
    est.degenerate = true;
  }
  return est;
}

std::vector<int> select_gates(const RangeProfiles& profiles, const RadarConfig& cfg, int max_gates,
                              double min_range_m) {
  std::vector<double> energy(static_cast<std::size_t>(profiles.bins), 0.0);
  for (int t = 0; t < profiles.chirps; ++t) {
    for (int k = 0; k < profiles.bins; ++k) energy[k] += std::norm(profiles.at(t, k));
  }
  std::vector<int> cand;
  const double bin_m = cfg.range_resolution_m();
  for (int k = 0; k < profiles.bins; ++k) {
    if (k * bin_m < min_range_m || energy[k] <= 0.0) continue;
    const bool left_ok = k == 0 || energy[k] >= energy[k - 1];
    const bool right_ok = k + 1 == profiles.bins || energy[k] > energy[k + 1];
    if (left_ok && right_ok) cand.push_back(k);
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [&](int a, int b) { return energy[a] > energy[b]; });
  if (static_cast<int>(cand.size()) > max_gates) cand.resize(static_cast<std::size_t>(max_gates));
  return cand;
}

MotionPipelineResult estimate_motion_from_cube(const RawCube& cube,
                                               const MotionPipelineParams& params) {
  const RadarConfig& cfg = cube.config();
  MotionPipelineResult result;
  const auto profiles = range_fft_chirps(cube, params.antenna);
  result.gates = select_gates(profiles, cfg, params.max_gates, params.min_gate_range_m);

  result.spectrograms.resize(result.gates.size());
  std::vector<std::vector<LineDetection>> lines(result.gates.size());
#pragma omp parallel for schedule(dynamic)
  for (int g = 0; g < static_cast<int>(result.gates.size()); ++g) {
    result.spectrograms[g] = build_spectrogram(profiles, cfg, result.gates[g], params.spectrogram);
    lines[g] = detect_lines(result.spectrograms[g], cfg, params.line_threshold, params.lines);
  }
  for (const auto& gate_lines : lines) {
    for (const auto& l : gate_lines) {
      if (!l.truncated) result.peaks.push_back({l.peak_tc, l.peak_f, l.peak_power});
    }
  }

  RansacParams ransac = params.ransac;
  if (params.threshold_from_bins && !result.spectrograms.empty()) {
    ransac.inlier_threshold_hz = 2.0 * result.spectrograms.front().bin_hz();
  }
  result.estimate = estimate_motion(result.peaks, cfg, ransac);
  return result;
}

}  // namespace cylrad
