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

#include "cylrad/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "binary_container.hpp"
#include "cylrad/errors.hpp"
#include "cylrad/text_format.hpp"

namespace cylrad {

namespace {

constexpr double kMaxSpeedMs = 2.0;

// y += w * x over n complex samples; written on the interleaved doubles so the
// compiler vectorizes it without the NaN-recovery path of complex multiply.
inline void caxpy(cplx w, const cplx* x, cplx* y, int n) {
  const double wr = w.real();
  const double wi = w.imag();
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  for (int k = 0; k < n; ++k) {
    const double xr = xs[2 * k];
    const double xi = xs[2 * k + 1];
    ys[2 * k] += wr * xr - wi * xi;
    ys[2 * k + 1] += wr * xi + wi * xr;
  }
}

// y += w rho^n x over n samples: a weight whose phase advances linearly
// along fast time.
inline void caxpy_chirped(cplx w, cplx rho, const cplx* x, cplx* y, int n) {
  for (int k = 0; k < n; ++k) {
    y[k] += w * x[k];
    w *= rho;
  }
}

// Accumulates x into y with the steering phase of path length `geom` (m).
struct Steering {
  double k0 = 0.0;       // 4 pi f0 / c
  double k_step = 0.0;   // per-sample wavenumber increment, 0 when narrowband
  int samples = 0;

  void add(double geom, const cplx* x, cplx* y) const {
    const cplx w = std::polar(1.0, k0 * geom);
    if (k_step == 0.0) {
      caxpy(w, x, y, samples);
    } else {
      caxpy_chirped(w, std::polar(1.0, k_step * geom), x, y, samples);
    }
  }
};

Steering make_steering(const RadarConfig& cfg, const BeamformOptions& opts, int samples) {
  Steering s;
  s.k0 = 2.0 * kTwoPi / cfg.wavelength_m;
  s.samples = samples;
  if (opts.wideband_steering) s.k_step = 2.0 * kTwoPi * cfg.bandwidth_hz / (kSpeedOfLight * samples);
  return s;
}

// Excess of the spherical path from a point at `focus` along the look
// direction over its plane-wave approximation; `along` is d . p, `sq` is |p|^2.
inline double focus_excess(double focus, double along, double sq) {
  return std::sqrt(focus * focus - 2.0 * focus * along + sq) - (focus - along);
}

void check_inputs(const RawCube& cube, const ImagingGrid& grid, const MotionEstimate& motion) {
  grid.validate();
  if (cube.antennas() == 0) throw InputError("empty cube");
  if (grid.range_bins > cube.samples()) {
    throw InputError("grid has " + std::to_string(grid.range_bins) +
                     " range bins but chirps carry only " + std::to_string(cube.samples()) +
                     " samples");
  }
  if (!(motion.speed_m_s >= 0.0 && motion.speed_m_s < kMaxSpeedMs)) {
    throw InputError("motion speed must lie in [0, 2) m/s");
  }
}

RadarConfig effective_config(const RawCube& cube, const BeamformOptions& opts) {
  RadarConfig cfg = cube.config();
  if (opts.fov_window_rad) {
    cfg.fov_window_rad = *opts.fov_window_rad;
    cfg.validate();
  }
  if (opts.focus_range_m && !(*opts.focus_range_m > cfg.rotation_radius_m)) {
    throw InputError("focus range must exceed the rotation radius");
  }
  return cfg;
}

struct BeamFinalizer {
  const RadarConfig& cfg;
  const ImagingGrid& grid;
  const BeamformOptions& opts;
  Eigen::Vector3d velocity;
  int samples;
  std::vector<double> window;

  BeamFinalizer(const RadarConfig& c, const ImagingGrid& g, const BeamformOptions& o,
                const MotionEstimate& m, int n)
      : cfg(c), grid(g), opts(o), velocity(m.velocity()), samples(n),
        window(make_window(o.range_window, n)) {}

  // Range reference shift, fast-time window, FFT, magnitude.
  void operator()(int i, int j, std::span<cplx> beam, std::span<cplx> scratch,
                  Heatmap3D& heat) const {
    const double az = grid.azimuth(i);
    const double ce = std::cos(grid.elevation(j));
    double shift_m = 0.0;
    if (opts.range_migration && velocity.squaredNorm() > 0.0) {
      const double along = ce * (std::cos(az) * velocity.x() + std::sin(az) * velocity.y());
      shift_m += along * look_time_s(cfg, az);
    }
    if (opts.center_range_reference) shift_m += cfg.rotation_radius_m * ce;
    if (shift_m != 0.0) {
      const double shift_bins = shift_m / cfg.range_resolution_m();
      for (int n = 0; n < samples; ++n) {
        beam[n] *= std::polar(1.0, kTwoPi * shift_bins * n / samples);
      }
    }
    for (int n = 0; n < samples; ++n) beam[n] *= window[n];
    fft_forward(beam, scratch);
    auto ray = heat.ray(i, j);
    for (int k = 0; k < grid.range_bins; ++k) ray[k] = std::abs(scratch[k]);
  }
};

// Planar antenna-center track (rotation plus platform motion) per chirp.
struct PlanarTrack {
  std::vector<double> x;
  std::vector<double> y;
};

PlanarTrack planar_track(const RadarConfig& cfg, const Eigen::Vector3d& vel, int chirps) {
  PlanarTrack p{std::vector<double>(chirps), std::vector<double>(chirps)};
  for (int k = 0; k < chirps; ++k) {
    const double t = cfg.chirp_time_s(k);
    const double ang = cfg.angular_speed_rad_s * t;
    p.x[k] = cfg.rotation_radius_m * std::cos(ang) + vel.x() * t;
    p.y[k] = cfg.rotation_radius_m * std::sin(ang) + vel.y() * t;
  }
  return p;
}

}  // namespace

bool ImagingGrid::full_circle() const {
  return std::abs((azimuth_max_rad - azimuth_min_rad) - kTwoPi) < 1e-12;
}

void ImagingGrid::validate() const {
  if (azimuth_bins < 1 || elevation_bins < 1 || range_bins < 1) {
    throw InputError("imaging grid counts must be >= 1");
  }
  if (!(azimuth_max_rad > azimuth_min_rad) || azimuth_max_rad - azimuth_min_rad > kTwoPi + 1e-12) {
    throw InputError("azimuth extent must be non-empty and at most 2*pi");
  }
  if (!(elevation_max_rad > elevation_min_rad) || elevation_min_rad < -kPi / 2.0 ||
      elevation_max_rad > kPi / 2.0) {
    throw InputError("elevation extent must be non-empty and within [-pi/2, pi/2]");
  }
}

Heatmap3D::Heatmap3D(ImagingGrid grid, RadarConfig cfg)
    : grid_(grid),
      cfg_(std::move(cfg)),
      data_(static_cast<std::size_t>(grid.azimuth_bins) * grid.elevation_bins * grid.range_bins,
            0.0) {}

HeatmapIndex Heatmap3D::argmax() const {
  const auto it = std::max_element(data_.begin(), data_.end());
  const auto flat = static_cast<std::size_t>(it - data_.begin());
  HeatmapIndex idx;
  idx.range = static_cast<int>(flat % grid_.range_bins);
  idx.elevation = static_cast<int>((flat / grid_.range_bins) % grid_.elevation_bins);
  idx.azimuth = static_cast<int>(flat / (static_cast<std::size_t>(grid_.range_bins) *
                                         grid_.elevation_bins));
  return idx;
}

double Heatmap3D::max_value() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

void Heatmap3D::set_platform_motion(const Eigen::Vector3d& velocity, bool range_migrated) {
  velocity_ = velocity;
  range_migrated_ = range_migrated;
}

Position3 Heatmap3D::voxel_position(double azimuth_rad, double elevation_rad,
                                    double range_m) const {
  const UnitVec3 d = direction_vector({azimuth_rad, elevation_rad});
  const Eigen::Vector3d disp = velocity_ * look_time_s(cfg_, azimuth_rad);
  if (range_migrated_) return range_m * d + (disp - d.dot(disp) * d);
  return range_m * d + disp;
}

double look_time_s(const RadarConfig& cfg, double azimuth_rad) {
  return wrap_two_pi(azimuth_rad) / cfg.angular_speed_rad_s;
}

std::vector<int> summation_window(const RadarConfig& cfg, double azimuth_rad) {
  const int T = cfg.chirps_per_rotation;
  const double half = cfg.fov_window_rad / 2.0;
  std::vector<int> chirps;
  if (cfg.fov_window_rad >= kTwoPi) {
    chirps.resize(T);
    for (int k = 0; k < T; ++k) chirps[k] = k;
    return chirps;
  }
  const double per_chirp = kTwoPi / T;
  const double center = wrap_two_pi(azimuth_rad) / per_chirp;
  const int lo = static_cast<int>(std::floor(center - half / per_chirp)) - 1;
  const int hi = static_cast<int>(std::ceil(center + half / per_chirp)) + 1;
  for (int m = lo; m <= hi; ++m) {
    const int k = ((m % T) + T) % T;
    if (std::abs(wrap_pi(k * per_chirp - azimuth_rad)) <= half) chirps.push_back(k);
  }
  return chirps;
}

std::vector<double> range_profile(std::span<const cplx> beam, int range_bins, WindowKind window) {
  const int n = static_cast<int>(beam.size());
  if (range_bins > n) throw InputError("range_profile: more range bins than samples");
  const auto w = make_window(window, n);
  std::vector<cplx> buf(beam.begin(), beam.end());
  for (int k = 0; k < n; ++k) buf[k] *= w[k];
  const auto spec = fft_forward(buf);
  std::vector<double> mag(static_cast<std::size_t>(range_bins));
  for (int k = 0; k < range_bins; ++k) mag[k] = std::abs(spec[k]);
  return mag;
}

Heatmap3D beamform_static(const RawCube& cube, const ImagingGrid& grid,
                          const BeamformOptions& opts) {
  return beamform_compensated(cube, grid, MotionEstimate::stationary(), opts);
}

Heatmap3D beamform_compensated(const RawCube& cube, const ImagingGrid& grid,
                               const MotionEstimate& motion, const BeamformOptions& opts) {
  check_inputs(cube, grid, motion);
  const RadarConfig cfg = effective_config(cube, opts);
  const int A = cube.antennas();
  const int N = cube.samples();
  const int E = grid.elevation_bins;
  const Steering steer = make_steering(cfg, opts, N);
  const auto track = planar_track(cfg, motion.velocity(), cube.chirps());
  const BeamFinalizer finalize(cfg, grid, opts, motion, N);

  std::vector<double> sin_el(E), cos_el(E);
  for (int j = 0; j < E; ++j) {
    sin_el[j] = std::sin(grid.elevation(j));
    cos_el[j] = std::cos(grid.elevation(j));
  }

  Heatmap3D heat(grid, cfg);
  heat.set_platform_motion(motion.velocity(), opts.range_migration);
#pragma omp parallel
  {
    std::vector<cplx> acc(static_cast<std::size_t>(E) * N);
    std::vector<cplx> scratch(N);
#pragma omp for schedule(static)
    for (int i = 0; i < grid.azimuth_bins; ++i) {
      const double az = grid.azimuth(i);
      const double ca = std::cos(az);
      const double sa = std::sin(az);
      std::fill(acc.begin(), acc.end(), cplx{});
      for (int k : summation_window(cfg, az)) {
        const double planar = ca * track.x[k] + sa * track.y[k];
        const double sq = track.x[k] * track.x[k] + track.y[k] * track.y[k];
        for (int a = 0; a < A; ++a) {
          const cplx* s = cube.chirp(a, k).data();
          const double h = cfg.antenna_heights_m[a];
          for (int j = 0; j < E; ++j) {
            const double along = cos_el[j] * planar;
            double geom = along + sin_el[j] * h;
            if (opts.focus_range_m) geom -= focus_excess(*opts.focus_range_m, along, sq);
            steer.add(geom, s, acc.data() + static_cast<std::size_t>(j) * N);
          }
        }
      }
      for (int j = 0; j < E; ++j) {
        finalize(i, j, std::span<cplx>(acc.data() + static_cast<std::size_t>(j) * N, N), scratch,
                 heat);
      }
    }
  }
  return heat;
}

Heatmap3D beamform_fast(const RawCube& cube, const ImagingGrid& grid, const MotionEstimate& motion,
                        const BeamformOptions& opts) {
  check_inputs(cube, grid, motion);
  const RadarConfig cfg = effective_config(cube, opts);
  const int A = cube.antennas();
  const int T = cube.chirps();
  const int N = cube.samples();
  const Steering steer = make_steering(cfg, opts, N);
  const auto track = planar_track(cfg, motion.velocity(), T);
  const BeamFinalizer finalize(cfg, grid, opts, motion, N);

  std::vector<std::vector<int>> windows(grid.azimuth_bins);
  std::vector<char> needed(T, 0);
  for (int i = 0; i < grid.azimuth_bins; ++i) {
    windows[i] = summation_window(cfg, grid.azimuth(i));
    for (int k : windows[i]) needed[k] = 1;
  }

  Heatmap3D heat(grid, cfg);
  heat.set_platform_motion(motion.velocity(), opts.range_migration);
#pragma omp parallel
  {
    std::vector<cplx> elev_sum(static_cast<std::size_t>(T) * N);
    std::vector<cplx> acc(N);
    std::vector<cplx> scratch(N);
#pragma omp for schedule(static)
    for (int j = 0; j < grid.elevation_bins; ++j) {
      const double el = grid.elevation(j);
      const double se = std::sin(el);
      const double ce = std::cos(el);
      // Elevation step: S'_t = sum_a S^a_t exp(j 4 pi h^a sin(el) / lambda).
      std::fill(elev_sum.begin(), elev_sum.end(), cplx{});
      for (int a = 0; a < A; ++a) {
        const double geom = cfg.antenna_heights_m[a] * se;
        for (int k = 0; k < T; ++k) {
          if (!needed[k]) continue;
          steer.add(geom, cube.chirp(a, k).data(), elev_sum.data() + static_cast<std::size_t>(k) * N);
        }
      }
      // Azimuth and motion step over the planar components.
      for (int i = 0; i < grid.azimuth_bins; ++i) {
        const double az = grid.azimuth(i);
        const double ca = ce * std::cos(az);
        const double sa = ce * std::sin(az);
        std::fill(acc.begin(), acc.end(), cplx{});
        for (int k : windows[i]) {
          const double along = ca * track.x[k] + sa * track.y[k];
          double geom = along;
          if (opts.focus_range_m) {
            const double sq = track.x[k] * track.x[k] + track.y[k] * track.y[k];
            geom -= focus_excess(*opts.focus_range_m, along, sq);
          }
          steer.add(geom, elev_sum.data() + static_cast<std::size_t>(k) * N, acc.data());
        }
        finalize(i, j, acc, scratch, heat);
      }
    }
  }
  return heat;
}

namespace {
constexpr std::array<char, 4> kHeatMagic{'C', 'R', 'H', 'M'};
}

void write_heatmap(std::ostream& os, const Heatmap3D& heat) {
  const auto& g = heat.grid();
  detail::ContainerHeader h;
  h.magic = kHeatMagic;
  h.dims = {static_cast<std::uint32_t>(g.azimuth_bins), static_cast<std::uint32_t>(g.elevation_bins),
            static_cast<std::uint32_t>(g.range_bins)};
  const auto& cfg = heat.config();
  h.flags = heat.range_migrated() ? 1u : 0u;
  h.params = {g.azimuth_min_rad, g.azimuth_max_rad, g.elevation_min_rad, g.elevation_max_rad,
              cfg.bandwidth_hz, cfg.rotation_radius_m, cfg.angular_speed_rad_s,
              heat.platform_velocity().x(), heat.platform_velocity().y()};
  detail::write_header(os, h);
  const auto vals = heat.values();
  std::vector<float> buf(vals.begin(), vals.end());
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!os) throw InputError("failed writing heatmap");
}

Heatmap3D read_heatmap(std::istream& is) {
  const auto h = detail::read_header(is, kHeatMagic);
  ImagingGrid g;
  g.azimuth_bins = static_cast<int>(h.dims[0]);
  g.elevation_bins = static_cast<int>(h.dims[1]);
  g.range_bins = static_cast<int>(h.dims[2]);
  g.azimuth_min_rad = h.params[0];
  g.azimuth_max_rad = h.params[1];
  g.elevation_min_rad = h.params[2];
  g.elevation_max_rad = h.params[3];
  g.validate();
  RadarConfig cfg = RadarConfig::defaults();
  cfg.bandwidth_hz = h.params[4];
  cfg.rotation_radius_m = h.params[5];
  cfg.angular_speed_rad_s = h.params[6];
  cfg.validate();
  Heatmap3D heat(g, cfg);
  heat.set_platform_motion({h.params[7], h.params[8], 0.0}, (h.flags & 1u) != 0);
  std::vector<float> buf(heat.values().size());
  if (!is.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
    throw InputError("truncated heatmap payload");
  }
  std::copy(buf.begin(), buf.end(), heat.values().begin());
  return heat;
}

void save_heatmap(const std::string& path, const Heatmap3D& heat) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  write_heatmap(out, heat);
}

Heatmap3D load_heatmap(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open heatmap file '" + path + "'");
  return read_heatmap(in);
}

PeakRangeImage peak_range_image(const Heatmap3D& heat) {
  const auto& g = heat.grid();
  PeakRangeImage img{g.elevation_bins, g.azimuth_bins, {}, {}};
  img.range_m.resize(static_cast<std::size_t>(img.rows) * img.cols);
  img.magnitude.resize(img.range_m.size());
  for (int j = 0; j < g.elevation_bins; ++j) {
    const int row = g.elevation_bins - 1 - j;
    for (int i = 0; i < g.azimuth_bins; ++i) {
      const auto ray = heat.ray(i, j);
      const auto it = std::max_element(ray.begin(), ray.end());
      const auto cell = static_cast<std::size_t>(row) * img.cols + i;
      img.range_m[cell] = static_cast<double>(it - ray.begin()) * heat.range_bin_m();
      img.magnitude[cell] = *it;
    }
  }
  return img;
}

void write_peak_pgm(std::ostream& os, const PeakRangeImage& img) {
  const double peak = img.magnitude.empty()
                          ? 0.0
                          : *std::max_element(img.magnitude.begin(), img.magnitude.end());
  os << "P2\n" << img.cols << " " << img.rows << "\n255\n";
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      const double v = img.magnitude[static_cast<std::size_t>(r) * img.cols + c];
      const int level = peak > 0.0 ? static_cast<int>(std::lround(255.0 * v / peak)) : 0;
      os << level << (c + 1 < img.cols ? " " : "\n");
    }
  }
}

void write_peak_csv(std::ostream& os, const PeakRangeImage& img, const ImagingGrid& grid) {
  os << "azimuth_rad,elevation_rad,range_m,magnitude\n";
  for (int r = 0; r < img.rows; ++r) {
    const int j = grid.elevation_bins - 1 - r;
    for (int c = 0; c < img.cols; ++c) {
      const auto cell = static_cast<std::size_t>(r) * img.cols + c;
      os << format_double(grid.azimuth(c)) << "," << format_double(grid.elevation(j)) << ","
         << format_double(img.range_m[cell]) << "," << format_double(img.magnitude[cell]) << "\n";
    }
  }
}

}  // namespace cylrad
