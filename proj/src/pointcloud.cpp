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

#include "cylrad/pointcloud.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "cylrad/errors.hpp"
#include "cylrad/kdtree.hpp"
#include "cylrad/text_format.hpp"

namespace cylrad {

double cfar_scale(int cells, double pfa) {
  if (cells < 1) throw InputError("CFAR needs at least one training cell");
  if (!(pfa > 0.0 && pfa < 1.0)) throw InputError("pfa must lie in (0, 1)");
  return cells * (std::pow(pfa, -1.0 / cells) - 1.0);
}

std::vector<Detection> cfar_detect(const Heatmap3D& heat, const CfarParams& params) {
  if (params.train < 1 || params.guard < 0) throw InputError("CFAR needs train >= 1, guard >= 0");
  if (!(params.threshold_scale > 0.0)) throw InputError("CFAR threshold scale must be > 0");
  const auto& g = heat.grid();
  const int R = g.range_bins;
  const int span = params.guard + params.train;
  if (R < 2 * span + 1) {
    throw InputError("heatmap has " + std::to_string(R) + " range bins; CFAR window needs " +
                     std::to_string(2 * span + 1));
  }
  const double peak = heat.max_value();
  if (!(peak > 0.0)) return {};
  const double floor =
      params.min_relative_db ? peak * std::pow(10.0, -*params.min_relative_db / 20.0) : 0.0;

  std::vector<double> scale(static_cast<std::size_t>(2 * params.train + 1), 0.0);
  for (int m = 1; m <= 2 * params.train; ++m) {
    scale[m] = params.threshold_scale * cfar_scale(m, params.pfa);
  }

  std::vector<std::vector<Detection>> per_azimuth(static_cast<std::size_t>(g.azimuth_bins));
#pragma omp parallel
  {
    std::vector<double> prefix(static_cast<std::size_t>(R) + 1);
#pragma omp for schedule(static)
    for (int i = 0; i < g.azimuth_bins; ++i) {
      for (int j = 0; j < g.elevation_bins; ++j) {
        const auto ray = heat.ray(i, j);
        prefix[0] = 0.0;
        for (int k = 0; k < R; ++k) prefix[k + 1] = prefix[k] + ray[k] * ray[k];
        auto window_sum = [&](int lo, int hi, int& count) {  // cells [lo, hi]
          lo = std::max(lo, 0);
          hi = std::min(hi, R - 1);
          if (hi < lo) return 0.0;
          count += hi - lo + 1;
          return prefix[hi + 1] - prefix[lo];
        };
        for (int k = 0; k < R; ++k) {
          const double mag = ray[k];
          if (!(mag > floor)) continue;
          int m = 0;
          const double sum = window_sum(k - span, k - params.guard - 1, m) +
                             window_sum(k + params.guard + 1, k + span, m);
          if (m == 0) continue;
          if (mag * mag > scale[m] * sum / m) per_azimuth[i].push_back({{i, j, k}, mag});
        }
      }
    }
  }
  std::vector<Detection> out;
  for (auto& v : per_azimuth) out.insert(out.end(), v.begin(), v.end());
  return out;
}

PointCloud detections_to_cloud(const Heatmap3D& heat, std::span<const Detection> dets) {
  const auto& g = heat.grid();
  PointCloud cloud;
  cloud.points.reserve(dets.size());
  for (const auto& d : dets) {
    cloud.points.push_back({heat.voxel_position(g.azimuth(d.index.azimuth),
                                                g.elevation(d.index.elevation),
                                                d.index.range * heat.range_bin_m()),
                            d.magnitude});
  }
  return cloud;
}

PointCloud cfar_extract(const Heatmap3D& heat, const CfarParams& params) {
  return detections_to_cloud(heat, cfar_detect(heat, params));
}

std::vector<Cluster> cluster_detections(const Heatmap3D& heat, std::span<const Detection> dets) {
  const auto& g = heat.grid();
  const bool wrap = g.full_circle();
  auto key = [&](int i, int j, int k) {
    return (static_cast<std::int64_t>(i) * g.elevation_bins + j) * g.range_bins + k;
  };
  std::unordered_map<std::int64_t, std::size_t> lookup;
  lookup.reserve(dets.size() * 2);
  for (std::size_t n = 0; n < dets.size(); ++n) {
    const auto& x = dets[n].index;
    lookup.emplace(key(x.azimuth, x.elevation, x.range), n);
  }

  std::vector<char> seen(dets.size(), 0);
  std::vector<Cluster> clusters;
  for (std::size_t seed = 0; seed < dets.size(); ++seed) {
    if (seen[seed]) continue;
    Cluster c;
    std::deque<std::size_t> queue{seed};
    seen[seed] = 1;
    while (!queue.empty()) {
      const std::size_t n = queue.front();
      queue.pop_front();
      c.members.push_back(n);
      const auto& x = dets[n].index;
      for (int di = -1; di <= 1; ++di) {
        int i = x.azimuth + di;
        if (wrap) i = (i + g.azimuth_bins) % g.azimuth_bins;
        if (i < 0 || i >= g.azimuth_bins) continue;
        for (int dj = -1; dj <= 1; ++dj) {
          const int j = x.elevation + dj;
          if (j < 0 || j >= g.elevation_bins) continue;
          for (int dk = -1; dk <= 1; ++dk) {
            const int k = x.range + dk;
            if (k < 0 || k >= g.range_bins) continue;
            const auto it = lookup.find(key(i, j, k));
            if (it != lookup.end() && !seen[it->second]) {
              seen[it->second] = 1;
              queue.push_back(it->second);
            }
          }
        }
      }
    }
    std::sort(c.members.begin(), c.members.end());

    std::size_t top = c.members.front();
    for (std::size_t n : c.members) {
      if (dets[n].magnitude > dets[top].magnitude) top = n;
    }
    const int i0 = dets[top].index.azimuth;
    double w = 0.0, di_sum = 0.0, el_sum = 0.0, r_sum = 0.0;
    for (std::size_t n : c.members) {
      const auto& x = dets[n].index;
      int di = x.azimuth - i0;
      if (wrap) {
        if (di > g.azimuth_bins / 2) di -= g.azimuth_bins;
        if (di < -g.azimuth_bins / 2) di += g.azimuth_bins;
      }
      const double m = dets[n].magnitude;
      w += m;
      di_sum += m * di;
      el_sum += m * g.elevation(x.elevation);
      r_sum += m * x.range * heat.range_bin_m();
    }
    c.peak_magnitude = dets[top].magnitude;
    c.azimuth_rad = g.azimuth(i0) + di_sum / w * g.azimuth_step();
    if (wrap) c.azimuth_rad = wrap_two_pi(c.azimuth_rad);
    c.elevation_rad = el_sum / w;
    c.range_m = r_sum / w;
    c.xyz = heat.voxel_position(c.azimuth_rad, c.elevation_rad, c.range_m);
    clusters.push_back(std::move(c));
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    return a.peak_magnitude > b.peak_magnitude;
  });
  return clusters;
}

namespace {

constexpr std::size_t kBruteForceLimit = 1000;

std::vector<Eigen::Vector3d> project(const PointCloud& c, MetricDims dims) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(c.size());
  for (const auto& p : c.points) {
    Eigen::Vector3d v = p.xyz;
    if (dims == MetricDims::Two) v.z() = 0.0;
    pts.push_back(v);
  }
  return pts;
}

}  // namespace

double directed_mean_nn(const PointCloud& from, const PointCloud& to, MetricDims dims) {
  if (from.empty() || to.empty()) throw InputError("distance between point clouds needs non-empty clouds");
  const auto a = project(from, dims);
  const auto b = project(to, dims);
  std::vector<double> nearest(a.size());
  if (b.size() > kBruteForceLimit) {
    const KdTree tree(b, dims == MetricDims::Two ? 2 : 3);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < a.size(); ++i) nearest[i] = std::sqrt(tree.nearest_squared(a[i]));
  } else {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < a.size(); ++i) {
      double best = INFINITY;
      for (const auto& q : b) best = std::min(best, (a[i] - q).squaredNorm());
      nearest[i] = std::sqrt(best);
    }
  }
  double sum = 0.0;
  for (double d : nearest) sum += d;
  return sum / static_cast<double>(nearest.size());
}

double chamfer(const PointCloud& a, const PointCloud& b, MetricDims dims) {
  return 0.5 * (directed_mean_nn(a, b, dims) + directed_mean_nn(b, a, dims));
}

double modified_hausdorff(const PointCloud& a, const PointCloud& b, MetricDims dims) {
  return std::max(directed_mean_nn(a, b, dims), directed_mean_nn(b, a, dims));
}

RangeImage range_image(const PeakRangeImage& peak) {
  return {peak.rows, peak.cols, peak.range_m};
}

double range_image_mae(const RangeImage& pred, const RangeImage& truth,
                       std::span<const std::uint8_t> mask) {
  if (pred.rows != truth.rows || pred.cols != truth.cols) {
    throw InputError("range images differ in size");
  }
  const std::size_t n = static_cast<std::size_t>(pred.rows) * pred.cols;
  if (!mask.empty() && mask.size() != n) throw InputError("mask size does not match the image");
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask.empty() && mask[i]) continue;
    sum += std::abs(pred.range_m[i] - truth.range_m[i]);
    ++used;
  }
  if (used == 0) throw InputError("every pixel is masked");
  return sum / static_cast<double>(used);
}

void write_ply(std::ostream& os, const PointCloud& cloud) {
  os << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
     << "\nproperty double x\nproperty double y\nproperty double z\nproperty double intensity\n"
        "end_header\n";
  for (const auto& p : cloud.points) {
    os << format_double(p.xyz.x()) << " " << format_double(p.xyz.y()) << " "
       << format_double(p.xyz.z()) << " " << format_double(p.intensity) << "\n";
  }
  if (!os) throw InputError("failed writing PLY");
}

PointCloud read_ply(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "ply") throw InputError("PLY: missing 'ply' magic");
  std::size_t count = 0;
  bool have_count = false;
  std::vector<std::string> props;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "end_header") break;
    if (word == "comment" || word.empty()) continue;
    if (word == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "ascii") throw InputError("PLY: only ascii format is supported");
    } else if (word == "element") {
      std::string name;
      ss >> name >> count;
      if (name != "vertex" || !ss) throw InputError("PLY line " + std::to_string(lineno) + ": expected vertex element");
      have_count = true;
    } else if (word == "property") {
      std::string type, name;
      ss >> type >> name;
      props.push_back(name);
    } else {
      throw InputError("PLY line " + std::to_string(lineno) + ": unexpected header entry '" + word + "'");
    }
  }
  if (!have_count) throw InputError("PLY: no vertex element");
  auto find = [&](const std::string& n) {
    const auto it = std::find(props.begin(), props.end(), n);
    return it == props.end() ? -1 : static_cast<int>(it - props.begin());
  };
  const int ix = find("x"), iy = find("y"), iz = find("z"), ii = find("intensity");
  if (ix < 0 || iy < 0 || iz < 0) throw InputError("PLY: x, y, z properties required");

  PointCloud cloud;
  cloud.points.reserve(count);
  std::vector<double> vals(props.size());
  for (std::size_t n = 0; n < count; ++n) {
    if (!std::getline(is, line)) throw InputError("PLY: expected " + std::to_string(count) + " vertices");
    ++lineno;
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    for (auto& v : vals) {
      if (!(ss >> v)) throw InputError("PLY line " + std::to_string(lineno) + ": malformed vertex");
    }
    cloud.points.push_back({{vals[ix], vals[iy], vals[iz]}, ii >= 0 ? vals[ii] : 0.0});
  }
  return cloud;
}

void save_ply(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  write_ply(out, cloud);
}

PointCloud load_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open point cloud '" + path + "'");
  return read_ply(in);
}

void write_range_csv(std::ostream& os, const RangeImage& img) {
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) os << (c ? "," : "") << format_double(img.at(r, c));
    os << "\n";
  }
}

RangeImage read_range_csv(std::istream& is) {
  RangeImage img;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto row = parse_double_list(line, "range csv:" + std::to_string(lineno));
    if (img.rows == 0) {
      img.cols = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != img.cols) {
      throw InputError("range csv:" + std::to_string(lineno) + ": expected " +
                       std::to_string(img.cols) + " columns");
    }
    img.range_m.insert(img.range_m.end(), row.begin(), row.end());
    ++img.rows;
  }
  if (img.rows == 0) throw InputError("range csv is empty");
  return img;
}

void write_range_pgm16(std::ostream& os, const RangeImage& img) {
  os << "P5\n" << img.cols << " " << img.rows << "\n65535\n";
  for (double r : img.range_m) {
    const double mm = std::clamp(std::round(r * 1000.0), 0.0, 65535.0);
    const auto v = static_cast<std::uint16_t>(mm);
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
    os.write(bytes, 2);
  }
  if (!os) throw InputError("failed writing PGM");
}

RangeImage read_range_pgm16(std::istream& is) {
  auto token = [&]() {
    std::string t;
    char ch;
    while (is.get(ch)) {
      if (ch == '#') {
        std::string skip;
        std::getline(is, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(ch);
    }
    return t;
  };
  if (token() != "P5") throw InputError("PGM: expected binary P5 magic");
  RangeImage img;
  try {
    img.cols = std::stoi(token());
    img.rows = std::stoi(token());
    if (std::stoi(token()) != 65535) throw InputError("PGM: maxval must be 65535");
  } catch (const std::logic_error&) {
    throw InputError("PGM: malformed header");
  }
  if (img.cols <= 0 || img.rows <= 0) throw InputError("PGM: bad dimensions");
  img.range_m.resize(static_cast<std::size_t>(img.rows) * img.cols);
  for (double& r : img.range_m) {
    unsigned char b[2];
    if (!is.read(reinterpret_cast<char*>(b), 2)) throw InputError("PGM: truncated pixel data");
    r = ((b[0] << 8) | b[1]) / 1000.0;
  }
  return img;
}

}  // namespace cylrad
