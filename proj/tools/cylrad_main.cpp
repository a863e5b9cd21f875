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

#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cylrad/ego_motion.hpp"
#include "cylrad/errors.hpp"
#include "cylrad/imaging.hpp"
#include "cylrad/pipeline.hpp"
#include "cylrad/pointcloud.hpp"
#include "cylrad/resolution.hpp"
#include "cylrad/scenario.hpp"
#include "cylrad/text_format.hpp"
#include "provenance.hpp"

namespace fs = std::filesystem;
using namespace cylrad;
using namespace cylrad::cli;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kInput = 3, kNumerical = 4 };

std::string g_command_line;

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

std::string sidecar(const std::string& path) { return path + ".prov"; }

MotionEstimate load_motion(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open motion record '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') return parse_motion_record(line);
  }
  throw InputError("motion record '" + path + "' is empty");
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario;
  std::string output;
  std::string truth;
};

void run_simulate(const SimulateArgs& a) {
  const Scenario s = load_scenario(a.scenario);
  const auto scene = s.scene();
  const RawCube cube = simulate(scene, s.trajectory(), s.cfg, s.simulation_options());
  save_cube(a.output, cube);
  Provenance p{g_command_line, {a.scenario}, {a.output}, &s};
  if (!a.truth.empty()) {
    save_ply(a.truth, truth_cloud(s));
    p.outputs.push_back(a.truth);
  }
  write_provenance(sidecar(a.output), p);
}

// ---------------------------------------------------------------- motion

struct MotionArgs {
  std::string cube;
  std::string output;
  std::string spectrogram_dir;
  std::uint64_t seed = 1;
  double previous_heading_deg = 0.0;
  int max_gates = 8;
};

void run_motion(const MotionArgs& a) {
  const RawCube cube = load_cube(a.cube);
  MotionPipelineParams params;
  params.ransac.seed = a.seed;
  params.ransac.previous_heading_rad = deg2rad(a.previous_heading_deg);
  params.max_gates = a.max_gates;
  const auto res = estimate_motion_from_cube(cube, params);
  const std::string record = format_motion_record(res.estimate);
  std::cout << record << "\n";
  Provenance p{g_command_line, {a.cube}, {}, nullptr};
  if (!a.output.empty()) {
    open_out(a.output) << record << "\n";
    p.outputs.push_back(a.output);
  }
  if (!a.spectrogram_dir.empty()) {
    fs::create_directories(a.spectrogram_dir);
    for (const auto& spec : res.spectrograms) {
      const std::string path =
          (fs::path(a.spectrogram_dir) / ("gate_" + std::to_string(spec.range_bin) + ".csv")).string();
      auto out = open_out(path);
      write_spectrogram_csv(out, spec);
      out.close();
      p.outputs.push_back(path);
    }
  }
  if (!p.outputs.empty()) write_provenance(sidecar(p.outputs.front()), p);
}

// ---------------------------------------------------------------- image

struct ImageArgs {
  std::string cube;
  std::string motion;
  std::string output;
  std::string peak_pgm;
  std::string peak_csv;
  bool direct = false;
  bool no_range_migration = false;
  double fov_deg = 0.0;
  ImagingGrid grid;
};

void run_image(const ImageArgs& a) {
  const RawCube cube = load_cube(a.cube);
  const MotionEstimate motion = a.motion.empty() ? MotionEstimate::stationary() : load_motion(a.motion);
  BeamformOptions opts;
  opts.range_migration = !a.no_range_migration;
  if (a.fov_deg > 0.0) opts.fov_window_rad = deg2rad(a.fov_deg);
  const Heatmap3D heat = a.direct ? beamform_compensated(cube, a.grid, motion, opts)
                                  : beamform_fast(cube, a.grid, motion, opts);
  save_heatmap(a.output, heat);
  Provenance p{g_command_line, {a.cube}, {a.output}, nullptr};
  if (!a.motion.empty()) p.inputs.push_back(a.motion);
  if (!a.peak_pgm.empty() || !a.peak_csv.empty()) {
    const auto img = peak_range_image(heat);
    if (!a.peak_pgm.empty()) {
      auto out = open_out(a.peak_pgm);
      write_peak_pgm(out, img);
      out.close();
      p.outputs.push_back(a.peak_pgm);
    }
    if (!a.peak_csv.empty()) {
      auto out = open_out(a.peak_csv);
      write_peak_csv(out, img, heat.grid());
      out.close();
      p.outputs.push_back(a.peak_csv);
    }
  }
  write_provenance(sidecar(a.output), p);
}

// ---------------------------------------------------------------- pointcloud

struct PointcloudArgs {
  std::string heatmap;
  std::string output;
  std::string range_csv;
  std::string range_pgm;
  CfarParams cfar;
  double min_relative_db = 12.0;
  bool no_floor = false;
};

void run_pointcloud(PointcloudArgs a) {
  const Heatmap3D heat = load_heatmap(a.heatmap);
  a.cfar.min_relative_db = a.no_floor ? std::nullopt : std::optional<double>(a.min_relative_db);
  const auto dets = cfar_detect(heat, a.cfar);
  const auto clusters = cluster_detections(heat, dets);
  save_ply(a.output, detections_to_cloud(heat, dets));
  std::cout << "points = " << dets.size() << "\nclusters = " << clusters.size() << "\n";
  Provenance p{g_command_line, {a.heatmap}, {a.output}, nullptr};
  const auto img = range_image(peak_range_image(heat));
  if (!a.range_csv.empty()) {
    auto out = open_out(a.range_csv);
    write_range_csv(out, img);
    out.close();
    p.outputs.push_back(a.range_csv);
  }
  if (!a.range_pgm.empty()) {
    auto out = open_out(a.range_pgm, true);
    write_range_pgm16(out, img);
    out.close();
    p.outputs.push_back(a.range_pgm);
  }
  write_provenance(sidecar(a.output), p);
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string pred;
  std::string truth;
  std::string pred_range;
  std::string truth_range;
  std::string mask;
  std::string output;
};

RangeImage load_range_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open range image '" + path + "'");
  return read_range_csv(in);
}

void run_metrics(const MetricsArgs& a) {
  std::ostringstream report;
  std::vector<std::string> inputs;
  if (!a.pred.empty() || !a.truth.empty()) {
    if (a.pred.empty() || a.truth.empty()) throw InputError("--pred and --truth go together");
    const auto m = evaluate_cloud(load_ply(a.pred), load_ply(a.truth));
    report << "chamfer_2d_m = " << format_double(m.chamfer_2d_m) << "\n"
           << "chamfer_3d_m = " << format_double(m.chamfer_3d_m) << "\n"
           << "mhd_2d_m = " << format_double(m.mhd_2d_m) << "\n"
           << "mhd_3d_m = " << format_double(m.mhd_3d_m) << "\n"
           << "points = " << m.points << "\n";
    inputs.insert(inputs.end(), {a.pred, a.truth});
  }
  if (!a.pred_range.empty() || !a.truth_range.empty()) {
    if (a.pred_range.empty() || a.truth_range.empty()) {
      throw InputError("--pred-range and --truth-range go together");
    }
    const auto pred = load_range_csv(a.pred_range);
    const auto truth = load_range_csv(a.truth_range);
    std::vector<std::uint8_t> mask;
    if (!a.mask.empty()) {
      for (double v : load_range_csv(a.mask).range_m) mask.push_back(v != 0.0 ? 1 : 0);
      inputs.push_back(a.mask);
    }
    report << "range_mae_m = " << format_double(range_image_mae(pred, truth, mask)) << "\n";
    inputs.insert(inputs.end(), {a.pred_range, a.truth_range});
  }
  if (inputs.empty()) throw InputError("nothing to compare; give --pred/--truth or --pred-range/--truth-range");
  std::cout << report.str();
  if (!a.output.empty()) {
    open_out(a.output) << report.str();
    write_provenance(sidecar(a.output), {g_command_line, inputs, {a.output}, nullptr});
  }
}

// ---------------------------------------------------------------- pipeline

struct PipelineArgs {
  std::string scenario;
  std::string outdir;
  bool no_compensation = false;
};

void run_pipeline_cmd(const PipelineArgs& a) {
  Scenario s = load_scenario(a.scenario);
  if (a.no_compensation) s.compensate_motion = false;
  const PipelineResult r = run_pipeline(s);
  fs::create_directories(a.outdir);
  auto path = [&](const char* name) { return (fs::path(a.outdir) / name).string(); };
  const std::string motion = path("motion.txt"), heat = path("heatmap.bin"),
                    cloud = path("cloud.ply"), truth = path("truth.ply"), report = path("report.txt");
  open_out(motion) << format_motion_record(r.estimated_motion) << "\n";
  save_heatmap(heat, r.heatmap);
  save_ply(cloud, r.cloud);
  save_ply(truth, r.truth);
  {
    auto out = open_out(report);
    write_report(out, r);
  }
  write_report(std::cout, r);
  write_provenance(path("provenance.prov"),
                   {g_command_line, {a.scenario}, {motion, heat, cloud, truth, report}, &s});
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string scenario;
  std::string output;
  std::vector<double> dv{0.0, 0.00848, 0.02, 0.05, 0.1};
  std::vector<double> dtheta_deg{0.0};
};

void run_sweep(const SweepArgs& a) {
  const Scenario s = load_scenario(a.scenario);
  const PipelineResult base = run_pipeline(s);
  std::vector<double> dtheta_rad;
  for (double d : a.dtheta_deg) dtheta_rad.push_back(deg2rad(d));
  const auto rows = sweep_motion_error(s, base, a.dv, dtheta_rad);
  {
    auto out = open_out(a.output);
    write_sweep_csv(out, rows);
  }
  write_sweep_csv(std::cout, rows);
  write_provenance(sidecar(a.output), {g_command_line, {a.scenario}, {a.output}, &s});
}

// ---------------------------------------------------------------- resolution

struct ResolutionArgs {
  std::vector<double> fov_deg{30.0, 60.0, 90.0, 180.0, 360.0};
  std::string pattern = "cosine";
  double radius_m = 0.08;
  double wavelength_m = 0.0038;
  double span_deg = 10.0;
  int samples = 2001;
  std::string curve_prefix;
  std::string output;
  bool two_point = false;
};

void run_resolution(const ResolutionArgs& a) {
  const RadiationPattern pattern =
      a.pattern == "omni" ? RadiationPattern::omni() : RadiationPattern::cosine_power();
  const auto grid = offset_grid(deg2rad(a.span_deg), a.samples);
  const double analytic = analytic_beamwidth(a.radius_m, a.wavelength_m);
  std::ostringstream table;
  table << "fov_rad,beamwidth_rad,analytic_rad\n";
  std::vector<std::string> outputs;
  for (double fov : a.fov_deg) {
    const auto curve = beam_shape_numeric(a.radius_m, a.wavelength_m, deg2rad(fov), pattern, grid);
    if (curve.coarse) std::cerr << "warning: offset grid is coarse relative to the beamwidth\n";
    table << format_double(deg2rad(fov)) << "," << format_double(beamwidth_3db(curve)) << ","
          << format_double(analytic) << "\n";
    if (!a.curve_prefix.empty()) {
      const std::string path = a.curve_prefix + "_fov" + format_double(fov) + ".csv";
      auto out = open_out(path);
      write_beam_curve_csv(out, curve);
      out.close();
      outputs.push_back(path);
    }
  }
  std::cout << table.str();
  if (a.two_point) {
    RadarConfig cfg = RadarConfig::defaults();
    cfg.rotation_radius_m = a.radius_m;
    cfg.wavelength_m = a.wavelength_m;
    cfg.set_uniform_antennas(8);
    TwoPointParams tp;
    tp.pattern = pattern;
    const double sep = min_resolved_separation(cfg, deg2rad(0.1), deg2rad(10.0), deg2rad(0.01), tp);
    std::cout << "two_point_min_separation_rad = " << format_double(sep) << "\n";
  }
  if (!a.output.empty()) {
    open_out(a.output) << table.str();
    outputs.insert(outputs.begin(), a.output);
  }
  if (!outputs.empty()) write_provenance(sidecar(outputs.front()), {g_command_line, {}, outputs, nullptr});
}

void add_grid_options(CLI::App* cmd, ImagingGrid& g) {
  cmd->add_option("--azimuth-bins", g.azimuth_bins, "Azimuth bins over [0, 360) deg")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--elevation-bins", g.elevation_bins, "Elevation bins over [-45, 45] deg")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--range-bins", g.range_bins, "Range bins kept per ray")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) g_command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Rotating mmWave radar simulation, ego-motion estimation and 3D imaging"};
  app.set_version_flag("--version", CYLRAD_VERSION);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = OpenMP default)")
      ->check(CLI::NonNegativeNumber);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Synthesize a raw IF cube from a scenario file");
  c_sim->add_option("scenario", sim.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  c_sim->add_option("-o,--output", sim.output, "Cube file")->required();
  c_sim->add_option("--truth", sim.truth, "Also write reflector positions as PLY");

  MotionArgs mot;
  auto* c_mot = app.add_subcommand("motion", "Estimate platform velocity from a cube");
  c_mot->add_option("cube", mot.cube, "Cube file")->required()->check(CLI::ExistingFile);
  c_mot->add_option("-o,--output", mot.output, "Motion record file");
  c_mot->add_option("--spectrogram-dir", mot.spectrogram_dir, "Write one spectrogram CSV per gate");
  c_mot->add_option("--seed", mot.seed, "RANSAC seed");
  c_mot->add_option("--previous-heading-deg", mot.previous_heading_deg,
                    "Heading reported when the speed is too low to observe it");
  c_mot->add_option("--max-gates", mot.max_gates, "Range gates analysed")->check(CLI::PositiveNumber);

  ImageArgs img;
  auto* c_img = app.add_subcommand("image", "Beamform a cube into a 3D heatmap");
  c_img->add_option("cube", img.cube, "Cube file")->required()->check(CLI::ExistingFile);
  c_img->add_option("--motion", img.motion, "Motion record to compensate (default: stationary)")
      ->check(CLI::ExistingFile);
  c_img->add_option("-o,--output", img.output, "Heatmap file")->required();
  c_img->add_option("--peak-pgm", img.peak_pgm, "Peak-magnitude image (ASCII PGM)");
  c_img->add_option("--peak-csv", img.peak_csv, "Peak range per direction (CSV)");
  c_img->add_flag("--direct", img.direct, "Use the direct 3D sum instead of the two-step one");
  c_img->add_flag("--no-range-migration", img.no_range_migration,
                  "Keep ranges relative to the platform at each look time");
  c_img->add_option("--fov-deg", img.fov_deg, "Summation window (deg)")->check(CLI::Range(0.0, 360.0));
  add_grid_options(c_img, img.grid);

  PointcloudArgs pc;
  auto* c_pc = app.add_subcommand("pointcloud", "CFAR point extraction from a heatmap");
  c_pc->add_option("heatmap", pc.heatmap, "Heatmap file")->required()->check(CLI::ExistingFile);
  c_pc->add_option("-o,--output", pc.output, "Point cloud (ASCII PLY)")->required();
  c_pc->add_option("--guard", pc.cfar.guard, "Guard cells per side")->check(CLI::NonNegativeNumber);
  c_pc->add_option("--train", pc.cfar.train, "Training cells per side")->check(CLI::PositiveNumber);
  c_pc->add_option("--pfa", pc.cfar.pfa, "False-alarm probability")->check(CLI::Range(1e-300, 1.0));
  c_pc->add_option("--min-relative-db", pc.min_relative_db, "Floor below the heatmap peak (dB)");
  c_pc->add_flag("--no-floor", pc.no_floor, "Disable the relative floor");
  c_pc->add_option("--range-csv", pc.range_csv, "Peak range image as CSV");
  c_pc->add_option("--range-pgm", pc.range_pgm, "Peak range image as 16-bit PGM (mm)");

  MetricsArgs met;
  auto* c_met = app.add_subcommand("metrics", "Compare point clouds or range images");
  c_met->add_option("--pred", met.pred, "Predicted cloud (PLY)")->check(CLI::ExistingFile);
  c_met->add_option("--truth", met.truth, "Reference cloud (PLY)")->check(CLI::ExistingFile);
  c_met->add_option("--pred-range", met.pred_range, "Predicted range image (CSV)")->check(CLI::ExistingFile);
  c_met->add_option("--truth-range", met.truth_range, "Reference range image (CSV)")->check(CLI::ExistingFile);
  c_met->add_option("--mask", met.mask, "Nonzero pixels are excluded (CSV)")->check(CLI::ExistingFile);
  c_met->add_option("-o,--output", met.output, "Report file");

  PipelineArgs pipe;
  auto* c_pipe = app.add_subcommand("pipeline", "simulate, estimate motion, image, extract, score");
  c_pipe->add_option("scenario", pipe.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  c_pipe->add_option("-o,--outdir", pipe.outdir, "Output directory")->required();
  c_pipe->add_flag("--no-compensation", pipe.no_compensation, "Image as if the platform were static");

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("sweep-motion-error", "Point-cloud error versus injected motion error");
  c_sw->add_option("scenario", sw.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  c_sw->add_option("-o,--output", sw.output, "CSV file")->required();
  c_sw->add_option("--dv", sw.dv, "Speed errors (m/s)")->delimiter(',');
  c_sw->add_option("--dtheta-deg", sw.dtheta_deg, "Heading errors (deg)")->delimiter(',');

  ResolutionArgs res;
  auto* c_res = app.add_subcommand("resolution", "Beamwidth versus FOV window");
  c_res->add_option("--fov-deg", res.fov_deg, "FOV windows (deg)")
      ->delimiter(',')
      ->check(CLI::Range(1e-9, 360.0));
  c_res->add_option("--pattern", res.pattern, "Radiation pattern")
      ->check(CLI::IsMember({"cosine", "omni"}));
  c_res->add_option("--radius-m", res.radius_m, "Rotation radius")->check(CLI::PositiveNumber);
  c_res->add_option("--wavelength-m", res.wavelength_m, "Wavelength")->check(CLI::PositiveNumber);
  c_res->add_option("--span-deg", res.span_deg, "Half span of the offset grid")->check(CLI::PositiveNumber);
  c_res->add_option("--samples", res.samples, "Offset samples")->check(CLI::Range(3, 1000000));
  c_res->add_option("--curve-prefix", res.curve_prefix, "Write each beam curve to <prefix>_fov<deg>.csv");
  c_res->add_option("-o,--output", res.output, "Table CSV");
  c_res->add_flag("--two-point", res.two_point, "Also run the two-reflector experiment at 1 m");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (threads > 0) omp_set_num_threads(threads);
  try {
    if (c_sim->parsed()) run_simulate(sim);
    if (c_mot->parsed()) run_motion(mot);
    if (c_img->parsed()) run_image(img);
    if (c_pc->parsed()) run_pointcloud(pc);
    if (c_met->parsed()) run_metrics(met);
    if (c_pipe->parsed()) run_pipeline_cmd(pipe);
    if (c_sw->parsed()) run_sweep(sw);
    if (c_res->parsed()) run_resolution(res);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
