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

#include <gtest/gtest.h>
#include <omp.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "cylrad/errors.hpp"
#include "cylrad/pipeline.hpp"
#include "test_support.hpp"

namespace cylrad {
namespace {

namespace fs = std::filesystem;

Scenario scenario(const char* name) {
  return load_scenario(test::source_path(std::string("scenarios/") + name + ".scn"));
}

// Runs the pipeline once per test binary for each shipped scenario.
const PipelineResult& cached(const char* name) {
  static std::map<std::string, PipelineResult> results;
  auto it = results.find(name);
  if (it == results.end()) it = results.emplace(name, run_pipeline(scenario(name))).first;
  return it->second;
}

TEST(Pipeline, StaticRoom) {
  const PipelineResult& r = cached("static_room");
  EXPECT_LT(r.estimated_motion.speed_m_s, 0.005);
  EXPECT_TRUE(r.estimated_motion.degenerate);
  EXPECT_EQ(r.truth.size(), 5u);
  EXPECT_EQ(r.clusters.size(), 5u);
  // Azimuth cells are 0.7 deg and range cells 3.75 cm; the elevation beam is
  // ~14 deg wide, so heights spread and the 3D distance is the looser one.
  EXPECT_LT(r.metrics.chamfer_2d_m, 0.06);
  EXPECT_LT(r.metrics.chamfer_3d_m, 0.15);
  EXPECT_LE(r.metrics.chamfer_3d_m, r.metrics.mhd_3d_m);
}

TEST(Pipeline, EveryStaticReflectorHasANearbyCluster) {
  const PipelineResult& r = cached("static_room");
  for (const auto& t : r.truth.points) {
    double best = 1e9;
    for (const auto& c : r.clusters) {
      best = std::min(best, (c.xyz - t.xyz).head<2>().norm());
    }
    EXPECT_LT(best, 0.1) << t.xyz.transpose();
  }
}

TEST(Pipeline, MotionCompensationReducesDistortion) {
  const PipelineResult& comp = cached("moving_room");
  EXPECT_NEAR(comp.estimated_motion.speed_m_s, 0.4, 0.01);
  EXPECT_NEAR(comp.estimated_motion.heading_rad, deg2rad(60.0), deg2rad(2.0));
  Scenario s = scenario("moving_room");
  s.compensate_motion = false;
  const PipelineResult plain = run_pipeline(s);
  EXPECT_EQ(plain.imaging_motion.speed_m_s, 0.0);
  EXPECT_GT(plain.metrics.chamfer_3d_m, comp.metrics.chamfer_3d_m);
  EXPECT_GT(plain.metrics.chamfer_2d_m, comp.metrics.chamfer_2d_m);
}

TEST(Pipeline, SweepZeroRowMatchesBase) {
  const Scenario s = scenario("golden_small");
  const PipelineResult base = run_pipeline(s);
  const std::vector<double> dv{0.0, 0.00848}, dt{0.0};
  const auto rows = sweep_motion_error(s, base, dv, dt);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].metrics.chamfer_3d_m, base.metrics.chamfer_3d_m);
  EXPECT_EQ(rows[0].metrics.mhd_2d_m, base.metrics.mhd_2d_m);
  EXPECT_EQ(rows[0].metrics.points, base.cloud.size());
  // A motion error at the size of the estimator's accuracy barely changes the cloud.
  EXPECT_LT(rows[1].metrics.chamfer_3d_m, 1.2 * base.metrics.chamfer_3d_m);

  std::ostringstream os;
  write_sweep_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "dv_m_s,dtheta_rad,chamfer_2d,chamfer_3d,mhd_2d,mhd_3d,num_points");
  const std::vector<double> negative{-1.0};
  EXPECT_THROW(sweep_motion_error(s, base, negative, dt), InputError);
}

TEST(Pipeline, SweepErrorGrowsWithLargeMotionError) {
  const Scenario s = scenario("golden_small");
  const PipelineResult base = run_pipeline(s);
  const std::vector<double> dv{0.0, 0.3}, dt{0.0};
  const auto rows = sweep_motion_error(s, base, dv, dt);
  EXPECT_GT(rows[1].metrics.chamfer_2d_m, rows[0].metrics.chamfer_2d_m);
}

// Regression pin: outputs of the golden scenario must not depend on the
// thread count, and must not drift silently.
TEST(Pipeline, GoldenBitIdenticalAcrossThreads) {
  const Scenario s = scenario("golden_small");
  const int max_threads = omp_get_max_threads();
  std::vector<std::pair<unsigned long long, unsigned long long>> sums;
  for (int threads : {1, 4, std::max(max_threads, 2)}) {
    omp_set_num_threads(threads);
    const PipelineResult r = run_pipeline(s);
    sums.emplace_back(heatmap_checksum(r.heatmap), cloud_checksum(r.cloud));
  }
  omp_set_num_threads(max_threads);
  for (const auto& p : sums) {
    EXPECT_EQ(p.first, 0xb1108631860c9ea0ULL) << std::hex << p.first;
    EXPECT_EQ(p.second, 0x3f3e7c584fab4dceULL) << std::hex << p.second;
  }
}

TEST(Pipeline, ReportIsReproducible) {
  const Scenario s = scenario("golden_small");
  std::ostringstream a, b;
  write_report(a, run_pipeline(s));
  write_report(b, run_pipeline(s));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("heading_rad = "), std::string::npos);
  EXPECT_NE(a.str().find("heatmap_fnv1a = b1108631860c9ea0"), std::string::npos);
}

TEST(Pipeline, TruthCloud) {
  Scenario s = scenario("golden_small");
  const PointCloud t = truth_cloud(s);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_NEAR(t.points[1].xyz.x(), 2.4 * std::cos(deg2rad(2.0)) * std::cos(deg2rad(100.0)), 1e-12);
  EXPECT_NEAR(t.points[1].xyz.z(), 2.4 * std::sin(deg2rad(2.0)), 1e-12);
  EXPECT_EQ(t.points[3].intensity, 0.7);
}

// ---- command-line tool

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cylrad_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(CYLRAD_CLI) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("pipeline --bogus-flag"), 2);
  EXPECT_EQ(run("resolution --fov-deg 0"), 2);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("--version"), 0);
}

TEST_F(Cli, MissingSeedExitsThree) {
  std::ofstream(path("noseed.scn")) << "schema = cylrad-scenario/1\nreflector = 2 10 0 1\n";
  EXPECT_EQ(run("pipeline " + path("noseed.scn") + " -o " + path("out")), 3);
  EXPECT_NE(slurp(path("stderr.txt")).find("seed"), std::string::npos);
}

TEST_F(Cli, ProvenanceRerunReproducesOutputs) {
  const std::string scn = test::source_path("scenarios/golden_small.scn");
  ASSERT_EQ(run("pipeline " + scn + " -o " + path("a")), 0);
  const std::string prov = slurp(path("a/provenance.prov"));
  EXPECT_NE(prov.find("# seed: 20260101"), std::string::npos);
  EXPECT_NE(prov.find("fnv1a64="), std::string::npos);
  ASSERT_EQ(run("pipeline " + path("a/provenance.prov") + " -o " + path("b")), 0);
  for (const char* f : {"heatmap.bin", "cloud.ply", "report.txt", "motion.txt"}) {
    const std::string a = slurp(path(std::string("a/") + f));
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(path(std::string("b/") + f))) << f;
  }
}

TEST_F(Cli, ResolutionTable) {
  ASSERT_EQ(run("resolution --fov-deg 90,360 -o " + path("res.csv")), 0);
  const std::string csv = slurp(path("res.csv"));
  EXPECT_EQ(csv.rfind("fov_rad,beamwidth_rad,analytic_rad\n", 0), 0u) << csv;
}

}  // namespace
}  // namespace cylrad
