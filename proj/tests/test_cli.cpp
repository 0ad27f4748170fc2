// Copyright 2026 The PathPainter Authors
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

#include <doctest.h>
#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pathpainter/cli.hpp"
#include "test_support.hpp"

using namespace pathpainter;
using nlohmann::json;
namespace fs = std::filesystem;
namespace exit_code = pathpainter::cli::exit_code;

namespace
{

int run(std::initializer_list<std::string> args)
{
  return cli::run_cli(std::vector<std::string>(args));
}

json read_json(const fs::path & path)
{
  return json::parse(fixtures::read_text(path));
}

fs::path straight_path_file(const fs::path & dir, const fixtures::RoadScene & scene, double length_m)
{
  PathM path;
  const WorldCoord origin = scene.map.pixel_to_world({30, 256});
  for (int i = 0; i <= static_cast<int>(length_m); ++i) path.waypoints.push_back({origin.x + i, origin.y});
  const auto file = dir / "straight.json";
  write_text_atomic(file, cli::path_to_json(path));
  return file;
}

}  // namespace

TEST_CASE("config parsing")
{
  test_support::TempDir dir;
  const auto scene = fixtures::make_road_scene(dir.path());

  SUBCASE("relative paths resolve against the config directory")
  {
    const auto cfg = cli::parse_run_config(json{{"map_image", "map.png"}, {"lambda", 1.5}}, dir.path());
    CHECK(*cfg.map_image == dir.path() / "map.png");
    CHECK(cfg.planning_params().lambda == 1.5);
    CHECK(cli::parse_run_config(json::object(), {}).planning_params().lambda == 2.0);
    CHECK(cli::parse_run_config(json::object(), {}).benchmark_params().lambda == 0.0);
  }
  SUBCASE("unknown keys are rejected")
  {
    CHECK_THROWS_AS(cli::parse_run_config(json{{"lamda", 1.0}}, {}), cli::ConfigError);
    const auto file = fixtures::write_config(dir.path() / "bad.json", json{{"map_imag", "map.png"}});
    CHECK(run({"plan", "--config", file.string(), "--start", "1", "1", "--goal", "2", "2"}) ==
          exit_code::kInvalidConfig);
  }
  SUBCASE("wrong value types and missing files")
  {
    CHECK_THROWS_AS(cli::parse_run_config(json{{"lambda", "two"}}, {}), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config(json{{"backend", "gemini"}}, {}), cli::ConfigError);
    auto doc = fixtures::oracle_config(scene);
    doc["mask_image"] = (dir.path() / "missing.png").string();
    const auto file = fixtures::write_config(dir.path() / "missing.json", doc);
    CHECK_THROWS_AS(cli::check_referenced_files(cli::load_run_config(file)), cli::ConfigError);
    CHECK(run({"plan", "--config", file.string(), "--start", "1", "1", "--goal", "2", "2"}) ==
          exit_code::kInvalidConfig);
  }
  SUBCASE("path JSON round trip")
  {
    PathM p;
    p.waypoints = {{1.25, -2.5}, {3.0, 4.0}};
    p.cost = 7.0;
    p.length_m = polyline_length(p.waypoints);
    const auto text = cli::path_to_json(p);
    const auto doc = json::parse(text);
    CHECK(doc.at("k") == 2);
    CHECK(doc.at("waypoints").size() == 2);
    const auto back = cli::path_from_json(text);
    CHECK(back.waypoints == p.waypoints);
    CHECK_THROWS_AS(cli::path_from_json("{\"waypoints\": []}"), cli::ConfigError);
    CHECK_THROWS_AS(cli::path_from_json("not json"), cli::ConfigError);
  }
  CHECK(run({"no-such-command"}) == exit_code::kInvalidConfig);
}

TEST_CASE("plan command")
{
  test_support::TempDir dir;
  const auto scene = fixtures::make_road_scene(dir.path());
  const auto out = dir.path() / "out";
  auto doc = fixtures::oracle_config(scene);
  const auto start = std::to_string(scene.start_w.x);
  const auto start_y = std::to_string(scene.start_w.y);

  SUBCASE("given goal on the road network")
  {
    doc.erase("backend");
    doc.erase("oracle_mask");
    doc.erase("oracle_goal");
    doc["mask_image"] = scene.gt_png.string();
    const auto cfg = fixtures::write_config(dir.path() / "plan.json", doc);
    const auto args = std::initializer_list<std::string>{
      "plan", "--config", cfg.string(), "--out-dir", out.string(), "--start", start, start_y, "--goal",
      std::to_string(scene.goal_w.x), std::to_string(scene.goal_w.y)};
    REQUIRE(run(args) == exit_code::kOk);
    const auto path = read_json(out / "path.json");
    CHECK(path.at("k").get<int>() >= 2);
    CHECK(path.at("waypoints").front().at("x").get<double>() == doctest::Approx(scene.start_w.x));
    CHECK(path.at("waypoints").back().at("y").get<double>() == doctest::Approx(scene.goal_w.y));
    for (const char * name : {"plan_summary.json", "mask.png", "overlay.png"}) CHECK(fs::exists(out / name));
    CHECK(read_mask(out / "mask.png") == scene.gt);
    const auto overlay = read_image(out / "overlay.png");
    CHECK(overlay.width() == 512);

    // Re-running gives identical bytes for JSON and identical pixels for PNG.
    const auto first_path = fixtures::read_text(out / "path.json");
    const auto first_summary = fixtures::read_text(out / "plan_summary.json");
    REQUIRE(run(args) == exit_code::kOk);
    CHECK(fixtures::read_text(out / "path.json") == first_path);
    CHECK(fixtures::read_text(out / "plan_summary.json") == first_summary);
    CHECK(read_image(out / "overlay.png") == overlay);
  }
  SUBCASE("walled mask has no path")
  {
    auto walled = scene.gt;
    for (int r = 0; r < 512; ++r)
      for (int c = 200; c < 205; ++c) walled.set(c, r, false);
    write_file_atomic(dir.path() / "walled.png", encode_mask_png(walled));
    doc.erase("backend");
    doc.erase("oracle_mask");
    doc.erase("oracle_goal");
    doc["mask_image"] = (dir.path() / "walled.png").string();
    const auto cfg = fixtures::write_config(dir.path() / "walled.json", doc);
    CHECK(
      run({"plan", "--config", cfg.string(), "--out-dir", out.string(), "--start", start, start_y, "--goal",
           std::to_string(scene.goal_w.x), std::to_string(scene.goal_w.y)}) == exit_code::kNoPath);
    CHECK_FALSE(fs::exists(out / "path.json"));
  }
  SUBCASE("goal off the road is an invalid endpoint")
  {
    const auto cfg = fixtures::write_config(dir.path() / "plan.json", doc);
    const auto off = scene.map.pixel_to_world({200, 300});
    CHECK(
      run({"plan", "--config", cfg.string(), "--out-dir", out.string(), "--start", start, start_y, "--goal",
           std::to_string(off.x), std::to_string(off.y)}) == exit_code::kNoPath);
  }
  SUBCASE("prompt mode with the oracle backend")
  {
    const auto cfg = fixtures::write_config(dir.path() / "plan.json", doc);
    REQUIRE(
      run({"plan", "--config", cfg.string(), "--out-dir", out.string(), "--start", start, start_y, "--prompt",
           "the south end of the north-south road"}) == exit_code::kOk);
    const auto summary = read_json(out / "plan_summary.json");
    CHECK(summary.at("goal_source") == "generated");
    const double gc = summary.at("goal").at("pixel").at("col").get<double>();
    const double gr = summary.at("goal").at("pixel").at("row").get<double>();
    CHECK(std::hypot(gc - scene.goal_px.col, gr - scene.goal_px.row) <= 2.0);
  }
  SUBCASE("prompt mode with an unchanged goal image")
  {
    write_file_atomic(
      dir.path() / "same.png", encode_png(annotate_start(scene.map, scene.start_px)));
    doc["oracle_goal"] = (dir.path() / "same.png").string();
    const auto cfg = fixtures::write_config(dir.path() / "plan.json", doc);
    CHECK(
      run({"plan", "--config", cfg.string(), "--out-dir", out.string(), "--start", start, start_y, "--prompt",
           "anywhere"}) == exit_code::kNotFound);
  }
  SUBCASE("replay backend with an empty directory")
  {
    fs::create_directories(dir.path() / "replay");
    json replay{
      {"map_image", scene.map_png.string()},
      {"map_worldfile", scene.map_pgw.string()},
      {"backend", "replay"},
      {"backend_replay_dir", (dir.path() / "replay").string()}};
    const auto cfg = fixtures::write_config(dir.path() / "replay.json", replay);
    CHECK(
      run({"plan", "--config", cfg.string(), "--out-dir", out.string(), "--start", start, start_y, "--prompt",
           "the red roof"}) == exit_code::kBackendFailure);
  }
  SUBCASE("needs exactly one of goal and prompt")
  {
    const auto cfg = fixtures::write_config(dir.path() / "plan.json", doc);
    CHECK(run({"plan", "--config", cfg.string(), "--start", start, start_y}) == exit_code::kInvalidConfig);
    CHECK(
      run({"plan", "--config", cfg.string(), "--start", start, start_y, "--goal", "1", "1", "--prompt", "x"}) ==
      exit_code::kInvalidConfig);
  }
}

TEST_CASE("fetch-mask command")
{
  test_support::TempDir dir;
  const auto scene = fixtures::make_road_scene(dir.path());
  const auto out = dir.path() / "out";
  const auto cfg = fixtures::write_config(dir.path() / "cfg.json", fixtures::oracle_config(scene));
  REQUIRE(run({"fetch-mask", "--config", cfg.string(), "--out-dir", out.string()}) == exit_code::kOk);
  CHECK(read_file_bytes(out / "mask_raw.png") == read_file_bytes(scene.gt_png));
  CHECK(read_mask(out / "mask.png") == scene.gt);
}

TEST_CASE("http backend token comes from the environment")
{
  test_support::TempDir dir;
  const auto scene = fixtures::make_road_scene(dir.path());
  std::string seen;
  httplib::Server server;
  server.Post("/gen", [&](const httplib::Request & req, httplib::Response & res) {
    seen = req.get_header_value("Authorization");
    res.set_content(json{{"image_b64", base64_encode(read_file_bytes(scene.gt_png))}}.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  json doc{
    {"map_image", scene.map_png.string()},
    {"map_worldfile", scene.map_pgw.string()},
    {"backend", "http"},
    {"backend_endpoint", "http://127.0.0.1:" + std::to_string(port) + "/gen"}};
  const auto cfg = fixtures::write_config(dir.path() / "http.json", doc);
  ::setenv("PATHPAINTER_BACKEND_TOKEN", "t0ken", 1);
  const int code = run({"fetch-mask", "--config", cfg.string(), "--out-dir", (dir.path() / "out").string()});
  ::unsetenv("PATHPAINTER_BACKEND_TOKEN");
  server.stop();
  worker.join();
  CHECK(code == exit_code::kOk);
  CHECK(seen == "Bearer t0ken");
}

TEST_CASE("bench-seg command")
{
  test_support::TempDir dir;
  const auto pred = dir.path() / "pred";
  const auto gt = dir.path() / "gt";
  const auto out = dir.path() / "out";
  fs::create_directories(pred);
  fs::create_directories(gt);
  std::mt19937_64 rng(6);
  for (const char * name : {"a.png", "b.png", "c.png"}) {
    const auto m = oracle::random_mask(24, 24, 0.4, rng);
    write_file_atomic(pred / name, encode_mask_png(m));
    write_file_atomic(gt / name, encode_mask_png(m));
  }

  SUBCASE("identical directories")
  {
    REQUIRE(run({"bench-seg", "--pred-dir", pred.string(), "--gt-dir", gt.string(), "--out-dir", out.string()}) ==
            exit_code::kOk);
    const auto report = read_json(out / "seg_report.json");
    CHECK(report.at("n_evaluated") == 3);
    for (const char * key : {"iou", "precision", "recall", "f1"}) CHECK(report.at("mean").at(key) == 1.0);
    CHECK(fs::exists(out / "seg_table.txt"));
  }
  SUBCASE("one size mismatch is flagged")
  {
    write_file_atomic(pred / "b.png", encode_mask_png(TraversabilityMask(10, 10, true)));
    REQUIRE(run({"bench-seg", "--pred-dir", pred.string(), "--gt-dir", gt.string(), "--out-dir", out.string()}) ==
            exit_code::kOk);
    const auto report = read_json(out / "seg_report.json");
    CHECK(report.at("n_evaluated") == 2);
    CHECK(report.at("n_flagged") == 1);
    CHECK(report.at("per_image").at(1).at("error") == "dimension_mismatch");
  }
  SUBCASE("unmatched file names")
  {
    write_file_atomic(pred / "extra.png", encode_mask_png(TraversabilityMask(4, 4, true)));
    CHECK(run({"bench-seg", "--pred-dir", pred.string(), "--gt-dir", gt.string(), "--out-dir", out.string()}) ==
          exit_code::kInvalidConfig);
  }
  SUBCASE("empty directories")
  {
    fs::create_directories(dir.path() / "e1");
    fs::create_directories(dir.path() / "e2");
    CHECK(
      run({"bench-seg", "--pred-dir", (dir.path() / "e1").string(), "--gt-dir", (dir.path() / "e2").string(),
           "--out-dir", out.string()}) == exit_code::kInvalidConfig);
  }
}

TEST_CASE("bench-path command")
{
  test_support::TempDir dir;
  const auto scene = fixtures::make_road_scene(dir.path());
  const auto out = dir.path() / "out";
  const auto gt = scene.gt_png.string();

  SUBCASE("self benchmark is exact and reproducible")
  {
    REQUIRE(run({"bench-path", "--pred", gt, "--gt", gt, "--n", "40", "--seed", "3", "--out-dir", out.string()}) ==
            exit_code::kOk);
    const auto report = read_json(out / "path_bench.json");
    CHECK(report.at("succ") == 1.0);
    CHECK(report.at("valid") == 1.0);
    CHECK(report.at("len_ratio") == 1.0);
    CHECK(report.at("n") == 40);
    CHECK(report.at("mean_plan_time_s").is_null());
    const auto first = fixtures::read_text(out / "path_bench.json");
    const auto out2 = dir.path() / "out2";
    REQUIRE(
      run({"bench-path", "--pred", gt, "--gt", gt, "--n", "40", "--seed", "3", "--parallel", "4", "--out-dir",
           out2.string()}) == exit_code::kOk);
    CHECK(fixtures::read_text(out2 / "path_bench.json") == first);
    CHECK(fixtures::read_text(out2 / "path_bench.txt") == fixtures::read_text(out / "path_bench.txt"));
  }
  SUBCASE("eroded prediction does not raise success")
  {
    auto pred = scene.gt;
    for (int r = 0; r < 512; ++r)
      for (int c = 300; c < 302; ++c) pred.set(c, r, false);
    write_file_atomic(dir.path() / "pred.png", encode_mask_png(pred));
    write_file_atomic(dir.path() / "eroded.png", encode_mask_png(erode(pred, 1)));
    REQUIRE(
      run({"bench-path", "--pred", (dir.path() / "pred.png").string(), "--gt", gt, "--n", "30", "--seed", "9",
           "--out-dir", out.string()}) == exit_code::kOk);
    const double before = read_json(out / "path_bench.json").at("succ").get<double>();
    REQUIRE(
      run({"bench-path", "--pred", (dir.path() / "eroded.png").string(), "--gt", gt, "--n", "30", "--seed", "9",
           "--out-dir", out.string()}) == exit_code::kOk);
    CHECK(read_json(out / "path_bench.json").at("succ").get<double>() <= before);
    CHECK(before < 1.0);
  }
  SUBCASE("disconnected GT exhausts sampling")
  {
    TraversabilityMask blobs(200, 200, false);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        blobs.set(c, r, true);
        blobs.set(c + 190, r + 190, true);
      }
    write_file_atomic(dir.path() / "blobs.png", encode_mask_png(blobs));
    const auto b = (dir.path() / "blobs.png").string();
    CHECK(run({"bench-path", "--pred", b, "--gt", b, "--n", "5", "--min-sep-px", "50", "--out-dir", out.string()}) ==
          exit_code::kNotFound);
  }
}

TEST_CASE("follow-sim command")
{
  test_support::TempDir dir;
  const auto scene = fixtures::make_road_scene(dir.path());
  const auto out = dir.path() / "out";
  const auto path_file = straight_path_file(dir.path(), scene, 200.0);
  json doc{
    {"map_image", scene.map_png.string()},
    {"map_worldfile", scene.map_pgw.string()},
    {"speed_mps", 2.0},
    {"goal_tolerance_m", 2.0}};

  SUBCASE("zero drift")
  {
    const auto cfg = fixtures::write_config(dir.path() / "sim.json", doc);
    REQUIRE(run({"follow-sim", "--config", cfg.string(), "--path", path_file.string(), "--out-dir", out.string()}) ==
            exit_code::kOk);
    for (const char * name : {"trajectory.csv", "sim_summary.json", "trajectory.png"}) CHECK(fs::exists(out / name));
    CHECK(read_json(out / "sim_summary.json").at("success") == true);
  }
  SUBCASE("drift with and without fixes")
  {
    doc["drift_rate"] = 0.01;
    const auto cfg = fixtures::write_config(dir.path() / "sim.json", doc);
    CHECK(
      run({"follow-sim", "--config", cfg.string(), "--path", path_file.string(), "--seed", "7", "--out-dir",
           out.string()}) == exit_code::kOk);
    const auto csv = fixtures::read_text(out / "trajectory.csv");
    CHECK(
      run({"follow-sim", "--config", cfg.string(), "--path", path_file.string(), "--seed", "7", "--out-dir",
           out.string()}) == exit_code::kOk);
    CHECK(fixtures::read_text(out / "trajectory.csv") == csv);
    CHECK(
      run({"follow-sim", "--config", cfg.string(), "--path", path_file.string(), "--seed", "7", "--no-fixes",
           "--out-dir", out.string()}) == exit_code::kSimFailure);
  }
  SUBCASE("malformed path file")
  {
    write_text_atomic(dir.path() / "broken.json", "{\"waypoints\": [{\"x\": 1}]}");
    const auto cfg = fixtures::write_config(dir.path() / "sim.json", doc);
    CHECK(
      run({"follow-sim", "--config", cfg.string(), "--path", (dir.path() / "broken.json").string(), "--out-dir",
           out.string()}) == exit_code::kInvalidConfig);
  }
}
