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

#include "pathpainter/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "pathpainter/bev_map.hpp"
#include "pathpainter/image.hpp"

#ifndef PATHPAINTER_PROMPT_DIR
#define PATHPAINTER_PROMPT_DIR "assets/prompts"
#endif

namespace pathpainter::cli
{

namespace fs = std::filesystem;
using nlohmann::json;

CostParams RunConfig::planning_params() const
{
  return CostParams{lambda.value_or(2.0), d_sat, heuristic_weight};
}

CostParams RunConfig::benchmark_params() const
{
  return CostParams{lambda.value_or(0.0), d_sat, heuristic_weight};
}

namespace
{

template <typename T>
T get_as(const json & doc, const std::string & key)
{
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception &) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

WorldCoord get_point(const json & doc, const std::string & key)
{
  const auto & v = doc.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError("config key '" + key + "' must be [x, y]");
  }
  return WorldCoord{v[0].get<double>(), v[1].get<double>()};
}

fs::path resolve(const fs::path & base, const std::string & value)
{
  const fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

RunConfig parse_run_config(const json & doc, const fs::path & base_dir)
{
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  RunConfig cfg;
  std::optional<BackendKind> backend_kind;
  BackendConfig backend;
  bool backend_fields = false;

  for (const auto & [key, value] : doc.items()) {
    const auto path_value = [&]() { return resolve(base_dir, get_as<std::string>(doc, key)); };
    if (key == "map_image") cfg.map_image = path_value();
    else if (key == "map_worldfile") cfg.map_worldfile = path_value();
    else if (key == "mask_image") cfg.mask_image = path_value();
    else if (key == "pred_mask") cfg.pred_mask = path_value();
    else if (key == "gt_mask") cfg.gt_mask = path_value();
    else if (key == "pred_dir") cfg.pred_dir = path_value();
    else if (key == "gt_dir") cfg.gt_dir = path_value();
    else if (key == "path_file") cfg.path_file = path_value();
    else if (key == "mask_prompt_file") cfg.mask_prompt_file = path_value();
    else if (key == "goal_prompt_file") cfg.goal_prompt_file = path_value();
    else if (key == "backend") {
      try {
        backend_kind = parse_backend_kind(get_as<std::string>(doc, key));
      } catch (const std::invalid_argument & e) {
        throw ConfigError(e.what());
      }
    } else if (key == "backend_endpoint") {
      backend.endpoint_url = get_as<std::string>(doc, key);
      backend_fields = true;
    } else if (key == "backend_replay_dir") {
      backend.replay_dir = path_value();
      backend_fields = true;
    } else if (key == "backend_timeout_s") {
      backend.timeout_s = get_as<double>(doc, key);
      backend_fields = true;
    } else if (key == "oracle_mask") {
      backend.oracle_mask = path_value();
      backend_fields = true;
    } else if (key == "oracle_goal") {
      backend.oracle_goal = path_value();
      backend_fields = true;
    } else if (key == "binarize_rule") {
      const auto rule = get_as<std::string>(doc, key);
      if (rule == "luminance") cfg.binarize_rule.kind = ThresholdRule::Kind::kLuminance;
      else if (rule == "min_channel") cfg.binarize_rule.kind = ThresholdRule::Kind::kMinChannel;
      else throw ConfigError("binarize_rule must be 'luminance' or 'min_channel'");
    } else if (key == "binarize_threshold") cfg.binarize_rule.threshold = get_as<double>(doc, key);
    else if (key == "morph_radius") cfg.morph_radius = get_as<int>(doc, key);
    else if (key == "plan_on_skeleton") cfg.plan_on_skeleton = get_as<bool>(doc, key);
    else if (key == "simplify_path") cfg.simplify = get_as<bool>(doc, key);
    else if (key == "lambda") cfg.lambda = get_as<double>(doc, key);
    else if (key == "d_sat") cfg.d_sat = get_as<double>(doc, key);
    else if (key == "heuristic_weight") cfg.heuristic_weight = get_as<double>(doc, key);
    else if (key == "drift_rate") cfg.sim.drift_rate = get_as<double>(doc, key);
    else if (key == "heading_noise_std") cfg.sim.heading_noise_std = get_as<double>(doc, key);
    else if (key == "global_fix_hz") cfg.sim.global_fix_hz = get_as<double>(doc, key);
    else if (key == "fixes_enabled") cfg.sim.fixes_enabled = get_as<bool>(doc, key);
    else if (key == "fix_position_noise_std") cfg.sim.fix_position_noise_std = get_as<double>(doc, key);
    else if (key == "fix_heading_noise_std") cfg.sim.fix_heading_noise_std = get_as<double>(doc, key);
    else if (key == "control_hz") cfg.sim.control_hz = get_as<double>(doc, key);
    else if (key == "lookahead_m") cfg.sim.lookahead_m = get_as<double>(doc, key);
    else if (key == "speed_mps") cfg.sim.speed_mps = get_as<double>(doc, key);
    else if (key == "goal_tolerance_m") cfg.sim.goal_tolerance_m = get_as<double>(doc, key);
    else if (key == "max_steps") cfg.sim.max_steps = get_as<std::int64_t>(doc, key);
    else if (key == "out_dir") cfg.out_dir = path_value();
    else if (key == "seed") cfg.seed = get_as<std::uint64_t>(doc, key);
    else if (key == "n") cfg.n = get_as<std::size_t>(doc, key);
    else if (key == "min_sep_px") cfg.min_sep_px = get_as<double>(doc, key);
    else if (key == "parallel") cfg.parallel = get_as<unsigned>(doc, key);
    else if (key == "snap_radius") cfg.snap_radius = get_as<int>(doc, key);
    else if (key == "length_mode") {
      const auto mode = get_as<std::string>(doc, key);
      if (mode == "step_cost") cfg.length_mode = LengthMode::kStepCost;
      else if (mode == "polyline") cfg.length_mode = LengthMode::kPolyline;
      else throw ConfigError("length_mode must be 'step_cost' or 'polyline'");
    } else if (key == "record_timing") cfg.record_timing = get_as<bool>(doc, key);
    else if (key == "dataset") cfg.dataset = get_as<std::string>(doc, key);
    else if (key == "method") cfg.method = get_as<std::string>(doc, key);
    else if (key == "start") cfg.start = get_point(doc, key);
    else if (key == "goal") cfg.goal = get_point(doc, key);
    else if (key == "prompt") cfg.prompt = get_as<std::string>(doc, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (backend_kind) {
    backend.kind = *backend_kind;
    cfg.backend = backend;
  } else if (backend_fields) {
    throw ConfigError("backend fields given without 'backend'");
  }
  return cfg;
}

RunConfig load_run_config(const fs::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error & e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(doc, path.parent_path());
}

void check_referenced_files(const RunConfig & c)
{
  const auto need = [](const std::optional<fs::path> & p, const char * key) {
    if (p && !fs::exists(*p)) {
      throw ConfigError(std::string(key) + " does not exist: " + p->string());
    }
  };
  need(c.map_image, "map_image");
  need(c.map_worldfile, "map_worldfile");
  need(c.mask_image, "mask_image");
  need(c.pred_mask, "pred_mask");
  need(c.gt_mask, "gt_mask");
  need(c.pred_dir, "pred_dir");
  need(c.gt_dir, "gt_dir");
  need(c.path_file, "path_file");
  need(c.mask_prompt_file, "mask_prompt_file");
  need(c.goal_prompt_file, "goal_prompt_file");
  if (c.backend) {
    const auto & b = *c.backend;
    if (b.kind == BackendKind::kReplay && !b.replay_dir.empty() && !fs::is_directory(b.replay_dir)) {
      throw ConfigError("backend_replay_dir does not exist: " + b.replay_dir.string());
    }
    if (!b.oracle_mask.empty() && !fs::exists(b.oracle_mask)) {
      throw ConfigError("oracle_mask does not exist: " + b.oracle_mask.string());
    }
    if (!b.oracle_goal.empty() && !fs::exists(b.oracle_goal)) {
      throw ConfigError("oracle_goal does not exist: " + b.oracle_goal.string());
    }
  }
}

std::string path_to_json(const PathM & path)
{
  std::string out = "{\n  \"waypoints\": [";
  char buf[128];
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    std::snprintf(
      buf, sizeof(buf), "%s\n    {\"x\": %.6f, \"y\": %.6f}", i == 0 ? "" : ",", path.waypoints[i].x,
      path.waypoints[i].y);
    out += buf;
  }
  std::snprintf(
    buf, sizeof(buf), "\n  ],\n  \"cost\": %.6f,\n  \"length_m\": %.6f,\n  \"k\": %zu\n}\n", path.cost,
    path.length_m, path.waypoints.size());
  out += buf;
  return out;
}

PathM path_from_json(const std::string & text)
{
  PathM path;
  try {
    const auto doc = json::parse(text);
    for (const auto & w : doc.at("waypoints")) {
      path.waypoints.push_back(WorldCoord{w.at("x").get<double>(), w.at("y").get<double>()});
    }
    path.cost = doc.value("cost", 0.0);
  } catch (const json::exception & e) {
    throw ConfigError(std::string("malformed path file: ") + e.what());
  }
  if (path.waypoints.empty()) {
    throw ConfigError("path file has no waypoints");
  }
  path.length_m = polyline_length(path.waypoints);
  return path;
}

namespace
{

/// Command-line overrides layered on top of the config file.
struct Overrides
{
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::optional<double> lambda;
  std::optional<double> d_sat;
  std::optional<double> lookahead_m;
  std::optional<std::size_t> n;
  std::optional<double> min_sep_px;
  std::optional<unsigned> parallel;

  std::vector<double> start;
  std::vector<double> goal;
  std::string prompt;
  std::string pred_dir;
  std::string gt_dir;
  std::string pred_mask;
  std::string gt_mask;
  std::string path_file;
  bool no_fixes{false};
};

void add_common_options(CLI::App * cmd, Overrides & o)
{
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--out-dir", o.out_dir, "Directory for output files");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--backend", o.backend, "Generation backend: replay | http | oracle");
  cmd->add_option("--lambda", o.lambda, "Boundary penalty weight");
  cmd->add_option("--d-sat", o.d_sat, "Penalty saturation distance (px)");
  cmd->add_option("--lookahead-m", o.lookahead_m, "Lookahead distance (m)");
  cmd->add_option("--n", o.n, "Number of start-goal pairs");
  cmd->add_option("--min-sep-px", o.min_sep_px, "Minimum start-goal separation (px)");
  cmd->add_option("--parallel", o.parallel, "Worker threads for pair evaluation");
}

RunConfig build_config(const Overrides & o)
{
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.seed) cfg.seed = *o.seed;
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.d_sat) cfg.d_sat = *o.d_sat;
  if (o.lookahead_m) cfg.sim.lookahead_m = *o.lookahead_m;
  if (o.n) cfg.n = *o.n;
  if (o.min_sep_px) cfg.min_sep_px = *o.min_sep_px;
  if (o.parallel) cfg.parallel = *o.parallel;
  if (!o.backend.empty()) {
    BackendConfig b = cfg.backend.value_or(BackendConfig{});
    try {
      b.kind = parse_backend_kind(o.backend);
    } catch (const std::invalid_argument & e) {
      throw ConfigError(e.what());
    }
    cfg.backend = b;
  }
  if (o.start.size() == 2) cfg.start = WorldCoord{o.start[0], o.start[1]};
  if (o.goal.size() == 2) cfg.goal = WorldCoord{o.goal[0], o.goal[1]};
  if (!o.prompt.empty()) cfg.prompt = o.prompt;
  if (!o.pred_dir.empty()) cfg.pred_dir = fs::path(o.pred_dir);
  if (!o.gt_dir.empty()) cfg.gt_dir = fs::path(o.gt_dir);
  if (!o.pred_mask.empty()) cfg.pred_mask = fs::path(o.pred_mask);
  if (!o.gt_mask.empty()) cfg.gt_mask = fs::path(o.gt_mask);
  if (!o.path_file.empty()) cfg.path_file = fs::path(o.path_file);
  if (o.no_fixes) cfg.sim.fixes_enabled = false;
  if (cfg.backend) {
    if (const char * token = std::getenv("PATHPAINTER_BACKEND_TOKEN"); token != nullptr) {
      cfg.backend->bearer_token = std::string(token);
    }
  }
  check_referenced_files(cfg);
  return cfg;
}

std::string read_text(const fs::path & path)
{
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

std::string prompt_template(const std::optional<fs::path> & configured, const char * name)
{
  const fs::path path = configured.value_or(fs::path(PATHPAINTER_PROMPT_DIR) / name);
  if (!fs::exists(path)) {
    throw ConfigError("prompt template not found: " + path.string());
  }
  return read_text(path);
}

std::string fill_instruction(std::string text, const std::string & instruction)
{
  const std::string marker = "{instruction}";
  for (auto pos = text.find(marker); pos != std::string::npos; pos = text.find(marker, pos + instruction.size())) {
    text.replace(pos, marker.size(), instruction);
  }
  return text;
}

BevMap require_map(const RunConfig & cfg)
{
  if (!cfg.map_image || !cfg.map_worldfile) {
    throw ConfigError("map_image and map_worldfile are required");
  }
  try {
    return load_map(*cfg.map_image, *cfg.map_worldfile);
  } catch (const WorldFileError & e) {
    throw ConfigError(e.what());
  } catch (const SingularAffineError & e) {
    throw ConfigError(e.what());
  } catch (const ImageDecodeError & e) {
    throw ConfigError(e.what());
  }
}

RgbImage resize_rgb_nearest(const RgbImage & image, int width, int height)
{
  if (image.width() == width && image.height() == height) {
    return image;
  }
  RgbImage out(width, height);
  for (int r = 0; r < height; ++r) {
    const int sr = std::min(image.height() - 1, static_cast<int>((r + 0.5) * image.height() / height));
    for (int c = 0; c < width; ++c) {
      const int sc = std::min(image.width() - 1, static_cast<int>((c + 0.5) * image.width() / width));
      out.set(c, r, image.at(sc, sr));
    }
  }
  return out;
}

/// Obtains the mask from file or backend and binds it to the map.
TraversabilityMask obtain_mask(const RunConfig & cfg, const BevMap & map, std::vector<std::uint8_t> * raw_png)
{
  RgbImage image;
  if (cfg.mask_image) {
    try {
      image = read_image(*cfg.mask_image);
    } catch (const ImageDecodeError & e) {
      throw ConfigError(e.what());
    }
  } else {
    if (!cfg.backend) {
      throw ConfigError("either mask_image or a backend is required");
    }
    GenerationRequest request;
    request.map_png = encode_png(map.raster());
    request.prompt = prompt_template(cfg.mask_prompt_file, "mask.txt");
    request.task = GenerationTask::kMask;
    const auto response = fetch(*cfg.backend, request);
    try {
      image = decode_png(response.image_png);
    } catch (const ImageDecodeError & e) {
      throw FetchError(FetchError::Kind::kUndecodableBody, e.what());
    }
    if (raw_png != nullptr) {
      *raw_png = response.image_png;
    }
  }
  auto mask = resize_nearest(binarize(image, cfg.binarize_rule), map.width(), map.height());
  return morph_open_close(mask, cfg.morph_radius);
}

void ensure_out_dir(const RunConfig & cfg)
{
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw ConfigError("cannot create out_dir " + cfg.out_dir.string() + ": " + ec.message());
  }
}

const Rgb kPathRed{255, 0, 0};
const Rgb kTrajectoryBlue{0, 0, 255};

RgbImage render_plan_overlay(
  const BevMap & map, const TraversabilityMask & mask, const PathM & path, const PixelCoord & start,
  const PixelCoord & goal)
{
  RgbImage out = map.raster();
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      if (mask.at(c, r)) {
        const Rgb p = out.at(c, r);
        out.set(
          c, r,
          Rgb{
            static_cast<std::uint8_t>(p.r * 0.6), static_cast<std::uint8_t>(p.g * 0.6 + 255 * 0.4),
            static_cast<std::uint8_t>(p.b * 0.6 + 255 * 0.4)});
      }
    }
  }
  for (std::size_t i = 1; i < path.pixel_trace.size(); ++i) {
    draw_line(out, to_cell(path.pixel_trace[i - 1]), to_cell(path.pixel_trace[i]), kPathRed, 1);
  }
  draw_star(out, start);
  draw_star(out, goal, StarMarker{12.0, 5.0, Rgb{255, 215, 0}});
  return out;
}

std::string fmt6(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

json point_json(const WorldCoord & w)
{
  return json{{"x", w.x}, {"y", w.y}};
}

json pixel_json(const PixelCoord & p)
{
  return json{{"col", p.col}, {"row", p.row}};
}

int cmd_plan(const RunConfig & cfg)
{
  if (!cfg.start) {
    throw ConfigError("plan needs a start position (--start X Y)");
  }
  if (cfg.goal.has_value() == cfg.prompt.has_value()) {
    throw ConfigError("plan needs exactly one of --goal or --prompt");
  }
  const BevMap map = require_map(cfg);
  const PixelCoord start_px = map.world_to_pixel(*cfg.start);
  if (!map.contains(to_cell(start_px))) {
    std::cerr << "error: invalid endpoint: start lies outside the map\n";
    return exit_code::kNoPath;
  }

  PixelCoord goal_px;
  if (cfg.prompt) {
    if (!cfg.backend) {
      throw ConfigError("prompt mode needs a backend");
    }
    const RgbImage annotated = annotate_start(map, start_px);
    GenerationRequest request;
    request.map_png = encode_png(annotated);
    request.prompt = fill_instruction(prompt_template(cfg.goal_prompt_file, "goal.txt"), *cfg.prompt);
    request.task = GenerationTask::kGoal;
    const auto response = fetch(*cfg.backend, request);
    RgbImage result;
    try {
      result = decode_png(response.image_png);
    } catch (const ImageDecodeError & e) {
      throw FetchError(FetchError::Kind::kUndecodableBody, e.what());
    }
    result = resize_rgb_nearest(result, map.width(), map.height());
    goal_px = extract_goal(result, annotated, start_px);
  } else {
    goal_px = map.world_to_pixel(*cfg.goal);
  }

  const TraversabilityMask mask = obtain_mask(cfg, map, nullptr);
  const TraversabilityMask planning_mask = cfg.plan_on_skeleton ? skeletonize(mask) : mask;
  const DistanceField field = distance_transform(planning_mask);
  const PlanResult plan = plan_path(planning_mask, field, map, start_px, goal_px, cfg.planning_params());
  if (!plan.ok()) {
    std::cerr << "error: " << to_string(plan.status) << ": " << plan.message << "\n";
    return exit_code::kNoPath;
  }
  PathM path = *plan.path;
  if (cfg.simplify) {
    path = simplify_path(path, planning_mask);
  }

  json summary;
  summary["start"] = {{"world", point_json(*cfg.start)}, {"pixel", pixel_json(start_px)}};
  summary["goal"] = {{"world", point_json(map.pixel_to_world(goal_px))}, {"pixel", pixel_json(goal_px)}};
  summary["goal_source"] = cfg.prompt ? "generated" : "given";
  summary["status"] = to_string(plan.status);
  summary["k"] = path.k();
  summary["cost"] = path.cost;
  summary["length_m"] = path.length_m;

  ensure_out_dir(cfg);
  write_text_atomic(cfg.out_dir / "path.json", path_to_json(path));
  write_text_atomic(cfg.out_dir / "plan_summary.json", summary.dump(2) + "\n");
  write_file_atomic(cfg.out_dir / "mask.png", encode_mask_png(mask));
  write_file_atomic(cfg.out_dir / "overlay.png", encode_png(render_plan_overlay(map, mask, *plan.path, start_px, goal_px)));
  std::cout << "path: k=" << path.k() << " length_m=" << fmt6(path.length_m) << " cost=" << fmt6(path.cost) << "\n";
  return exit_code::kOk;
}

int cmd_fetch_mask(const RunConfig & cfg)
{
  if (!cfg.backend) {
    throw ConfigError("fetch-mask needs a backend");
  }
  RunConfig from_backend = cfg;
  from_backend.mask_image.reset();
  const BevMap map = require_map(cfg);
  std::vector<std::uint8_t> raw;
  const auto mask = obtain_mask(from_backend, map, &raw);
  ensure_out_dir(cfg);
  write_file_atomic(cfg.out_dir / "mask_raw.png", raw);
  write_file_atomic(cfg.out_dir / "mask.png", encode_mask_png(mask));
  std::cout << "mask: " << mask.count() << " of " << mask.size() << " cells traversable\n";
  return exit_code::kOk;
}

json seg_json(const SegMetrics & m)
{
  return json{
    {"iou", m.iou},
    {"precision", m.precision},
    {"recall", m.recall},
    {"f1", m.f1},
    {"tp", m.tp},
    {"fp", m.fp},
    {"fn", m.fn},
    {"undefined",
     {{"iou", m.iou_undefined},
      {"precision", m.precision_undefined},
      {"recall", m.recall_undefined},
      {"f1", m.f1_undefined}}}};
}

std::set<std::string> list_mask_files(const fs::path & dir)
{
  std::set<std::string> names;
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) {
      continue;
    }
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png" || ext == ".tif" || ext == ".tiff") {
      names.insert(entry.path().filename().string());
    }
  }
  return names;
}

int cmd_bench_seg(const RunConfig & cfg)
{
  if (!cfg.pred_dir || !cfg.gt_dir) {
    throw ConfigError("bench-seg needs --pred-dir and --gt-dir");
  }
  const auto pred_names = list_mask_files(*cfg.pred_dir);
  const auto gt_names = list_mask_files(*cfg.gt_dir);
  if (pred_names.empty() || gt_names.empty()) {
    throw ConfigError("bench-seg: prediction or ground-truth directory has no masks");
  }
  std::vector<std::string> unmatched;
  std::set_symmetric_difference(
    pred_names.begin(), pred_names.end(), gt_names.begin(), gt_names.end(), std::back_inserter(unmatched));
  if (!unmatched.empty()) {
    std::string list;
    for (const auto & u : unmatched) list += " " + u;
    throw ConfigError("bench-seg: unmatched files:" + list);
  }

  json per_image = json::array();
  double sums[4] = {0, 0, 0, 0};
  std::size_t evaluated = 0;
  std::size_t flagged = 0;
  std::ostringstream table;
  table << "File                             IoU    Prec.  Rec.   F1\n";
  char line[256];
  for (const auto & name : pred_names) {
    const auto pred = read_mask(*cfg.pred_dir / name, cfg.binarize_rule);
    const auto gt = read_mask(*cfg.gt_dir / name, cfg.binarize_rule);
    json entry;
    entry["file"] = name;
    try {
      const auto m = seg_metrics(pred, gt);
      entry["metrics"] = seg_json(m);
      sums[0] += m.iou;
      sums[1] += m.precision;
      sums[2] += m.recall;
      sums[3] += m.f1;
      ++evaluated;
      std::snprintf(line, sizeof(line), "%-32s %.3f  %.3f  %.3f  %.3f\n", name.c_str(), m.iou, m.precision, m.recall, m.f1);
      table << line;
    } catch (const DimensionMismatch & e) {
      entry["error"] = "dimension_mismatch";
      entry["detail"] = e.what();
      ++flagged;
      std::cerr << "warning: " << name << ": " << e.what() << "\n";
      std::snprintf(line, sizeof(line), "%-32s dimension mismatch\n", name.c_str());
      table << line;
    }
    per_image.push_back(entry);
  }
  json report;
  report["dataset"] = cfg.dataset;
  report["method"] = cfg.method;
  report["n_images"] = pred_names.size();
  report["n_evaluated"] = evaluated;
  report["n_flagged"] = flagged;
  report["per_image"] = per_image;
  if (evaluated > 0) {
    const double n = static_cast<double>(evaluated);
    report["mean"] = {{"iou", sums[0] / n}, {"precision", sums[1] / n}, {"recall", sums[2] / n}, {"f1", sums[3] / n}};
    std::snprintf(line, sizeof(line), "%-32s %.3f  %.3f  %.3f  %.3f\n", "MEAN", sums[0] / n, sums[1] / n, sums[2] / n, sums[3] / n);
    table << line;
  } else {
    report["mean"] = nullptr;
  }
  ensure_out_dir(cfg);
  write_text_atomic(cfg.out_dir / "seg_report.json", report.dump(2) + "\n");
  write_text_atomic(cfg.out_dir / "seg_table.txt", table.str());
  std::cout << table.str();
  return exit_code::kOk;
}

json optional_json(const std::optional<double> & v)
{
  return v ? json(*v) : json(nullptr);
}

int cmd_bench_path(const RunConfig & cfg)
{
  if (!cfg.pred_mask || !cfg.gt_mask) {
    throw ConfigError("bench-path needs --pred and --gt masks");
  }
  const auto pred = read_mask(*cfg.pred_mask, cfg.binarize_rule);
  const auto gt = read_mask(*cfg.gt_mask, cfg.binarize_rule);
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw ConfigError("bench-path: prediction and ground-truth masks differ in size");
  }
  const double min_sep = cfg.min_sep_px.value_or(default_min_separation(gt.width(), gt.height()));
  std::vector<PairSample> pairs;
  try {
    pairs = sample_pairs(gt, cfg.n, min_sep, cfg.seed);
  } catch (const SamplingExhausted & e) {
    std::cerr << "error: sampling exhausted: " << e.what() << " (achieved " << e.achieved() << ")\n";
    return exit_code::kNotFound;
  }
  if (pairs.empty()) {
    throw ConfigError("bench-path: n must be > 0");
  }
  EvalOptions options;
  options.params = cfg.benchmark_params();
  options.length_mode = cfg.length_mode;
  options.snap_radius = cfg.snap_radius;
  options.record_timing = cfg.record_timing;
  const auto records = eval_pairs(pred, gt, pairs, options, cfg.parallel);
  const auto result = aggregate(records);

  const std::string dataset = cfg.dataset.empty() ? cfg.gt_mask->stem().string() : cfg.dataset;
  const std::string method = cfg.method.empty() ? cfg.pred_mask->stem().string() : cfg.method;
  json per_pair = json::array();
  for (const auto & r : records) {
    json e;
    e["index"] = r.index;
    e["start"] = {r.start.col, r.start.row};
    e["goal"] = {r.goal.col, r.goal.row};
    e["status"] = to_string(r.status);
    e["success"] = r.success;
    e["gt_shortest_cost"] = pairs[r.index].gt_shortest_cost;
    if (r.success) {
      e["validity"] = r.validity;
      e["len_ratio"] = r.len_ratio;
      e["path_cells"] = r.path_cells;
    }
    if (cfg.record_timing) {
      e["plan_time_s"] = r.plan_time_s;
    }
    per_pair.push_back(e);
  }
  json report;
  report["dataset"] = dataset;
  report["backend_id"] = method;
  report["n"] = result.n_samples;
  report["n_success"] = result.n_success;
  report["seed"] = cfg.seed;
  report["min_sep_px"] = min_sep;
  report["lambda"] = options.params.lambda;
  report["length_mode"] = cfg.length_mode == LengthMode::kStepCost ? "step_cost" : "polyline";
  report["snap_radius"] = cfg.snap_radius;
  report["succ"] = result.succ;
  report["valid"] = optional_json(result.valid);
  report["len_ratio"] = optional_json(result.len_ratio);
  report["mean_plan_time_s"] = cfg.record_timing ? json(result.mean_plan_time_s) : json(nullptr);
  report["per_pair"] = per_pair;

  const auto cell = [](const std::optional<double> & v) { return v ? fmt6(*v).substr(0, 5) : std::string("  -  "); };
  std::ostringstream table;
  table << "Method               Dataset              Succ.  Valid. Len.   Time (s)\n";
  char line[256];
  std::snprintf(
    line, sizeof(line), "%-20s %-20s %-6s %-6s %-6s %s\n", method.c_str(), dataset.c_str(),
    fmt6(result.succ).substr(0, 5).c_str(), cell(result.valid).c_str(), cell(result.len_ratio).c_str(),
    cfg.record_timing ? fmt6(result.mean_plan_time_s).c_str() : "-");
  table << line;

  ensure_out_dir(cfg);
  write_text_atomic(cfg.out_dir / "path_bench.json", report.dump(2) + "\n");
  write_text_atomic(cfg.out_dir / "path_bench.txt", table.str());
  std::cout << table.str();
  return exit_code::kOk;
}

int cmd_follow_sim(const RunConfig & cfg)
{
  if (!cfg.path_file) {
    throw ConfigError("follow-sim needs --path");
  }
  const PathM path = path_from_json(read_text(*cfg.path_file));
  const BevMap map = require_map(cfg);
  SimConfig sim = cfg.sim;
  sim.rng_seed = cfg.seed;
  try {
    sim.validate();
  } catch (const std::invalid_argument & e) {
    throw ConfigError(e.what());
  }
  const SimResult result = simulate_follow(path, sim);

  RgbImage overlay = map.raster();
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    draw_line(
      overlay, to_cell(map.world_to_pixel(path.waypoints[i - 1])), to_cell(map.world_to_pixel(path.waypoints[i])),
      kPathRed, 1);
  }
  for (std::size_t i = 1; i < result.log.size(); ++i) {
    draw_line(
      overlay, to_cell(map.world_to_pixel(result.log[i - 1].true_pose.position())),
      to_cell(map.world_to_pixel(result.log[i].true_pose.position())), kTrajectoryBlue, 0);
  }

  const auto & last = result.log.back().true_pose;
  json summary;
  summary["success"] = result.success;
  summary["steps"] = result.steps;
  summary["terminal_error_m"] = result.terminal_error_m;
  summary["max_estimate_error_m"] = result.max_estimate_error_m;
  summary["final_true"] = point_json(last.position());
  summary["goal"] = point_json(path.waypoints.back());
  summary["fixes_enabled"] = sim.fixes_enabled;

  ensure_out_dir(cfg);
  write_text_atomic(cfg.out_dir / "trajectory.csv", trajectory_csv(result));
  write_text_atomic(cfg.out_dir / "sim_summary.json", summary.dump(2) + "\n");
  write_file_atomic(cfg.out_dir / "trajectory.png", encode_png(overlay));
  std::cout << (result.success ? "goal reached" : "step budget exhausted") << " after " << result.steps
            << " steps, terminal error " << fmt6(result.terminal_error_m) << " m\n";
  return result.success ? exit_code::kOk : exit_code::kSimFailure;
}

}  // namespace

int run_cli(const std::vector<std::string> & args)
{
  CLI::App app{"BEV-prior navigation planning toolkit"};
  app.require_subcommand(1);
  Overrides o;

  auto * plan = app.add_subcommand("plan", "Plan a path from start to a given or generated goal");
  add_common_options(plan, o);
  plan->add_option("--start", o.start, "Start position in map coordinates (m)")->expected(2);
  plan->add_option("--goal", o.goal, "Goal position in map coordinates (m)")->expected(2);
  plan->add_option("--prompt", o.prompt, "Natural-language destination");

  auto * bench_seg = app.add_subcommand("bench-seg", "Segmentation metrics over matched mask directories");
  add_common_options(bench_seg, o);
  bench_seg->add_option("--pred-dir", o.pred_dir, "Predicted masks");
  bench_seg->add_option("--gt-dir", o.gt_dir, "Ground-truth masks");

  auto * bench_path = app.add_subcommand("bench-path", "Start-goal path-planning benchmark");
  add_common_options(bench_path, o);
  bench_path->add_option("--pred", o.pred_mask, "Predicted mask");
  bench_path->add_option("--gt", o.gt_mask, "Ground-truth mask");

  auto * follow = app.add_subcommand("follow-sim", "Simulate drift-corrected path following");
  add_common_options(follow, o);
  follow->add_option("--path", o.path_file, "Path JSON written by plan");
  follow->add_flag("--no-fixes", o.no_fixes, "Disable global fixes");

  auto * fetch_mask = app.add_subcommand("fetch-mask", "Fetch a traversability mask from the backend");
  add_common_options(fetch_mask, o);

  std::vector<const char *> argv;
  argv.push_back("pathpainter");
  for (const auto & a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return exit_code::kInvalidConfig;
  }

  try {
    const RunConfig cfg = build_config(o);
    if (plan->parsed()) return cmd_plan(cfg);
    if (bench_seg->parsed()) return cmd_bench_seg(cfg);
    if (bench_path->parsed()) return cmd_bench_path(cfg);
    if (follow->parsed()) return cmd_follow_sim(cfg);
    if (fetch_mask->parsed()) return cmd_fetch_mask(cfg);
  } catch (const ConfigError & e) {
    std::cerr << "error: invalid config: " << e.what() << "\n";
    return exit_code::kInvalidConfig;
  } catch (const FetchError & e) {
    std::cerr << "error: backend failure (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == FetchError::Kind::kInvalidConfig ? exit_code::kInvalidConfig : exit_code::kBackendFailure;
  } catch (const NoGoalFound & e) {
    std::cerr << "error: no goal found: " << e.what() << "\n";
    return exit_code::kNotFound;
  } catch (const ImageDecodeError & e) {
    std::cerr << "error: invalid input image: " << e.what() << "\n";
    return exit_code::kInvalidConfig;
  } catch (const std::invalid_argument & e) {
    std::cerr << "error: invalid argument: " << e.what() << "\n";
    return exit_code::kInvalidConfig;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kInternal;
  }
  return exit_code::kInvalidConfig;
}

int run_cli(int argc, char ** argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args);
}

}  // namespace pathpainter::cli
