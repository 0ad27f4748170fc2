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

#include "pathpainter/generation_client.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>

#include "pathpainter/traversability.hpp"

namespace pathpainter
{

std::string to_string(GenerationTask task)
{
  return task == GenerationTask::kMask ? "mask" : "goal";
}

GenerationTask parse_generation_task(const std::string & text)
{
  if (text == "mask") {
    return GenerationTask::kMask;
  }
  if (text == "goal") {
    return GenerationTask::kGoal;
  }
  throw std::invalid_argument("unknown generation task '" + text + "'");
}

void GenerationRequest::validate() const
{
  if (task == GenerationTask::kGoal && prompt.empty()) {
    throw std::invalid_argument("goal requests need a non-empty prompt");
  }
  try {
    (void)decode_png(map_png);
  } catch (const ImageDecodeError & e) {
    throw std::invalid_argument(std::string("request image does not decode: ") + e.what());
  }
}

std::string to_string(BackendKind kind)
{
  switch (kind) {
    case BackendKind::kReplay:
      return "replay";
    case BackendKind::kHttp:
      return "http";
    case BackendKind::kOracle:
      return "oracle";
  }
  return "unknown";
}

BackendKind parse_backend_kind(const std::string & text)
{
  if (text == "replay") {
    return BackendKind::kReplay;
  }
  if (text == "http") {
    return BackendKind::kHttp;
  }
  if (text == "oracle") {
    return BackendKind::kOracle;
  }
  throw std::invalid_argument("unknown backend kind '" + text + "'");
}

void BackendConfig::validate() const
{
  if (!(timeout_s > 0.0)) {
    throw FetchError(FetchError::Kind::kInvalidConfig, "backend timeout must be > 0");
  }
  switch (kind) {
    case BackendKind::kReplay:
      if (replay_dir.empty()) {
        throw FetchError(FetchError::Kind::kInvalidConfig, "replay backend needs replay_dir");
      }
      break;
    case BackendKind::kHttp:
      if (endpoint_url.empty()) {
        throw FetchError(FetchError::Kind::kInvalidConfig, "http backend needs endpoint_url");
      }
      break;
    case BackendKind::kOracle:
      if (oracle_mask.empty() && oracle_goal.empty()) {
        throw FetchError(FetchError::Kind::kInvalidConfig, "oracle backend needs a mask or goal image");
      }
      break;
  }
}

std::string to_string(FetchError::Kind kind)
{
  switch (kind) {
    case FetchError::Kind::kInvalidConfig:
      return "invalid_config";
    case FetchError::Kind::kReplayMiss:
      return "replay_miss";
    case FetchError::Kind::kOracleUnavailable:
      return "oracle_unavailable";
    case FetchError::Kind::kHttpTimeout:
      return "http_timeout";
    case FetchError::Kind::kHttpConnection:
      return "http_connection";
    case FetchError::Kind::kHttpStatus:
      return "http_status";
    case FetchError::Kind::kUndecodableBody:
      return "undecodable_body";
  }
  return "unknown";
}

void draw_star(RgbImage & image, const PixelCoord & center, const StarMarker & star)
{
  const Cell c = to_cell(center);
  std::vector<PixelCoord> vertices;
  vertices.reserve(10);
  for (int i = 0; i < 10; ++i) {
    const double angle = -std::numbers::pi / 2.0 + i * std::numbers::pi / 5.0;
    const double r = (i % 2 == 0) ? star.outer_radius : star.inner_radius;
    vertices.push_back(PixelCoord{c.col + r * std::cos(angle), c.row + r * std::sin(angle)});
  }
  fill_polygon(image, vertices, star.color);
}

RgbImage annotate_start(const BevMap & map, const PixelCoord & start)
{
  if (!map.contains(to_cell(start))) {
    throw std::out_of_range("start lies outside the map");
  }
  RgbImage out = map.raster();
  draw_star(out, start);
  return out;
}

PixelCoord extract_goal(
  const RgbImage & result, const RgbImage & original, const PixelCoord & start, const GoalExtractionParams & params)
{
  if (result.width() != original.width() || result.height() != original.height()) {
    throw std::invalid_argument("result and original images differ in size");
  }
  TraversabilityMask changed(result.width(), result.height());
  std::size_t any = 0;
  for (int r = 0; r < result.height(); ++r) {
    for (int c = 0; c < result.width(); ++c) {
      if (std::hypot(c - start.col, r - start.row) <= params.start_exclusion_px) {
        continue;
      }
      const Rgb a = result.at(c, r);
      const Rgb b = original.at(c, r);
      const int diff = std::max({std::abs(a.r - b.r), std::abs(a.g - b.g), std::abs(a.b - b.b)});
      if (diff >= params.diff_threshold) {
        changed.set(c, r, true);
        ++any;
      }
    }
  }
  if (any == 0) {
    throw NoGoalFound("generated image does not differ from the input outside the start marker");
  }
  const auto components = label_components(changed);
  int best = 0;
  for (int i = 1; i < components.count(); ++i) {
    if (components.sizes[static_cast<std::size_t>(i)] > components.sizes[static_cast<std::size_t>(best)]) {
      best = i;
    }
  }
  const auto best_size = components.sizes[static_cast<std::size_t>(best)];
  if (best_size < params.min_blob_px) {
    throw NoGoalFound(
      "largest change blob has " + std::to_string(best_size) + " px, below the " +
      std::to_string(params.min_blob_px) + " px marker minimum");
  }
  double sum_c = 0.0;
  double sum_r = 0.0;
  for (std::size_t i = 0; i < components.labels.size(); ++i) {
    if (components.labels[i] == best) {
      const Cell c = changed.cell(i);
      sum_c += c.col;
      sum_r += c.row;
    }
  }
  const auto n = static_cast<double>(best_size);
  return PixelCoord{sum_c / n, sum_r / n};
}

std::string request_digest(const GenerationRequest & request)
{
  EVP_MD_CTX * ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 unavailable");
  }
  const auto feed = [ctx](const void * data, std::size_t size) {
    std::uint8_t len[8];
    for (int i = 0; i < 8; ++i) {
      len[i] = static_cast<std::uint8_t>((static_cast<std::uint64_t>(size) >> (8 * i)) & 0xff);
    }
    EVP_DigestUpdate(ctx, len, sizeof(len));
    EVP_DigestUpdate(ctx, data, size);
  };
  const auto task = to_string(request.task);
  feed(task.data(), task.size());
  feed(request.prompt.data(), request.prompt.size());
  feed(request.map_png.data(), request.map_png.size());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_DigestFinal_ex(ctx, digest, &digest_len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < digest_len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

std::string base64_encode(std::span<const std::uint8_t> bytes)
{
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(
    reinterpret_cast<unsigned char *>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string & text)
{
  std::string clean;
  clean.reserve(text.size());
  for (char ch : text) {
    if (ch != '\n' && ch != '\r' && ch != ' ') {
      clean += ch;
    }
  }
  if (clean.size() % 4 != 0) {
    throw std::invalid_argument("base64 length is not a multiple of 4");
  }
  std::vector<std::uint8_t> out(3 * clean.size() / 4);
  const int n = EVP_DecodeBlock(
    out.data(), reinterpret_cast<const unsigned char *>(clean.data()), static_cast<int>(clean.size()));
  if (n < 0) {
    throw std::invalid_argument("invalid base64");
  }
  std::size_t padding = 0;
  if (!clean.empty() && clean.back() == '=') {
    ++padding;
    if (clean.size() >= 2 && clean[clean.size() - 2] == '=') {
      ++padding;
    }
  }
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

std::string encode_http_request(const GenerationRequest & request)
{
  nlohmann::json body;
  body["task"] = to_string(request.task);
  body["prompt"] = request.prompt;
  body["image_b64"] = base64_encode(request.map_png);
  return body.dump();
}

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

GenerationResponse fetch_replay(const BackendConfig & config, const GenerationRequest & request)
{
  const auto t0 = Clock::now();
  const auto file = config.replay_dir / (request_digest(request) + ".png");
  if (!std::filesystem::is_regular_file(file)) {
    throw FetchError(FetchError::Kind::kReplayMiss, "no recorded response " + file.string());
  }
  GenerationResponse response;
  response.image_png = read_file_bytes(file);
  try {
    (void)decode_png(response.image_png);
  } catch (const ImageDecodeError & e) {
    throw FetchError(FetchError::Kind::kUndecodableBody, file.string() + ": " + e.what());
  }
  response.backend_id = "replay";
  response.latency_s = seconds_since(t0);
  return response;
}

GenerationResponse fetch_oracle(const BackendConfig & config, const GenerationRequest & request)
{
  const auto t0 = Clock::now();
  const auto & file = request.task == GenerationTask::kMask ? config.oracle_mask : config.oracle_goal;
  if (file.empty() || !std::filesystem::is_regular_file(file)) {
    throw FetchError(
      FetchError::Kind::kOracleUnavailable, "oracle has no image for the " + to_string(request.task) + " task");
  }
  GenerationResponse response;
  response.image_png = read_file_bytes(file);
  response.backend_id = "oracle";
  response.latency_s = seconds_since(t0);
  return response;
}

struct ParsedUrl
{
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string & url)
{
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw FetchError(FetchError::Kind::kInvalidConfig, "endpoint_url needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

GenerationResponse fetch_http(const BackendConfig & config, const GenerationRequest & request)
{
  const auto [origin, path] = split_url(config.endpoint_url);
  httplib::Client client(origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
    std::chrono::duration<double>(config.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (config.bearer_token && !config.bearer_token->empty()) {
    headers.emplace("Authorization", "Bearer " + *config.bearer_token);
  }

  const auto t0 = Clock::now();
  const auto result = client.Post(path, headers, encode_http_request(request), "application/json");
  const double latency = seconds_since(t0);
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && latency >= config.timeout_s * 0.9)) {
      throw FetchError(FetchError::Kind::kHttpTimeout, "backend timed out after " + std::to_string(latency) + " s");
    }
    throw FetchError(FetchError::Kind::kHttpConnection, "backend request failed: " + httplib::to_string(err));
  }
  if (result->status != 200) {
    throw FetchError(FetchError::Kind::kHttpStatus, "backend returned HTTP " + std::to_string(result->status));
  }
  GenerationResponse response;
  try {
    const auto body = nlohmann::json::parse(result->body);
    response.image_png = base64_decode(body.at("image_b64").get<std::string>());
    (void)decode_png(response.image_png);
  } catch (const std::exception & e) {
    throw FetchError(FetchError::Kind::kUndecodableBody, std::string("backend response unusable: ") + e.what());
  }
  response.backend_id = "http:" + config.endpoint_url;
  response.latency_s = latency;
  return response;
}

}  // namespace

GenerationResponse fetch(const BackendConfig & config, const GenerationRequest & request)
{
  config.validate();
  switch (config.kind) {
    case BackendKind::kReplay:
      return fetch_replay(config, request);
    case BackendKind::kHttp:
      return fetch_http(config, request);
    case BackendKind::kOracle:
      return fetch_oracle(config, request);
  }
  throw FetchError(FetchError::Kind::kInvalidConfig, "unknown backend");
}

}  // namespace pathpainter
