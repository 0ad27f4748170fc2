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

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "oracles.hpp"
#include "pathpainter/generation_client.hpp"
#include "test_support.hpp"

using namespace pathpainter;

namespace
{

BevMap gray_map(int w, int h)
{
  return BevMap(test_support::gray_raster(w, h), Affine{1, 0, 0, -1, 0, 0});
}

std::size_t differing_pixels(const RgbImage & a, const RgbImage & b)
{
  std::size_t n = 0;
  for (int r = 0; r < a.height(); ++r)
    for (int c = 0; c < a.width(); ++c) n += !(a.at(c, r) == b.at(c, r));
  return n;
}

/// Local HTTP server on an ephemeral port, stopped on destruction.
class StubServer
{
public:
  explicit StubServer(httplib::Server::Handler handler)
  {
    server_.Post("/generate", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer()
  {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/generate"; }

private:
  httplib::Server server_;
  int port_{0};
  std::thread thread_;
};

GenerationRequest sample_request(GenerationTask task = GenerationTask::kMask)
{
  return GenerationRequest{encode_png(test_support::gray_raster(16, 16)), "draw the roads", task};
}

}  // namespace

TEST_CASE("annotate_start")
{
  const auto map = gray_map(512, 512);
  const PixelCoord start{256, 256};
  const auto annotated = annotate_start(map, start);
  CHECK(map.raster() == test_support::gray_raster(512, 512));

  SUBCASE("changes stay inside a 25x25 window")
  {
    for (int r = 0; r < 512; ++r)
      for (int c = 0; c < 512; ++c)
        if (!(annotated.at(c, r) == map.raster().at(c, r))) {
          CHECK(std::abs(c - 256) <= 12);
          CHECK(std::abs(r - 256) <= 12);
        }
    CHECK(annotated.at(256, 256) == Rgb{0, 255, 0});
  }
  SUBCASE("idempotent")
  {
    const BevMap again(annotated, map.affine());
    CHECK(annotate_start(again, start) == annotated);
    CHECK(annotate_start(map, start) == annotated);
  }
  SUBCASE("constant star pixel count away from borders")
  {
    RgbImage blank(100, 100, Rgb{0, 0, 0});
    draw_star(blank, {50, 50});
    const auto reference = differing_pixels(blank, RgbImage(100, 100, Rgb{0, 0, 0}));
    CHECK(reference > 100);
    CHECK(reference < 500);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> pos(30.0, 480.0);
    for (int i = 0; i < 50; ++i) {
      const auto out = annotate_start(map, {pos(rng), pos(rng)});
      CHECK(differing_pixels(out, map.raster()) == reference);
    }
  }
  CHECK_THROWS_AS(annotate_start(map, {-1, 10}), std::out_of_range);
  CHECK_THROWS_AS(annotate_start(map, {10, 512}), std::out_of_range);
}

TEST_CASE("extract_goal")
{
  const auto map = gray_map(512, 512);
  const auto original = map.raster();

  SUBCASE("unchanged image")
  {
    CHECK_THROWS_AS(extract_goal(original, original, {50, 50}), NoGoalFound);
  }
  SUBCASE("star stamped at (400, 100)")
  {
    const auto stamped = annotate_start(map, {400, 100});
    const auto g = extract_goal(stamped, original, {50, 50});
    CHECK(std::hypot(g.col - 400, g.row - 100) <= 2.0);
  }
  SUBCASE("two blobs picks the larger one")
  {
    auto img = original;
    // 20x10 = 200 px and 6x5 = 30 px rectangles
    for (int r = 300; r < 310; ++r)
      for (int c = 300; c < 320; ++c) img.set(c, r, Rgb{255, 0, 0});
    for (int r = 100; r < 105; ++r)
      for (int c = 100; c < 106; ++c) img.set(c, r, Rgb{255, 0, 0});
    const auto g = extract_goal(img, original, {10, 10});
    CHECK(g.col == doctest::Approx(309.5));
    CHECK(g.row == doctest::Approx(304.5));
  }
  SUBCASE("only a tiny blob")
  {
    auto img = original;
    for (int c = 200; c < 205; ++c) img.set(c, 200, Rgb{255, 255, 255});
    CHECK_THROWS_AS(extract_goal(img, original, {10, 10}), NoGoalFound);
  }
  SUBCASE("changes near the start are ignored")
  {
    const auto with_start = annotate_start(map, {100, 100});
    CHECK_THROWS_AS(extract_goal(with_start, original, {100, 100}), NoGoalFound);
  }
  SUBCASE("property: 50 random stamps recovered within 2 px")
  {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(40.0, 471.0);
    int recovered = 0;
    for (int i = 0; i < 50; ++i) {
      const PixelCoord start{pos(rng), pos(rng)};
      PixelCoord goal{};
      do {
        goal = {pos(rng), pos(rng)};
      } while (std::hypot(goal.col - start.col, goal.row - start.row) < 40.0 + 12.0);
      const auto stamped = annotate_start(BevMap(annotate_start(map, start), map.affine()), goal);
      const auto g = extract_goal(stamped, annotate_start(map, start), start);
      const auto c = to_cell(goal);
      recovered += std::hypot(g.col - c.col, g.row - c.row) <= 2.0;
    }
    CHECK(recovered == 50);
  }
  CHECK_THROWS_AS(extract_goal(original, RgbImage(3, 3), {0, 0}), std::invalid_argument);
}

TEST_CASE("request validation and digest")
{
  GenerationRequest goal{encode_png(RgbImage(2, 2)), "", GenerationTask::kGoal};
  CHECK_THROWS(goal.validate());
  goal.prompt = "go to the red roof";
  CHECK_NOTHROW(goal.validate());
  GenerationRequest junk{{1, 2, 3}, "x", GenerationTask::kMask};
  CHECK_THROWS(junk.validate());

  const auto a = sample_request();
  auto b = a;
  CHECK(request_digest(a) == request_digest(b));
  CHECK(request_digest(a).size() == 64);
  b.prompt += " ";
  CHECK(request_digest(a) != request_digest(b));
  b = a;
  b.task = GenerationTask::kGoal;
  CHECK(request_digest(a) != request_digest(b));
  // Moving bytes between fields changes the digest.
  GenerationRequest c{a.map_png, "ab", GenerationTask::kMask};
  GenerationRequest d{a.map_png, "a", GenerationTask::kMask};
  d.prompt = "a";
  CHECK(request_digest(c) != request_digest(d));
}

TEST_CASE("base64")
{
  // RFC 4648 test vectors
  const std::vector<std::pair<std::string, std::string>> vectors{
    {"", ""}, {"f", "Zg=="}, {"fo", "Zm8="}, {"foo", "Zm9v"}, {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="},
    {"foobar", "Zm9vYmFy"}};
  for (const auto & [plain, encoded] : vectors) {
    const std::vector<std::uint8_t> bytes(plain.begin(), plain.end());
    CHECK(base64_encode(bytes) == encoded);
    CHECK(base64_decode(encoded) == bytes);
  }
  CHECK_THROWS(base64_decode("abc"));
}

TEST_CASE("backend config validation")
{
  BackendConfig replay;
  replay.kind = BackendKind::kReplay;
  CHECK_THROWS_AS(replay.validate(), FetchError);
  BackendConfig http;
  http.kind = BackendKind::kHttp;
  CHECK_THROWS_AS(http.validate(), FetchError);
  http.endpoint_url = "http://127.0.0.1:1/x";
  http.timeout_s = 0.0;
  CHECK_THROWS_AS(http.validate(), FetchError);
  CHECK(parse_backend_kind("replay") == BackendKind::kReplay);
  CHECK_THROWS(parse_backend_kind("gemini"));
}

TEST_CASE("replay backend")
{
  test_support::TempDir dir;
  BackendConfig cfg;
  cfg.kind = BackendKind::kReplay;
  cfg.replay_dir = dir.path();
  const auto request = sample_request();

  try {
    (void)fetch(cfg, request);
    FAIL("expected a replay miss");
  } catch (const FetchError & e) {
    CHECK(e.kind() == FetchError::Kind::kReplayMiss);
  }

  const auto recorded = encode_png(RgbImage(16, 16, Rgb{255, 255, 255}));
  write_file_atomic(dir.path() / (request_digest(request) + ".png"), recorded);
  const auto first = fetch(cfg, request);
  const auto second = fetch(cfg, request);
  CHECK(first.image_png == recorded);
  CHECK(second.image_png == first.image_png);
  CHECK(first.backend_id == "replay");
  CHECK(first.latency_s >= 0.0);

  auto other = request;
  other.prompt = "something else";
  CHECK_THROWS_AS(fetch(cfg, other), FetchError);
}

TEST_CASE("oracle backend")
{
  test_support::TempDir dir;
  const auto mask_png = encode_png(RgbImage(8, 8, Rgb{255, 255, 255}));
  write_file_atomic(dir.path() / "gt.png", mask_png);
  BackendConfig cfg;
  cfg.kind = BackendKind::kOracle;
  cfg.oracle_mask = dir.path() / "gt.png";
  const auto response = fetch(cfg, sample_request());
  CHECK(response.image_png == mask_png);
  CHECK(response.backend_id == "oracle");
  try {
    (void)fetch(cfg, sample_request(GenerationTask::kGoal));
    FAIL("expected the oracle to have no goal image");
  } catch (const FetchError & e) {
    CHECK(e.kind() == FetchError::Kind::kOracleUnavailable);
  }
}

TEST_CASE("http backend")
{
  const auto fixed_png = encode_png(RgbImage(12, 9, Rgb{1, 2, 3}));
  BackendConfig cfg;
  cfg.kind = BackendKind::kHttp;
  cfg.timeout_s = 5.0;

  SUBCASE("returns the served PNG")
  {
    std::string seen_auth;
    nlohmann::json seen_body;
    StubServer stub([&](const httplib::Request & req, httplib::Response & res) {
      seen_auth = req.get_header_value("Authorization");
      seen_body = nlohmann::json::parse(req.body);
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      res.set_content(nlohmann::json{{"image_b64", base64_encode(fixed_png)}}.dump(), "application/json");
    });
    cfg.endpoint_url = stub.url();
    cfg.bearer_token = "secret-token";
    const auto request = sample_request();
    const auto response = fetch(cfg, request);
    CHECK(response.image_png == fixed_png);
    CHECK(response.latency_s > 0.0);
    CHECK(seen_auth == "Bearer secret-token");
    CHECK(seen_body.at("task") == "mask");
    CHECK(seen_body.at("prompt") == "draw the roads");
    CHECK(base64_decode(seen_body.at("image_b64").get<std::string>()) == request.map_png);
  }
  SUBCASE("non-200 status")
  {
    StubServer stub([](const httplib::Request &, httplib::Response & res) {
      res.status = 503;
      res.set_content("busy", "text/plain");
    });
    cfg.endpoint_url = stub.url();
    try {
      (void)fetch(cfg, sample_request());
      FAIL("expected an HTTP status error");
    } catch (const FetchError & e) {
      CHECK(e.kind() == FetchError::Kind::kHttpStatus);
    }
  }
  SUBCASE("undecodable body")
  {
    StubServer stub([](const httplib::Request &, httplib::Response & res) {
      res.set_content(R"({"image_b64": "bm90IGEgcG5n"})", "application/json");
    });
    cfg.endpoint_url = stub.url();
    try {
      (void)fetch(cfg, sample_request());
      FAIL("expected an undecodable body error");
    } catch (const FetchError & e) {
      CHECK(e.kind() == FetchError::Kind::kUndecodableBody);
    }
  }
  SUBCASE("timeout")
  {
    StubServer stub([&](const httplib::Request &, httplib::Response & res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(1500));
      res.set_content(nlohmann::json{{"image_b64", base64_encode(fixed_png)}}.dump(), "application/json");
    });
    cfg.endpoint_url = stub.url();
    cfg.timeout_s = 0.3;
    try {
      (void)fetch(cfg, sample_request());
      FAIL("expected a timeout");
    } catch (const FetchError & e) {
      CHECK(e.kind() == FetchError::Kind::kHttpTimeout);
    }
  }
  SUBCASE("connection refused")
  {
    std::string url;
    {
      StubServer stub([](const httplib::Request &, httplib::Response &) {});
      url = stub.url();
    }
    cfg.endpoint_url = url;
    try {
      (void)fetch(cfg, sample_request());
      FAIL("expected a connection error");
    } catch (const FetchError & e) {
      CHECK(e.kind() == FetchError::Kind::kHttpConnection);
    }
  }
}
