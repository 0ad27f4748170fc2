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

#ifndef PATHPAINTER__IMAGE_HPP_
#define PATHPAINTER__IMAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathpainter/geometry.hpp"

namespace pathpainter
{

class ImageDecodeError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Rgb
{
  std::uint8_t r{0};
  std::uint8_t g{0};
  std::uint8_t b{0};

  friend bool operator==(const Rgb &, const Rgb &) = default;
};

/// Row-major RGB8 raster.
class RgbImage
{
public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }
  bool contains(int col, int row) const
  {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }

  Rgb at(int col, int row) const;
  void set(int col, int row, Rgb value);

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }

  friend bool operator==(const RgbImage &, const RgbImage &) = default;

private:
  int width_{0};
  int height_{0};
  std::vector<std::uint8_t> data_;
};

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path & path);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path & path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path & path, const std::string & text);

/// Decodes PNG bytes (any bit depth or color type) to RGB8; alpha is dropped.
RgbImage decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const RgbImage & image);
/// 8-bit grayscale PNG.
std::vector<std::uint8_t> encode_gray_png(int width, int height, std::span<const std::uint8_t> gray);

/// Reads a PNG or TIFF (uncompressed or deflate) file as RGB8.
RgbImage read_image(const std::filesystem::path & path);
RgbImage decode_image(std::span<const std::uint8_t> bytes);

// Drawing helpers used for overlays and markers. All clip at the borders.
void draw_line(RgbImage & image, Cell a, Cell b, Rgb color, int radius = 0);
void draw_disk(RgbImage & image, Cell center, int radius, Rgb color);
/// Fills every pixel whose center lies inside the polygon (even-odd rule).
void fill_polygon(RgbImage & image, std::span<const PixelCoord> vertices, Rgb color);

}  // namespace pathpainter

#endif  // PATHPAINTER__IMAGE_HPP_
