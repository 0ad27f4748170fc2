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

#include "pathpainter/image.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

namespace pathpainter
{

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height)
{
  if (width < 0 || height < 0) {
    throw std::invalid_argument("image dimensions must be non-negative");
  }
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

Rgb RgbImage::at(int col, int row) const
{
  const auto i = (static_cast<std::size_t>(row) * width_ + col) * 3;
  return Rgb{data_[i], data_[i + 1], data_[i + 2]};
}

void RgbImage::set(int col, int row, Rgb value)
{
  const auto i = (static_cast<std::size_t>(row) * width_ + col) * 3;
  data_[i] = value.r;
  data_[i + 1] = value.g;
  data_[i + 2] = value.b;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path & path, std::span<const std::uint8_t> bytes)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw std::runtime_error("short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_text_atomic(const std::filesystem::path & path, const std::string & text)
{
  write_file_atomic(
    path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

namespace
{

struct PngReadCursor
{
  std::span<const std::uint8_t> bytes;
  std::size_t offset{0};
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t length)
{
  auto * cursor = static_cast<PngReadCursor *>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->bytes.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, cursor->bytes.data() + cursor->offset, length);
  cursor->offset += length;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length)
{
  auto * out = static_cast<std::vector<std::uint8_t> *>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

[[noreturn]] void png_error_throw(png_structp, png_const_charp message)
{
  throw ImageDecodeError(std::string("png: ") + message);
}

void png_warning_ignore(png_structp, png_const_charp) {}

bool is_png(std::span<const std::uint8_t> bytes)
{
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool is_tiff(std::span<const std::uint8_t> bytes)
{
  if (bytes.size() < 4) {
    return false;
  }
  const bool le = bytes[0] == 'I' && bytes[1] == 'I' && bytes[2] == 42 && bytes[3] == 0;
  const bool be = bytes[0] == 'M' && bytes[1] == 'M' && bytes[2] == 0 && bytes[3] == 42;
  return le || be;
}

// Minimal read-only in-memory stream for libtiff.
struct TiffMemory
{
  std::span<const std::uint8_t> bytes;
  toff_t offset{0};
};

tsize_t tiff_read(thandle_t h, tdata_t buf, tsize_t size)
{
  auto * m = static_cast<TiffMemory *>(h);
  const auto avail = static_cast<tsize_t>(m->bytes.size()) - static_cast<tsize_t>(m->offset);
  const auto n = std::max<tsize_t>(0, std::min(size, avail));
  std::memcpy(buf, m->bytes.data() + m->offset, static_cast<std::size_t>(n));
  m->offset += static_cast<toff_t>(n);
  return n;
}

tsize_t tiff_write(thandle_t, tdata_t, tsize_t) { return 0; }

toff_t tiff_seek(thandle_t h, toff_t off, int whence)
{
  auto * m = static_cast<TiffMemory *>(h);
  switch (whence) {
    case SEEK_SET:
      m->offset = off;
      break;
    case SEEK_CUR:
      m->offset += off;
      break;
    case SEEK_END:
      m->offset = m->bytes.size() + off;
      break;
    default:
      return static_cast<toff_t>(-1);
  }
  return m->offset;
}

int tiff_close(thandle_t) { return 0; }
toff_t tiff_size(thandle_t h) { return static_cast<TiffMemory *>(h)->bytes.size(); }
int tiff_map(thandle_t, tdata_t *, toff_t *) { return 0; }
void tiff_unmap(thandle_t, tdata_t, toff_t) {}

RgbImage decode_tiff(std::span<const std::uint8_t> bytes)
{
  TiffMemory mem{bytes, 0};
  TIFFSetErrorHandler(nullptr);
  TIFFSetWarningHandler(nullptr);
  TIFF * tif = TIFFClientOpen(
    "memory", "rm", &mem, tiff_read, tiff_write, tiff_seek, tiff_close, tiff_size, tiff_map, tiff_unmap);
  if (tif == nullptr) {
    throw ImageDecodeError("tiff: cannot open stream");
  }
  std::uint32_t w = 0;
  std::uint32_t h = 0;
  TIFFGetField(tif, TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(tif, TIFFTAG_IMAGELENGTH, &h);
  if (w == 0 || h == 0) {
    TIFFClose(tif);
    throw ImageDecodeError("tiff: empty image");
  }
  std::vector<std::uint32_t> rgba(static_cast<std::size_t>(w) * h);
  const int ok = TIFFReadRGBAImageOriented(tif, w, h, rgba.data(), ORIENTATION_TOPLEFT, 0);
  TIFFClose(tif);
  if (!ok) {
    throw ImageDecodeError("tiff: unsupported or corrupt raster");
  }
  RgbImage image(static_cast<int>(w), static_cast<int>(h));
  for (std::uint32_t r = 0; r < h; ++r) {
    for (std::uint32_t c = 0; c < w; ++c) {
      const auto px = rgba[static_cast<std::size_t>(r) * w + c];
      image.set(
        static_cast<int>(c), static_cast<int>(r),
        Rgb{
          static_cast<std::uint8_t>(TIFFGetR(px)), static_cast<std::uint8_t>(TIFFGetG(px)),
          static_cast<std::uint8_t>(TIFFGetB(px))});
    }
  }
  return image;
}

std::vector<std::uint8_t> encode_png_rows(int width, int height, int color_type, int channels, const std::uint8_t * data)
{
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
  if (png == nullptr) {
    throw std::runtime_error("png: cannot create write struct");
  }
  png_infop info = png_create_info_struct(png);
  try {
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(
      png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
      PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const auto stride = static_cast<std::size_t>(width) * channels;
    for (int r = 0; r < height; ++r) {
      png_write_row(png, const_cast<png_bytep>(data + static_cast<std::size_t>(r) * stride));
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

RgbImage decode_png(std::span<const std::uint8_t> bytes)
{
  if (!is_png(bytes)) {
    throw ImageDecodeError("png: bad signature");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
  if (png == nullptr) {
    throw std::runtime_error("png: cannot create read struct");
  }
  png_infop info = png_create_info_struct(png);
  PngReadCursor cursor{bytes, 0};
  RgbImage image;
  try {
    png_set_read_fn(png, &cursor, png_read_from_span);
    png_read_info(png, info);
    const auto color_type = png_get_color_type(png, info);
    const auto bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
      png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
      png_set_expand_gray_1_2_4_to_8(png);
    }
    if (bit_depth == 16) {
      png_set_strip_16(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
      png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    const auto w = static_cast<int>(png_get_image_width(png, info));
    const auto h = static_cast<int>(png_get_image_height(png, info));
    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(w) * 3) {
      throw ImageDecodeError("png: unexpected row layout after conversion");
    }
    image = RgbImage(w, h);
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int r = 0; r < h; ++r) {
      rows[static_cast<std::size_t>(r)] = image.bytes().data() + static_cast<std::size_t>(r) * w * 3;
    }
    png_read_image(png, rows.data());
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

std::vector<std::uint8_t> encode_png(const RgbImage & image)
{
  if (image.empty()) {
    throw std::invalid_argument("cannot encode an empty image");
  }
  return encode_png_rows(image.width(), image.height(), PNG_COLOR_TYPE_RGB, 3, image.bytes().data());
}

std::vector<std::uint8_t> encode_gray_png(int width, int height, std::span<const std::uint8_t> gray)
{
  if (width <= 0 || height <= 0 || gray.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("gray buffer does not match dimensions");
  }
  return encode_png_rows(width, height, PNG_COLOR_TYPE_GRAY, 1, gray.data());
}

RgbImage decode_image(std::span<const std::uint8_t> bytes)
{
  if (is_png(bytes)) {
    return decode_png(bytes);
  }
  if (is_tiff(bytes)) {
    return decode_tiff(bytes);
  }
  throw ImageDecodeError("unrecognized image format (expected PNG or TIFF)");
}

RgbImage read_image(const std::filesystem::path & path)
{
  const auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const ImageDecodeError & e) {
    throw ImageDecodeError(path.string() + ": " + e.what());
  }
}

void draw_disk(RgbImage & image, Cell center, int radius, Rgb color)
{
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      if (dc * dc + dr * dr > radius * radius) {
        continue;
      }
      const int c = center.col + dc;
      const int r = center.row + dr;
      if (image.contains(c, r)) {
        image.set(c, r, color);
      }
    }
  }
}

void draw_line(RgbImage & image, Cell a, Cell b, Rgb color, int radius)
{
  // Bresenham.
  int dc = std::abs(b.col - a.col);
  int dr = -std::abs(b.row - a.row);
  const int sc = a.col < b.col ? 1 : -1;
  const int sr = a.row < b.row ? 1 : -1;
  int err = dc + dr;
  Cell p = a;
  while (true) {
    draw_disk(image, p, radius, color);
    if (p == b) {
      break;
    }
    const int e2 = 2 * err;
    if (e2 >= dr) {
      err += dr;
      p.col += sc;
    }
    if (e2 <= dc) {
      err += dc;
      p.row += sr;
    }
  }
}

void fill_polygon(RgbImage & image, std::span<const PixelCoord> vertices, Rgb color)
{
  if (vertices.size() < 3) {
    return;
  }
  double min_c = vertices[0].col;
  double max_c = min_c;
  double min_r = vertices[0].row;
  double max_r = min_r;
  for (const auto & v : vertices) {
    min_c = std::min(min_c, v.col);
    max_c = std::max(max_c, v.col);
    min_r = std::min(min_r, v.row);
    max_r = std::max(max_r, v.row);
  }
  const int c0 = std::max(0, static_cast<int>(std::floor(min_c)));
  const int c1 = std::min(image.width() - 1, static_cast<int>(std::ceil(max_c)));
  const int r0 = std::max(0, static_cast<int>(std::floor(min_r)));
  const int r1 = std::min(image.height() - 1, static_cast<int>(std::ceil(max_r)));
  const std::size_t n = vertices.size();
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      bool inside = false;
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto & vi = vertices[i];
        const auto & vj = vertices[j];
        if ((vi.row > r) != (vj.row > r)) {
          const double x = vj.col + (r - vj.row) * (vi.col - vj.col) / (vi.row - vj.row);
          if (c < x) {
            inside = !inside;
          }
        }
      }
      if (inside) {
        image.set(c, r, color);
      }
    }
  }
}

}  // namespace pathpainter
