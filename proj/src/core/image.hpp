// 8-bit grayscale raster plus binary PGM (P5) i/o and resampling helpers.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tubeloc {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, pixels[y * width + x]

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool empty() const { return pixels.empty(); }
};

// Binary PGM, maxval 255. Throws std::runtime_error on malformed input or io failure.
void write_pgm(const std::string& path, const Image& img);
Image read_pgm(const std::string& path);

// Box-filter 2x downsample (averages 2x2 blocks; odd trailing row/col dropped).
Image downsample2(const Image& img);

// Bilinear resample to (out_w, out_h). Pixel centers at integer coordinates.
std::vector<double> resize_bilinear(const Image& img, int out_w, int out_h);

}  // namespace tubeloc
