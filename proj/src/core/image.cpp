#include "core/image.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tubeloc {

void write_pgm(const std::string& path, const Image& img) {
  if (img.width <= 0 || img.height <= 0)
    throw std::runtime_error("write_pgm: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_pgm: cannot open " + path);
  char header[64];
  const int n = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", img.width, img.height);
  out.write(header, n);
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out)
    throw std::runtime_error("write_pgm: write failed for " + path);
}

namespace {

int read_pgm_token(std::istream& in) {
  // Skips whitespace and '#' comments, then parses one non-negative integer.
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c))
    throw std::runtime_error("read_pgm: malformed header");
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

}  // namespace

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("read_pgm: cannot open " + path);
  char magic[2];
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5')
    throw std::runtime_error("read_pgm: not a binary PGM: " + path);
  const int w = read_pgm_token(in);
  const int h = read_pgm_token(in);
  const int maxval = read_pgm_token(in);
  if (w <= 0 || h <= 0 || maxval != 255)
    throw std::runtime_error("read_pgm: unsupported PGM parameters in " + path);
  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (!in)
    throw std::runtime_error("read_pgm: truncated pixel data in " + path);
  return img;
}

Image downsample2(const Image& img) {
  Image out(img.width / 2, img.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const int s = img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) +
                    img.at(2 * x, 2 * y + 1) + img.at(2 * x + 1, 2 * y + 1);
      out.at(x, y) = static_cast<std::uint8_t>((s + 2) / 4);
    }
  }
  return out;
}

std::vector<double> resize_bilinear(const Image& img, int out_w, int out_h) {
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
  const double sx = out_w > 1 ? double(img.width - 1) / (out_w - 1) : 0.0;
  const double sy = out_h > 1 ? double(img.height - 1) / (out_h - 1) : 0.0;
  for (int y = 0; y < out_h; ++y) {
    const double fy = y * sy;
    const int y0 = std::min(int(fy), img.height - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double fx = x * sx;
      const int x0 = std::min(int(fx), img.width - 1);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      const double v = (1 - wy) * ((1 - wx) * img.at(x0, y0) + wx * img.at(x1, y0)) +
                       wy * ((1 - wx) * img.at(x0, y1) + wx * img.at(x1, y1));
      out[static_cast<std::size_t>(y) * out_w + x] = v;
    }
  }
  return out;
}

}  // namespace tubeloc
