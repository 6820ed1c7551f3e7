#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dsketch/core/sketch.hpp"

namespace dsketch {

inline constexpr std::uint8_t kForeground = 0;
inline constexpr std::uint8_t kBackground = 255;

/// Binary raster, row-major. Pixel (x, y) has its center at integer
/// coordinates (x, y) in canvas space.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(int w, int h) : width(w), height(h), pixels(std::size_t(w) * h, kBackground) {}

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool foreground(int x, int y) const { return pixels[std::size_t(y) * width + x] == kForeground; }
  void set(int x, int y) { pixels[std::size_t(y) * width + x] = kForeground; }
  std::size_t foreground_count() const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

/// Draws each stroke as a chain of capsules of diameter line_width. A pixel is
/// set when its center lies within line_width / 2 of some segment. Pixels
/// outside the canvas are clipped.
RasterImage rasterize(const Sketch& sketch, int line_width, bool content_only);
RasterImage rasterize_strokes(std::span<const Stroke> strokes, int width, int height,
                              int line_width);
void draw_stroke(RasterImage& image, const Stroke& stroke, int line_width);

/// Visits every pixel covered by the capsule around segment [a, b] with the
/// given radius, passing the pixel and the segment parameter of its projection.
template <typename Fn>
void for_each_capsule_pixel(int width, int height, Vec2 a, Vec2 b, double radius, Fn&& fn);

Stroke resample_stroke(const Stroke& stroke, double spacing);

// ---------------------------------------------------------------------------

template <typename Fn>
void for_each_capsule_pixel(int width, int height, Vec2 a, Vec2 b, double radius, Fn&& fn) {
  const double r2 = radius * radius + 1e-9;
  const int x0 = std::max(0, static_cast<int>(std::ceil(std::min(a.x, b.x) - radius - 1e-9)));
  const int x1 = std::min(width - 1, static_cast<int>(std::floor(std::max(a.x, b.x) + radius + 1e-9)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(std::min(a.y, b.y) - radius - 1e-9)));
  const int y1 = std::min(height - 1, static_cast<int>(std::floor(std::max(a.y, b.y) + radius + 1e-9)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 p{double(x), double(y)};
      const double u = project_to_segment(p, a, b);
      if (squared_norm(p - (a + (b - a) * u)) <= r2) fn(x, y, u);
    }
  }
}

}  // namespace dsketch
