#include "dsketch/core/raster.hpp"

#include <algorithm>

#include "dsketch/core/error.hpp"

namespace dsketch {

std::size_t RasterImage::foreground_count() const {
  return static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), kForeground));
}

void draw_stroke(RasterImage& image, const Stroke& stroke, int line_width) {
  const double radius = 0.5 * line_width;
  const auto& pts = stroke.points;
  if (pts.size() == 1) {
    for_each_capsule_pixel(image.width, image.height, pts[0].pos(), pts[0].pos(), radius,
                           [&](int x, int y, double) { image.set(x, y); });
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    for_each_capsule_pixel(image.width, image.height, pts[i - 1].pos(), pts[i].pos(), radius,
                           [&](int x, int y, double) { image.set(x, y); });
  }
}

RasterImage rasterize_strokes(std::span<const Stroke> strokes, int width, int height,
                              int line_width) {
  if (line_width < 1) fail(ErrorCode::kInvalidArgument, "line width must be >= 1");
  RasterImage image(width, height);
  for (const auto& s : strokes) draw_stroke(image, s, line_width);
  return image;
}

RasterImage rasterize(const Sketch& sketch, int line_width, bool content_only) {
  if (line_width < 1) fail(ErrorCode::kInvalidArgument, "line width must be >= 1");
  RasterImage image(sketch.canvas_width, sketch.canvas_height);
  for (const auto& s : sketch.strokes) {
    if (content_only && !s.is_content()) continue;
    draw_stroke(image, s, line_width);
  }
  return image;
}

Stroke resample_stroke(const Stroke& stroke, double spacing) {
  if (!(spacing > 0.0)) fail(ErrorCode::kInvalidArgument, "resample spacing must be > 0");
  const auto& pts = stroke.points;
  if (pts.size() < 2 || arc_length(stroke) <= 0.0) return stroke;

  Stroke out = stroke;
  out.points.clear();
  out.points.push_back(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Point& a = pts[i - 1];
    const Point& b = pts[i];
    const double len = distance(a.pos(), b.pos());
    // Each original segment is split evenly so original vertices survive and
    // the chain never leaves the polyline.
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
    for (int k = 1; k <= pieces; ++k) {
      if (k == pieces) {
        out.points.push_back(b);
        break;
      }
      const double u = double(k) / pieces;
      out.points.push_back({a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u,
                            a.t + (b.t - a.t) * u, a.pressure + (b.pressure - a.pressure) * u});
    }
  }
  return out;
}

}  // namespace dsketch
