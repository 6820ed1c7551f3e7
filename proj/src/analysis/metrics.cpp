#include "dsketch/analysis/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dsketch/core/distance.hpp"
#include "dsketch/core/error.hpp"

namespace dsketch {

bool is_valid_drawing(double e_star) { return e_star > kValidityThreshold; }

bool is_valid_drawing(const RegistrationResult& result) {
  return is_valid_drawing(result.best().score.e);
}

namespace {

// Foreground grown by a (2r+1)^2 square, as a separable max filter.
std::vector<std::uint8_t> chebyshev_dilate(const RasterImage& img, int r) {
  const int w = img.width, h = img.height;
  std::vector<std::uint8_t> fg(img.pixels.size());
  for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = img.pixels[i] == kForeground;
  if (r <= 0) return fg;
  std::vector<std::uint8_t> rows(fg.size(), 0), out(fg.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!fg[std::size_t(y) * w + x]) continue;
      for (int k = std::max(0, x - r); k <= std::min(w - 1, x + r); ++k) rows[std::size_t(y) * w + k] = 1;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!rows[std::size_t(y) * w + x]) continue;
      for (int k = std::max(0, y - r); k <= std::min(h - 1, y + r); ++k) out[std::size_t(k) * w + x] = 1;
    }
  return out;
}

std::vector<std::size_t> stroke_pixels(const Stroke& stroke, int width, int height) {
  std::vector<std::size_t> idx;
  auto visit = [&](int x, int y, double) { idx.push_back(std::size_t(y) * width + x); };
  const auto& p = stroke.points;
  if (p.size() == 1) for_each_capsule_pixel(width, height, p[0].pos(), p[0].pos(), 0.5, visit);
  for (std::size_t i = 1; i < p.size(); ++i)
    for_each_capsule_pixel(width, height, p[i - 1].pos(), p[i].pos(), 0.5, visit);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

double overlap_rate(const Stroke& stroke, const std::vector<std::uint8_t>& near, int width,
                    int height) {
  const std::vector<std::size_t> px = stroke_pixels(stroke, width, height);
  if (px.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i : px) hit += near[i];
  return double(hit) / double(px.size());
}

bool has_content(const Sketch& s) { return s.content_stroke_count() > 0; }

}  // namespace

double stroke_overlap_rate(const Stroke& stroke, const RasterImage& tracing, int tolerance) {
  return overlap_rate(stroke, chebyshev_dilate(tracing, tolerance), tracing.width, tracing.height);
}

std::vector<double> stroke_overlap_rates(const Sketch& sketch, const Sketch& tracing,
                                         int tolerance) {
  const RasterImage trac = rasterize(tracing, 1, true);
  const auto near = chebyshev_dilate(trac, tolerance);
  std::vector<double> rates;
  for (const Stroke& s : sketch.strokes)
    rates.push_back(overlap_rate(s, near, trac.width, trac.height));
  return rates;
}

std::vector<bool> valid_strokes(const Sketch& stroke_level, const Sketch& tracing,
                                double threshold, int tolerance) {
  std::vector<bool> flags;
  for (double r : stroke_overlap_rates(stroke_level, tracing, tolerance)) flags.push_back(r >= threshold);
  return flags;
}

std::vector<double> closest_distances(const std::vector<RasterImage>& from,
                                      const std::vector<RasterImage>& to) {
  if (from.empty() || to.empty()) fail(ErrorCode::kEmpty, "closest distances need non-empty groups");
  RasterImage all(to[0].width, to[0].height);
  for (const RasterImage& r : to) {
    if (r.width != all.width || r.height != all.height)
      fail(ErrorCode::kInvalidArgument, "raster sizes differ");
    for (std::size_t i = 0; i < r.pixels.size(); ++i)
      if (r.pixels[i] == kForeground) all.pixels[i] = kForeground;
  }
  const DistanceField d = distance_transform(all);
  std::vector<double> out;
  for (const RasterImage& r : from) {
    if (r.width != all.width || r.height != all.height)
      fail(ErrorCode::kInvalidArgument, "raster sizes differ");
    for (std::size_t i = 0; i < r.pixels.size(); ++i)
      if (r.pixels[i] == kForeground) out.push_back(d.values[i]);
  }
  return out;
}

Histogram closest_distance_histogram(const std::vector<Sketch>& from,
                                     const std::vector<Sketch>& to, const HistogramSpec& spec) {
  std::vector<RasterImage> a, b;
  for (const Sketch& s : from) a.push_back(rasterize(s, 1, true));
  for (const Sketch& s : to) b.push_back(rasterize(s, 1, true));
  Histogram h = spec.make();
  h.add_all(closest_distances(a, b));
  return h;
}

RasterImage compute_cdr(const std::vector<RasterImage>& drawings, double rho) {
  if (drawings.size() < 2) fail(ErrorCode::kInvalidArgument, "CDR needs at least two drawings");
  const int w = drawings[0].width, h = drawings[0].height;
  RasterImage cdr(w, h);
  std::vector<DistanceField> fields;
  for (const RasterImage& r : drawings) {
    if (r.width != w || r.height != h) fail(ErrorCode::kInvalidArgument, "raster sizes differ");
    if (r.foreground_count() == 0) return cdr;
    fields.push_back(distance_transform(r));
  }
  for (std::size_t i = 0; i < cdr.pixels.size(); ++i) {
    bool on_any = false, near_all = true;
    for (const DistanceField& f : fields) {
      on_any = on_any || f.values[i] == 0.0;
      near_all = near_all && f.values[i] <= rho;
    }
    if (on_any && near_all) cdr.pixels[i] = kForeground;
  }
  return cdr;
}

RasterImage compute_cdr(const std::vector<Sketch>& drawings, double rho) {
  std::vector<RasterImage> r;
  for (const Sketch& s : drawings) r.push_back(rasterize(s, 1, true));
  return compute_cdr(r, rho);
}

Vec2 object_center(const Sketch& tracing) {
  const RasterImage r = rasterize(tracing, 1, has_content(tracing));
  Vec2 sum;
  std::size_t n = 0;
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      if (r.foreground(x, y)) {
        sum += Vec2{double(x), double(y)};
        ++n;
      }
  return n == 0 ? centroid(tracing, false) : sum / double(n);
}

DrawingErrors scaffold_errors(const MultiLevelRegistration& multi, const Sketch& tracing,
                              int tolerance) {
  DrawingErrors e;
  const SimilarityTransform& g = multi.sketch_level.transform;
  e.e_gr = std::abs(wrap_degrees(g.theta_deg));
  e.e_gt = norm(g.translation_about(object_center(tracing)));
  e.e_gs = std::abs(g.scale - 1.0);

  const Sketch& strokes = multi.stroke_level.sketch;
  const bool content = has_content(strokes);
  const RasterImage trac = rasterize(tracing, 1, true);
  const auto near = chebyshev_dilate(trac, tolerance);
  std::size_t fitted = 0, considered = 0, incorrect = 0;
  for (std::size_t i = 0; i < strokes.strokes.size(); ++i) {
    if (content && !strokes.strokes[i].is_content()) continue;
    ++considered;
    if (overlap_rate(strokes.strokes[i], near, trac.width, trac.height) < kIncorrectStrokeRate) ++incorrect;
    const bool fallback = i < multi.stroke_level.fallback.size() && multi.stroke_level.fallback[i];
    if (fallback || i >= multi.stroke_level.transforms.size()) continue;
    const SimilarityTransform rel = relative_transform(g, multi.stroke_level.transforms[i]);
    e.e_lr += std::abs(wrap_degrees(rel.theta_deg));
    Stroke placed = strokes.strokes[i];
    if (i < multi.sketch_level.sketch.strokes.size()) placed = multi.sketch_level.sketch.strokes[i];
    Vec2 c;
    for (const Point& p : placed.points) c += p.pos();
    if (!placed.points.empty()) c = c / double(placed.points.size());
    e.e_lt += norm(rel.translation_about(c));
    e.e_ls += std::abs(rel.scale - 1.0);
    ++fitted;
  }
  if (fitted > 0) {
    e.e_lr /= double(fitted);
    e.e_lt /= double(fitted);
    e.e_ls /= double(fitted);
  }
  e.e_p = considered ? double(incorrect) / double(considered) : 0.0;
  return e;
}

std::vector<double> point_displacements(const Sketch& stroke_level, const Sketch& pixel_level) {
  if (!same_topology(stroke_level, pixel_level))
    fail(ErrorCode::kCorrespondence, "sketches differ in stroke or point counts");
  std::vector<double> d;
  for (std::size_t i = 0; i < stroke_level.strokes.size(); ++i) {
    const auto& a = stroke_level.strokes[i].points;
    const auto& b = pixel_level.strokes[i].points;
    for (std::size_t k = 0; k < a.size(); ++k) d.push_back(distance(a[k].pos(), b[k].pos()));
  }
  return d;
}

Histogram pixel_displacement_histogram(const Sketch& stroke_level, const Sketch& pixel_level,
                                       const HistogramSpec& spec) {
  Histogram h = spec.make();
  h.add_all(point_displacements(stroke_level, pixel_level));
  return h;
}

LineImageScore compare_line_image(const RasterImage& image, const Sketch& registered,
                                  int tolerance, bool content_only) {
  if (image.width != registered.canvas_width || image.height != registered.canvas_height)
    fail(ErrorCode::kInvalidArgument, "image size differs from the sketch canvas");
  if (image.foreground_count() == 0) fail(ErrorCode::kEmpty, "line image has no foreground");
  const IterationScore s = score(image, rasterize(registered, 1, content_only), 1.0, tolerance);
  return {s.precision, s.recall};
}

}  // namespace dsketch
