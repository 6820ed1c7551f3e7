#include "dsketch/pixreg/registration.hpp"

#include <algorithm>

#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"

namespace dsketch {
namespace {

// Chebyshev dilation by `radius`, as a foreground mask (1 = covered).
std::vector<std::uint8_t> dilate(const RasterImage& image, int radius) {
  const int w = image.width;
  const int h = image.height;
  std::vector<std::uint8_t> rows(std::size_t(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!image.foreground(x, y)) continue;
      for (int xx = std::max(0, x - radius); xx <= std::min(w - 1, x + radius); ++xx) {
        rows[std::size_t(y) * w + xx] = 1;
      }
    }
  }
  std::vector<std::uint8_t> out(std::size_t(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!rows[std::size_t(y) * w + x]) continue;
      for (int yy = std::max(0, y - radius); yy <= std::min(h - 1, y + radius); ++yy) {
        out[std::size_t(yy) * w + x] = 1;
      }
    }
  }
  return out;
}

}  // namespace

OverlapCounts count_overlap(const RasterImage& registered, const RasterImage& tracing,
                            int tolerance) {
  if (registered.width != tracing.width || registered.height != tracing.height) {
    fail(ErrorCode::kInvalidArgument, "rasters differ in size");
  }
  if (tolerance < 0) fail(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  const auto near_tracing = dilate(tracing, tolerance);
  const auto near_registered = dilate(registered, tolerance);
  OverlapCounts c;
  for (std::size_t i = 0; i < registered.pixels.size(); ++i) {
    if (registered.pixels[i] == kForeground) {
      ++c.registered;
      if (near_tracing[i]) ++c.registered_overlap;
    }
    if (tracing.pixels[i] == kForeground) {
      ++c.tracing;
      if (near_registered[i]) ++c.tracing_overlap;
    }
  }
  return c;
}

IterationScore score(const RasterImage& registered, const RasterImage& tracing, double omega,
                     int tolerance) {
  const OverlapCounts c = count_overlap(registered, tracing, tolerance);
  if (c.tracing == 0) fail(ErrorCode::kEmpty, "tracing raster is empty");
  IterationScore s;
  s.precision = c.registered == 0 ? 0.0 : double(c.registered_overlap) / double(c.registered);
  s.recall = double(c.tracing_overlap) / double(c.tracing);
  s.e = omega * s.precision + s.recall;
  return s;
}

int default_line_width(int iteration) { return std::max(1, iteration - 5); }

int line_width_for(const RegistrationConfig& config, int iteration) {
  if (config.width_schedule.empty()) return default_line_width(iteration);
  const std::size_t i = std::size_t(iteration) - 1;
  return config.width_schedule.at(std::min(i, config.width_schedule.size() - 1));
}

int pick_optimal_iteration(const std::vector<IterationScore>& scores) {
  if (scores.empty()) fail(ErrorCode::kInvalidArgument, "no iterations to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].e > scores[best].e) best = i;
  }
  return static_cast<int>(best) + 1;
}

RegistrationResult register_pixel_level(const Sketch& sketch, const Sketch& tracing,
                                        const RegistrationConfig& config) {
  if (config.iterations < 1) fail(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (sketch.canvas_width != tracing.canvas_width || sketch.canvas_height != tracing.canvas_height) {
    fail(ErrorCode::kInvalidArgument, "sketch and tracing canvases differ");
  }
  const RasterImage tracing_thin = rasterize(tracing, 1, config.content_only);
  if (tracing_thin.foreground_count() == 0) fail(ErrorCode::kEmpty, "tracing is empty");
  if (rasterize(sketch, 1, config.content_only).foreground_count() == 0) {
    fail(ErrorCode::kEmpty, "sketch is empty");
  }

  RegistrationResult result;
  result.omega = config.omega;
  result.tolerance = config.tolerance;
  result.content_only = config.content_only;
  Sketch current = sketch;
  std::vector<IterationScore> scores;
  for (int i = 1; i <= config.iterations; ++i) {
    const int l = line_width_for(config, i);
    const RasterImage moving = rasterize(current, l, config.content_only);
    const RasterImage fixed = l == 1 ? tracing_thin : rasterize(tracing, l, config.content_only);
    if (moving.foreground_count() > 0) {
      current = apply_displacement(current, estimate_displacement(moving, fixed, config.demons));
    }
    IterationScore s = score(rasterize(current, 1, config.content_only), tracing_thin,
                             config.omega, config.tolerance);
    s.iteration = i;
    s.line_width = l;
    scores.push_back(s);
    result.iterations.push_back({current, s});
  }
  result.chosen = pick_optimal_iteration(scores);
  return result;
}

nlohmann::json registration_scores_json(const RegistrationResult& result) {
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& it : result.iterations) {
    iters.push_back({{"i", it.score.iteration},
                     {"l", it.score.line_width},
                     {"P", it.score.precision},
                     {"R", it.score.recall},
                     {"E", it.score.e}});
  }
  return {{"format_version", kFormatVersion},
          {"omega", result.omega},
          {"tolerance", result.tolerance},
          {"content_only", result.content_only},
          {"chosen", result.chosen},
          {"iterations", std::move(iters)}};
}

}  // namespace dsketch
