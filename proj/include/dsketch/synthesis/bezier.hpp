#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "dsketch/core/geometry.hpp"
#include "dsketch/core/sketch.hpp"

namespace dsketch {

inline constexpr int kBezierDegree = 5;
inline constexpr std::size_t kControlPoints = 6;
inline constexpr std::size_t kMinSamples = 16;

/// Maps stroke-local coordinates to the canvas: p = centroid + scale * q.
struct StrokeFrame {
  Vec2 centroid;
  double scale = 1.0;  // bounding-box diagonal of the source points, at least 1 px
  Vec2 to_local(Vec2 p) const { return (p - centroid) * (1.0 / scale); }
  Vec2 to_canvas(Vec2 q) const { return centroid + q * scale; }
};

struct BezierStroke {
  std::array<Vec2, kControlPoints> control{};
  std::size_t source_len = 0;
  StrokeFrame frame;
  double max_error = 0.0;  // largest point-to-curve distance of the fit
  // carried through synthesis so sampled strokes keep plausible timing
  double t_start = 0.0;
  double t_end = 0.0;
  double pressure = 0.5;
  StrokeKind kind = StrokeKind::kContent;

  Vec2 at(double u) const;
  Vec2 derivative(double u) const;
  /// The 12 control coordinates in the stroke frame, x0 y0 x1 y1 ...
  std::vector<double> local_coordinates() const;
};

double bernstein(int k, double u);

/// Degree-5 fit with clamped endpoints. The four interior control points are
/// the least-squares solution under chord-length parameters, refined by two
/// foot-point reparameterization passes. Strokes with fewer than six points
/// are regularized toward the straight chord. Throws kInvalidArgument for an
/// empty stroke.
BezierStroke fit_bezier(const Stroke& stroke);

/// `count` points at uniform parameter steps, t interpolated over
/// [t_start, t_end].
Stroke sample_bezier(const BezierStroke& b, std::size_t count);

/// max(16, source_len).
std::size_t sample_count(const BezierStroke& b);

StrokeFrame frame_of(const std::vector<Vec2>& points);

}  // namespace dsketch
