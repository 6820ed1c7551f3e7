#pragma once

#include <span>
#include <vector>

#include "dsketch/core/geometry.hpp"
#include "dsketch/core/sketch.hpp"
#include "json.hpp"

namespace dsketch {

/// p' = scale * Rot(theta) * p + (tx, ty), theta in degrees within (-180, 180].
struct SimilarityTransform {
  double theta_deg = 0.0;
  double scale = 1.0;
  double tx = 0.0;
  double ty = 0.0;

  static SimilarityTransform identity() { return {}; }

  Vec2 apply(Vec2 p) const;
  Vec2 translation() const { return {tx, ty}; }
  /// Translation left once rotation and scale are taken about `center`.
  Vec2 translation_about(Vec2 center) const { return apply(center) - center; }
  SimilarityTransform inverse() const;
  /// Returns the transform applying `first` and then `*this`.
  SimilarityTransform after(const SimilarityTransform& first) const;
};

/// Least-squares similarity from src to dst, closed form. Throws kDegenerate
/// when src points coincide or the fitted scale collapses to zero, and
/// kCorrespondence when the sizes differ or fewer than two pairs are given.
SimilarityTransform fit_similarity(std::span<const Vec2> src, std::span<const Vec2> dst);

double similarity_residual(const SimilarityTransform& t, std::span<const Vec2> src,
                           std::span<const Vec2> dst);

Stroke transform_stroke(const Stroke& stroke, const SimilarityTransform& t);
Sketch transform_sketch(const Sketch& sketch, const SimilarityTransform& t);

/// local composed with the inverse of global: the stroke transform left over
/// once the sketch-level one is factored out.
SimilarityTransform relative_transform(const SimilarityTransform& global,
                                       const SimilarityTransform& local);

nlohmann::json to_json(const SimilarityTransform& t);
SimilarityTransform similarity_from_json(const nlohmann::json& j);

}  // namespace dsketch
