#include "dsketch/simfit/similarity.hpp"

#include <cmath>

#include "dsketch/core/error.hpp"

namespace dsketch {

Vec2 SimilarityTransform::apply(Vec2 p) const {
  const double r = deg_to_rad(theta_deg);
  const double c = std::cos(r);
  const double s = std::sin(r);
  return {scale * (c * p.x - s * p.y) + tx, scale * (s * p.x + c * p.y) + ty};
}

SimilarityTransform SimilarityTransform::inverse() const {
  SimilarityTransform inv;
  inv.theta_deg = wrap_degrees(-theta_deg);
  inv.scale = 1.0 / scale;
  const Vec2 t = SimilarityTransform{inv.theta_deg, inv.scale, 0.0, 0.0}.apply({tx, ty});
  inv.tx = -t.x;
  inv.ty = -t.y;
  return inv;
}

SimilarityTransform SimilarityTransform::after(const SimilarityTransform& first) const {
  SimilarityTransform out;
  out.theta_deg = wrap_degrees(theta_deg + first.theta_deg);
  out.scale = scale * first.scale;
  const Vec2 t = apply(first.translation());
  out.tx = t.x;
  out.ty = t.y;
  return out;
}

SimilarityTransform fit_similarity(std::span<const Vec2> src, std::span<const Vec2> dst) {
  if (src.size() != dst.size()) {
    fail(ErrorCode::kCorrespondence, "similarity fit: point counts differ (" +
                                         std::to_string(src.size()) + " vs " +
                                         std::to_string(dst.size()) + ")");
  }
  if (src.size() < 2) fail(ErrorCode::kCorrespondence, "similarity fit needs at least 2 pairs");
  const double n = double(src.size());
  Vec2 cs, cd;
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs = cs / n;
  cd = cd / n;
  double sum_dot = 0.0, sum_cross = 0.0, var = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec2 s = src[i] - cs;
    const Vec2 d = dst[i] - cd;
    sum_dot += dot(s, d);
    sum_cross += cross(s, d);
    var += squared_norm(s);
  }
  if (var <= 1e-12) fail(ErrorCode::kDegenerate, "similarity fit: source points coincide");
  const double scale = std::hypot(sum_dot, sum_cross) / var;
  if (scale <= 1e-12) fail(ErrorCode::kDegenerate, "similarity fit: target points coincide");
  SimilarityTransform t;
  t.theta_deg = wrap_degrees(rad_to_deg(std::atan2(sum_cross, sum_dot)));
  t.scale = scale;
  const Vec2 moved = t.apply(cs);
  t.tx = cd.x - moved.x;
  t.ty = cd.y - moved.y;
  return t;
}

double similarity_residual(const SimilarityTransform& t, std::span<const Vec2> src,
                           std::span<const Vec2> dst) {
  double r = 0.0;
  for (std::size_t i = 0; i < src.size() && i < dst.size(); ++i) {
    r += squared_norm(dst[i] - t.apply(src[i]));
  }
  return r;
}

Stroke transform_stroke(const Stroke& stroke, const SimilarityTransform& t) {
  Stroke out = stroke;
  for (auto& p : out.points) {
    const Vec2 q = t.apply(p.pos());
    p.x = q.x;
    p.y = q.y;
  }
  return out;
}

Sketch transform_sketch(const Sketch& sketch, const SimilarityTransform& t) {
  Sketch out = sketch;
  for (auto& s : out.strokes) s = transform_stroke(s, t);
  return out;
}

SimilarityTransform relative_transform(const SimilarityTransform& global,
                                       const SimilarityTransform& local) {
  return local.after(global.inverse());
}

nlohmann::json to_json(const SimilarityTransform& t) {
  return {{"theta_deg", t.theta_deg}, {"scale", t.scale}, {"tx", t.tx}, {"ty", t.ty}};
}

SimilarityTransform similarity_from_json(const nlohmann::json& j) {
  try {
    SimilarityTransform t{j.at("theta_deg").get<double>(), j.at("scale").get<double>(),
                          j.at("tx").get<double>(), j.at("ty").get<double>()};
    if (!(t.scale > 0.0)) fail(ErrorCode::kValidation, "similarity scale must be > 0");
    return t;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("similarity transform: ") + e.what());
  }
}

}  // namespace dsketch
