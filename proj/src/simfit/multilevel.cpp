#include "dsketch/simfit/multilevel.hpp"

#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"

namespace dsketch {
namespace {

void require_correspondence(const Sketch& a, const Sketch& b) {
  if (!same_topology(a, b)) {
    fail(ErrorCode::kCorrespondence,
         "sketches do not correspond point-for-point (stroke or point counts differ)");
  }
}

}  // namespace

SketchLevelFit register_sketch_level(const Sketch& original, const Sketch& pixel_level,
                                     bool include_scaffold) {
  require_correspondence(original, pixel_level);
  const bool use_all = include_scaffold || original.content_stroke_count() == 0;
  std::vector<Vec2> src, dst;
  for (std::size_t i = 0; i < original.strokes.size(); ++i) {
    if (!use_all && !original.strokes[i].is_content()) continue;
    for (std::size_t k = 0; k < original.strokes[i].points.size(); ++k) {
      src.push_back(original.strokes[i].points[k].pos());
      dst.push_back(pixel_level.strokes[i].points[k].pos());
    }
  }
  SketchLevelFit fit;
  fit.transform = fit_similarity(src, dst);
  fit.sketch = transform_sketch(original, fit.transform);
  return fit;
}

StrokeLevelFit register_stroke_level(const Sketch& original, const Sketch& pixel_level,
                                     const SimilarityTransform& fallback) {
  require_correspondence(original, pixel_level);
  StrokeLevelFit fit;
  fit.sketch = original;
  for (std::size_t i = 0; i < original.strokes.size(); ++i) {
    std::vector<Vec2> src, dst;
    for (std::size_t k = 0; k < original.strokes[i].points.size(); ++k) {
      src.push_back(original.strokes[i].points[k].pos());
      dst.push_back(pixel_level.strokes[i].points[k].pos());
    }
    SimilarityTransform t = fallback;
    bool inherited = true;
    try {
      t = fit_similarity(src, dst);
      inherited = false;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate && e.code() != ErrorCode::kCorrespondence) throw;
    }
    fit.transforms.push_back(t);
    fit.fallback.push_back(inherited);
    fit.sketch.strokes[i] = transform_stroke(original.strokes[i], t);
  }
  return fit;
}

MultiLevelRegistration register_multi_level(const Sketch& original, const Sketch& pixel_level,
                                            bool include_scaffold) {
  MultiLevelRegistration m;
  m.original = original;
  m.pixel_level = pixel_level;
  m.sketch_level = register_sketch_level(original, pixel_level, include_scaffold);
  m.stroke_level = register_stroke_level(original, pixel_level, m.sketch_level.transform);
  return m;
}

double sketch_residual(const Sketch& a, const Sketch& b) {
  require_correspondence(a, b);
  double r = 0.0;
  for (std::size_t i = 0; i < a.strokes.size(); ++i) {
    for (std::size_t k = 0; k < a.strokes[i].points.size(); ++k) {
      r += squared_norm(a.strokes[i].points[k].pos() - b.strokes[i].points[k].pos());
    }
  }
  return r;
}

nlohmann::json levels_to_json(const MultiLevelRegistration& m) {
  nlohmann::json strokes = nlohmann::json::array();
  for (const auto& t : m.stroke_level.transforms) strokes.push_back(to_json(t));
  return {{"format_version", kFormatVersion},
          {"global", to_json(m.sketch_level.transform)},
          {"strokes", std::move(strokes)},
          {"fallback", m.stroke_level.fallback},
          {"sketch_level", sketch_to_json(m.sketch_level.sketch)},
          {"stroke_level", sketch_to_json(m.stroke_level.sketch)}};
}

MultiLevelRegistration levels_from_json(const nlohmann::json& j, Sketch original,
                                        Sketch pixel_level) {
  MultiLevelRegistration m;
  try {
    m.sketch_level.transform = similarity_from_json(j.at("global"));
    for (const auto& t : j.at("strokes")) m.stroke_level.transforms.push_back(similarity_from_json(t));
    if (auto it = j.find("fallback"); it != j.end()) {
      m.stroke_level.fallback = it->get<std::vector<bool>>();
    } else {
      m.stroke_level.fallback.assign(m.stroke_level.transforms.size(), false);
    }
    const LoadOptions raw{.clean = false};
    m.sketch_level.sketch = sketch_from_json(j.at("sketch_level"), raw, "levels.sketch_level");
    m.stroke_level.sketch = sketch_from_json(j.at("stroke_level"), raw, "levels.stroke_level");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("levels JSON: ") + e.what());
  }
  m.original = std::move(original);
  m.pixel_level = std::move(pixel_level);
  if (!same_topology(m.original, m.sketch_level.sketch) ||
      !same_topology(m.original, m.stroke_level.sketch) ||
      m.stroke_level.transforms.size() != m.original.strokes.size()) {
    fail(ErrorCode::kCorrespondence, "levels JSON does not match the original sketch");
  }
  return m;
}

}  // namespace dsketch
