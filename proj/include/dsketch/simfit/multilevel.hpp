#pragma once

#include <utility>
#include <vector>

#include "dsketch/core/sketch.hpp"
#include "dsketch/simfit/similarity.hpp"
#include "json.hpp"

namespace dsketch {

struct SketchLevelFit {
  SimilarityTransform transform;
  Sketch sketch;
};

struct StrokeLevelFit {
  std::vector<SimilarityTransform> transforms;  // one per stroke
  std::vector<bool> fallback;                   // stroke inherited the sketch-level fit
  Sketch sketch;
};

struct MultiLevelRegistration {
  Sketch original;
  Sketch pixel_level;
  SketchLevelFit sketch_level;
  StrokeLevelFit stroke_level;
};

/// Single transform over all point pairs (content strokes only unless
/// include_scaffold), applied to every stroke of the original.
SketchLevelFit register_sketch_level(const Sketch& original, const Sketch& pixel_level,
                                     bool include_scaffold = false);

/// One transform per stroke. Strokes whose own fit is degenerate inherit
/// `fallback` (the sketch-level transform).
StrokeLevelFit register_stroke_level(const Sketch& original, const Sketch& pixel_level,
                                     const SimilarityTransform& fallback);

MultiLevelRegistration register_multi_level(const Sketch& original, const Sketch& pixel_level,
                                            bool include_scaffold = false);

/// Sum of squared point distances between two sketches with identical topology.
double sketch_residual(const Sketch& a, const Sketch& b);

/// {"format_version", "global", "strokes": [...], "fallback": [...],
///  "sketch_level": sketch, "stroke_level": sketch}.
nlohmann::json levels_to_json(const MultiLevelRegistration& m);
/// Reads the transforms and the two transformed sketches; original and
/// pixel-level sketches are supplied by the caller.
MultiLevelRegistration levels_from_json(const nlohmann::json& j, Sketch original,
                                        Sketch pixel_level);

}  // namespace dsketch
