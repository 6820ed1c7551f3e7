#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dsketch/core/geometry.hpp"
#include "json.hpp"

namespace dsketch {

struct Point {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;         // ms since drawing start
  double pressure = 0.0;  // [0, 1]

  Vec2 pos() const { return {x, y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

enum class StrokeKind { kContent, kScaffold };

enum class Group { kNovice, kProfessional, kTracing, kSynthetic };

struct Stroke {
  std::vector<Point> points;
  StrokeKind kind = StrokeKind::kContent;
  double width = 1.0;
  nlohmann::json extra = nlohmann::json::object();  // unknown keys, kept verbatim

  bool is_content() const { return kind == StrokeKind::kContent; }
};

struct Sketch {
  std::vector<Stroke> strokes;
  std::string prompt_id;
  std::string user_id;
  Group group = Group::kNovice;
  int canvas_width = 800;
  int canvas_height = 800;
  nlohmann::json extra = nlohmann::json::object();

  std::size_t point_count() const;
  std::size_t content_stroke_count() const;
};

std::string_view to_string(StrokeKind kind);
std::string_view to_string(Group group);
/// Throws kFormat on an unknown name.
StrokeKind parse_stroke_kind(std::string_view name);
Group parse_group(std::string_view name);

double arc_length(const Stroke& stroke);
Vec2 centroid(const Sketch& sketch, bool content_only);

/// True when both sketches have the same stroke count and per-stroke point
/// counts.
bool same_topology(const Sketch& a, const Sketch& b);

}  // namespace dsketch
