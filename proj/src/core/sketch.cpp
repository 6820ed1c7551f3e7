#include "dsketch/core/sketch.hpp"

#include "dsketch/core/error.hpp"

namespace dsketch {

std::size_t Sketch::point_count() const {
  std::size_t n = 0;
  for (const auto& s : strokes) n += s.points.size();
  return n;
}

std::size_t Sketch::content_stroke_count() const {
  std::size_t n = 0;
  for (const auto& s : strokes) n += s.is_content() ? 1 : 0;
  return n;
}

std::string_view to_string(StrokeKind kind) {
  return kind == StrokeKind::kContent ? "content" : "scaffold";
}

std::string_view to_string(Group group) {
  switch (group) {
    case Group::kNovice: return "novice";
    case Group::kProfessional: return "professional";
    case Group::kTracing: return "tracing";
    case Group::kSynthetic: return "synthetic";
  }
  return "novice";
}

StrokeKind parse_stroke_kind(std::string_view name) {
  if (name == "content") return StrokeKind::kContent;
  if (name == "scaffold") return StrokeKind::kScaffold;
  fail(ErrorCode::kFormat, "unknown stroke kind '" + std::string(name) + "'");
}

Group parse_group(std::string_view name) {
  if (name == "novice") return Group::kNovice;
  if (name == "professional") return Group::kProfessional;
  if (name == "tracing") return Group::kTracing;
  if (name == "synthetic") return Group::kSynthetic;
  fail(ErrorCode::kFormat, "unknown group '" + std::string(name) + "'");
}

double arc_length(const Stroke& stroke) {
  double len = 0.0;
  for (std::size_t i = 1; i < stroke.points.size(); ++i) {
    len += distance(stroke.points[i - 1].pos(), stroke.points[i].pos());
  }
  return len;
}

Vec2 centroid(const Sketch& sketch, bool content_only) {
  Vec2 sum;
  std::size_t n = 0;
  for (const auto& s : sketch.strokes) {
    if (content_only && !s.is_content()) continue;
    for (const auto& p : s.points) {
      sum += p.pos();
      ++n;
    }
  }
  return n == 0 ? Vec2{} : sum / static_cast<double>(n);
}

bool same_topology(const Sketch& a, const Sketch& b) {
  if (a.strokes.size() != b.strokes.size()) return false;
  for (std::size_t i = 0; i < a.strokes.size(); ++i) {
    if (a.strokes[i].points.size() != b.strokes[i].points.size()) return false;
  }
  return true;
}

}  // namespace dsketch
