#include "dsketch/core/sketch_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dsketch/core/error.hpp"

namespace dsketch {
namespace {

using nlohmann::json;

const char* const kKnownTopKeys[] = {"prompt_id", "user_id", "group", "canvas",
                                     "strokes", "format_version"};
const char* const kKnownStrokeKeys[] = {"kind", "width", "points"};

template <std::size_t N>
json unknown_keys(const json& obj, const char* const (&known)[N]) {
  json extra = json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; })) {
      extra[it.key()] = it.value();
    }
  }
  return extra;
}

[[noreturn]] void field_error(std::string_view source, const std::string& field,
                              const std::string& what) {
  fail(ErrorCode::kFormat,
       std::string(source) + ": field '" + field + "': " + what);
}

double number_at(const json& v, std::string_view source, const std::string& field) {
  if (!v.is_number()) field_error(source, field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) field_error(source, field, "non-finite number");
  return d;
}

std::string string_at(const json& obj, const char* key, std::string_view source) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(source, key, "missing");
  if (!it->is_string()) field_error(source, key, "expected a string");
  return it->get<std::string>();
}

}  // namespace

void clean_sketch(Sketch& sketch) {
  std::vector<Stroke> kept;
  kept.reserve(sketch.strokes.size());
  for (auto& stroke : sketch.strokes) {
    std::vector<Point> pts;
    pts.reserve(stroke.points.size());
    for (const auto& p : stroke.points) {
      if (!pts.empty() && distance(pts.back().pos(), p.pos()) < kDuplicatePointEps) {
        continue;
      }
      pts.push_back(p);
    }
    stroke.points = std::move(pts);
    if (stroke.points.size() < 2 || arc_length(stroke) < kMinStrokeArcLength) continue;
    kept.push_back(std::move(stroke));
  }
  sketch.strokes = std::move(kept);
}

Sketch sketch_from_json(const json& j, LoadOptions options, std::string_view source) {
  if (!j.is_object()) fail(ErrorCode::kFormat, std::string(source) + ": top level must be an object");
  Sketch sketch;
  sketch.prompt_id = string_at(j, "prompt_id", source);
  sketch.user_id = string_at(j, "user_id", source);
  try {
    sketch.group = parse_group(string_at(j, "group", source));
  } catch (const Error& e) {
    field_error(source, "group", e.what());
  }
  if (auto it = j.find("canvas"); it != j.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
        !(*it)[1].is_number_integer()) {
      field_error(source, "canvas", "expected [width, height] integers");
    }
    sketch.canvas_width = (*it)[0].get<int>();
    sketch.canvas_height = (*it)[1].get<int>();
    if (sketch.canvas_width <= 0 || sketch.canvas_height <= 0) {
      fail(ErrorCode::kValidation, std::string(source) + ": canvas dimensions must be positive");
    }
  }
  auto strokes_it = j.find("strokes");
  if (strokes_it == j.end() || !strokes_it->is_array()) {
    field_error(source, "strokes", "expected an array");
  }
  for (std::size_t si = 0; si < strokes_it->size(); ++si) {
    const json& js = (*strokes_it)[si];
    const std::string field = "strokes[" + std::to_string(si) + "]";
    if (!js.is_object()) field_error(source, field, "expected an object");
    Stroke stroke;
    if (auto k = js.find("kind"); k != js.end()) {
      if (!k->is_string()) field_error(source, field + ".kind", "expected a string");
      try {
        stroke.kind = parse_stroke_kind(k->get<std::string>());
      } catch (const Error& e) {
        field_error(source, field + ".kind", e.what());
      }
    }
    if (auto w = js.find("width"); w != js.end()) {
      stroke.width = number_at(*w, source, field + ".width");
      if (stroke.width <= 0.0) {
        fail(ErrorCode::kValidation, std::string(source) + ": stroke " +
                                         std::to_string(si) + " has non-positive width");
      }
    }
    auto pts = js.find("points");
    if (pts == js.end() || !pts->is_array()) field_error(source, field + ".points", "expected an array");
    stroke.points.reserve(pts->size());
    for (std::size_t pi = 0; pi < pts->size(); ++pi) {
      const json& jp = (*pts)[pi];
      const std::string pf = field + ".points[" + std::to_string(pi) + "]";
      if (!jp.is_array() || jp.size() != 4) field_error(source, pf, "expected [x, y, t_ms, pressure]");
      Point p{number_at(jp[0], source, pf), number_at(jp[1], source, pf),
              number_at(jp[2], source, pf), number_at(jp[3], source, pf)};
      if (p.pressure < 0.0 || p.pressure > 1.0) {
        fail(ErrorCode::kValidation, std::string(source) + ": stroke " + std::to_string(si) +
                                         " point " + std::to_string(pi) + " pressure outside [0, 1]");
      }
      if (p.t < 0.0) {
        fail(ErrorCode::kValidation, std::string(source) + ": stroke " + std::to_string(si) +
                                         " point " + std::to_string(pi) + " has negative timestamp");
      }
      if (!stroke.points.empty() && p.t < stroke.points.back().t) {
        fail(ErrorCode::kValidation, std::string(source) + ": stroke " + std::to_string(si) +
                                         " has non-monotone timestamps at point " +
                                         std::to_string(pi));
      }
      stroke.points.push_back(p);
    }
    stroke.extra = unknown_keys(js, kKnownStrokeKeys);
    sketch.strokes.push_back(std::move(stroke));
  }
  sketch.extra = unknown_keys(j, kKnownTopKeys);
  if (options.clean) clean_sketch(sketch);
  return sketch;
}

Sketch parse_sketch(std::string_view text, LoadOptions options, std::string_view source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + byte, '\n');
    fail(ErrorCode::kFormat, std::string(source) + ":" + std::to_string(line) +
                                 ": malformed JSON: " + e.what());
  }
  return sketch_from_json(j, options, source);
}

Sketch load_sketch(const std::filesystem::path& path, LoadOptions options) {
  return parse_sketch(read_text_file(path), options, path.string());
}

json sketch_to_json(const Sketch& sketch) {
  json j = sketch.extra.is_object() ? sketch.extra : json::object();
  j["prompt_id"] = sketch.prompt_id;
  j["user_id"] = sketch.user_id;
  j["group"] = std::string(to_string(sketch.group));
  j["canvas"] = {sketch.canvas_width, sketch.canvas_height};
  j["format_version"] = kFormatVersion;
  json strokes = json::array();
  for (const auto& s : sketch.strokes) {
    json js = s.extra.is_object() ? s.extra : json::object();
    js["kind"] = std::string(to_string(s.kind));
    js["width"] = s.width;
    json pts = json::array();
    for (const auto& p : s.points) pts.push_back({p.x, p.y, p.t, p.pressure});
    js["points"] = std::move(pts);
    strokes.push_back(std::move(js));
  }
  j["strokes"] = std::move(strokes);
  return j;
}

void save_sketch(const Sketch& sketch, const std::filesystem::path& path) {
  write_file_atomic(path, dump_json(sketch_to_json(sketch)));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::kIo, "cannot rename into '" + path.string() + "'");
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace dsketch
