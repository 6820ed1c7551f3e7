#include "dsketch/pipeline/dataset.hpp"

#include <algorithm>

#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"

namespace dsketch {
namespace fs = std::filesystem;

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

nlohmann::json parse_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

}  // namespace

const Sketch* Dataset::tracing_for(const std::string& prompt_id) const {
  const auto it = tracings.find(prompt_id);
  return it == tracings.end() ? nullptr : &it->second;
}

bool is_pipeline_product(const fs::path& path) {
  const std::string n = path.filename().string();
  return ends_with(n, kRegSuffix) || ends_with(n, kLevelsSuffix) || ends_with(n, kRegisteredSuffix) ||
         n == kEffectiveConfigName || n == "summary.json";
}

std::string sketch_name(const fs::path& path) {
  std::string n = path.filename().string();
  if (ends_with(n, ".json")) n.resize(n.size() - 5);
  return n;
}

Dataset load_dataset(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::kIo, "dataset directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (is_pipeline_product(entry.path())) continue;
    files.push_back(entry.path());
  }
  if (ec) fail(ErrorCode::kIo, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  Dataset d;
  d.dir = dir;
  for (const fs::path& f : files) {
    Sketch s = load_sketch(f);
    if (s.group == Group::kTracing) {
      const std::string prompt = s.prompt_id;
      if (!d.tracings.emplace(prompt, std::move(s)).second)
        fail(ErrorCode::kValidation, "two tracings for prompt '" + prompt + "' in " + dir.string());
    } else {
      d.drawings.push_back({sketch_name(f), f, std::move(s)});
    }
  }
  return d;
}

fs::path reg_sidecar(const fs::path& dir, const std::string& name) {
  return dir / (name + std::string(kRegSuffix));
}

fs::path levels_sidecar(const fs::path& dir, const std::string& name) {
  return dir / (name + std::string(kLevelsSuffix));
}

fs::path registered_sketch_path(const fs::path& dir, const std::string& name) {
  return dir / (name + std::string(kRegisteredSuffix));
}

nlohmann::json reg_sidecar_json(const RegistrationResult& result) {
  nlohmann::json j = registration_scores_json(result);
  j["registered"] = sketch_to_json(result.registered());
  return j;
}

RegSidecar reg_sidecar_from_json(const nlohmann::json& j, std::string_view source) {
  const std::string src(source);
  try {
    RegSidecar r;
    if (j.at("format_version").get<int>() != kFormatVersion)
      fail(ErrorCode::kFormat, src + ": unsupported format_version");
    r.omega = j.at("omega").get<double>();
    r.tolerance = j.at("tolerance").get<int>();
    r.chosen = j.at("chosen").get<int>();
    for (const auto& it : j.at("iterations")) {
      IterationScore s;
      s.iteration = it.at("i").get<int>();
      s.line_width = it.at("l").get<int>();
      s.precision = it.at("P").get<double>();
      s.recall = it.at("R").get<double>();
      s.e = it.at("E").get<double>();
      r.scores.push_back(s);
    }
    if (r.chosen < 1 || std::size_t(r.chosen) > r.scores.size())
      fail(ErrorCode::kFormat, src + ": chosen iteration out of range");
    r.registered = sketch_from_json(j.at("registered"), LoadOptions{false}, source);
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, src + ": " + e.what());
  }
}

RegSidecar read_reg_sidecar(const fs::path& path) {
  return reg_sidecar_from_json(parse_json_file(path), path.string());
}

Sketch read_registered_sketch(const fs::path& path) {
  const nlohmann::json j = parse_json_file(path);
  if (j.is_object() && j.contains("registered") && j.contains("iterations"))
    return reg_sidecar_from_json(j, path.string()).registered;
  return sketch_from_json(j, LoadOptions{false}, path.string());
}

MultiLevelRegistration read_levels_sidecar(const fs::path& path, const Sketch& original,
                                           const Sketch& pixel_level) {
  try {
    return levels_from_json(parse_json_file(path), original, pixel_level);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

}  // namespace dsketch
