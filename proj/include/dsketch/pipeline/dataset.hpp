#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsketch/core/sketch.hpp"
#include "dsketch/pixreg/registration.hpp"
#include "dsketch/simfit/multilevel.hpp"
#include "json.hpp"

namespace dsketch {

inline constexpr std::string_view kRegSuffix = ".reg.json";
inline constexpr std::string_view kLevelsSuffix = ".levels.json";
inline constexpr std::string_view kRegisteredSuffix = ".registered.json";
inline constexpr std::string_view kEffectiveConfigName = "effective-config.json";

struct DatasetItem {
  std::string name;  // file name without ".json"
  std::filesystem::path path;
  Sketch sketch;
};

/// Sketch files of one directory (non-recursive, sorted by name). Pipeline
/// products and the effective config are skipped. Tracings are keyed by
/// prompt_id; every other group is a drawing.
struct Dataset {
  std::filesystem::path dir;
  std::vector<DatasetItem> drawings;
  std::map<std::string, Sketch> tracings;

  const Sketch* tracing_for(const std::string& prompt_id) const;
};

bool is_pipeline_product(const std::filesystem::path& path);
/// Throws kIo for a missing directory and kValidation for two tracings of the
/// same prompt.
Dataset load_dataset(const std::filesystem::path& dir);

std::filesystem::path reg_sidecar(const std::filesystem::path& dir, const std::string& name);
std::filesystem::path levels_sidecar(const std::filesystem::path& dir, const std::string& name);
std::filesystem::path registered_sketch_path(const std::filesystem::path& dir, const std::string& name);

/// File name without the trailing ".json".
std::string sketch_name(const std::filesystem::path& path);

struct RegSidecar {
  std::vector<IterationScore> scores;
  int chosen = 1;
  double omega = 0.0;
  int tolerance = 1;
  Sketch registered;

  double e_star() const { return scores.at(std::size_t(chosen) - 1).e; }
};

/// Scores JSON plus the registered snapshot under "registered".
nlohmann::json reg_sidecar_json(const RegistrationResult& result);
RegSidecar reg_sidecar_from_json(const nlohmann::json& j, std::string_view source);
RegSidecar read_reg_sidecar(const std::filesystem::path& path);
/// A registered sketch given either as a plain sketch file or as a reg sidecar.
Sketch read_registered_sketch(const std::filesystem::path& path);

MultiLevelRegistration read_levels_sidecar(const std::filesystem::path& path, const Sketch& original,
                                           const Sketch& pixel_level);

}  // namespace dsketch
