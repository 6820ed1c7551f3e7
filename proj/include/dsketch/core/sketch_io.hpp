#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dsketch/core/sketch.hpp"

namespace dsketch {

inline constexpr std::string_view kToolkitVersion = "1.0.0";
inline constexpr int kFormatVersion = 1;

struct LoadOptions {
  /// Drop near-duplicate consecutive points and degenerate strokes. Pipeline
  /// products (registered snapshots) are read with cleaning off so their
  /// point correspondence with the source drawing survives.
  bool clean = true;
};

inline constexpr double kDuplicatePointEps = 1e-6;
inline constexpr double kMinStrokeArcLength = 2.0;

Sketch load_sketch(const std::filesystem::path& path, LoadOptions options = {});
Sketch parse_sketch(std::string_view text, LoadOptions options = {},
                    std::string_view source = "<memory>");
Sketch sketch_from_json(const nlohmann::json& j, LoadOptions options = {},
                        std::string_view source = "<memory>");
nlohmann::json sketch_to_json(const Sketch& sketch);
void save_sketch(const Sketch& sketch, const std::filesystem::path& path);

/// Removes consecutive points closer than kDuplicatePointEps and drops strokes
/// left with fewer than two points or under kMinStrokeArcLength of arc length.
void clean_sketch(Sketch& sketch);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
/// Two-space indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace dsketch
