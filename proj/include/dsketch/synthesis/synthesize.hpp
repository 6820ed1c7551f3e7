#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsketch/core/sketch.hpp"
#include "dsketch/synthesis/disturber.hpp"
#include "dsketch/synthesis/layout.hpp"

namespace dsketch {

struct DisturberSet {
  Group style = Group::kNovice;
  std::optional<DisturberModel> extrinsic;
  std::optional<DisturberModel> intrinsic;
  std::optional<DisturberModel> point;
};

/// Model files inside a models directory: <style>_<kind>.json.
std::filesystem::path model_path(const std::filesystem::path& dir, Group style, DisturberKind kind);
/// Throws kMissingModel when a file is absent.
DisturberSet load_disturber_set(const std::filesystem::path& dir, Group style);
void save_disturber_set(const DisturberSet& set, const std::filesystem::path& dir);
DisturberSet statistical_disturber_set(Group style);

struct SynthesisConfig {
  double n1 = 0.2;
  double n2 = 0.2;
  std::uint64_t seed = 7;
  double eps_c = kConnectionEps;
  LayoutWeights layout;
};

inline constexpr double kMaxRecommendedNoise = 0.3;

/// fit_bezier -> disturb_extrinsic(n1) -> disturb_intrinsic(n2) -> sample ->
/// disturb_points, then layout_init and layout_optimize against the clean
/// Bezier samples of the tracing. Stroke count and order are preserved and
/// the result is marked synthetic. Throws kMissingModel when a disturber is
/// absent and kInvalidArgument for negative noise levels.
Sketch synthesize(const Sketch& tracing, const DisturberSet& models, const SynthesisConfig& config,
                  std::vector<std::string>* warnings = nullptr);

}  // namespace dsketch
