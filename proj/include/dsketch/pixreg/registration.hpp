#pragma once

#include <cstddef>
#include <vector>

#include "dsketch/core/raster.hpp"
#include "dsketch/core/sketch.hpp"
#include "dsketch/pixreg/displacement.hpp"
#include "json.hpp"

namespace dsketch {

inline constexpr double kDefaultOmega = 1.1;
inline constexpr int kDefaultIterations = 10;

struct OverlapCounts {
  std::size_t registered = 0;          // reg_num
  std::size_t tracing = 0;             // trac_num
  std::size_t registered_overlap = 0;  // registered pixels near a tracing pixel
  std::size_t tracing_overlap = 0;     // tracing pixels near a registered pixel
};

/// Overlap counted with a Chebyshev tolerance radius. With tolerance 0 both
/// overlap counts equal the plain intersection size.
OverlapCounts count_overlap(const RasterImage& registered, const RasterImage& tracing,
                            int tolerance);

struct IterationScore {
  int iteration = 0;   // 1-based
  int line_width = 1;
  double precision = 0.0;
  double recall = 0.0;
  double e = 0.0;      // omega * P + R

  friend bool operator==(const IterationScore&, const IterationScore&) = default;
};

/// P, R and E for a registered raster against the tracing raster. P is 0 for
/// an empty registered raster; throws kEmpty for an empty tracing.
IterationScore score(const RasterImage& registered, const RasterImage& tracing, double omega,
                     int tolerance = 1);

struct RegistrationConfig {
  int iterations = kDefaultIterations;
  double omega = kDefaultOmega;
  int tolerance = 1;
  bool content_only = true;
  std::vector<int> width_schedule;  // empty: default_line_width
  DemonsConfig demons;
};

/// 1,1,1,1,1,1,2,3,4,5 for iterations 1..10.
int default_line_width(int iteration);
int line_width_for(const RegistrationConfig& config, int iteration);

struct IterationSnapshot {
  Sketch sketch;
  IterationScore score;
};

struct RegistrationResult {
  std::vector<IterationSnapshot> iterations;
  int chosen = 1;  // 1-based i*
  double omega = kDefaultOmega;
  int tolerance = 1;
  bool content_only = true;

  const IterationSnapshot& best() const { return iterations.at(std::size_t(chosen) - 1); }
  const Sketch& registered() const { return best().sketch; }
};

/// First index of the maximum E (1-based).
int pick_optimal_iteration(const std::vector<IterationScore>& scores);

RegistrationResult register_pixel_level(const Sketch& sketch, const Sketch& tracing,
                                        const RegistrationConfig& config = {});

/// Scores JSON: {"format_version", "omega", "tolerance", "chosen",
/// "iterations": [{i, l, P, R, E}]}.
nlohmann::json registration_scores_json(const RegistrationResult& result);

}  // namespace dsketch
