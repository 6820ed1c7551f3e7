#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dsketch/core/raster.hpp"
#include "dsketch/core/sketch.hpp"

namespace dsketch {

/// Dense per-pixel forward displacement (px), row-major.
struct DisplacementField {
  int width = 0;
  int height = 0;
  std::vector<float> dx;
  std::vector<float> dy;

  static DisplacementField zero(int width, int height);
  static DisplacementField constant(int width, int height, Vec2 v);

  Vec2 at(int x, int y) const {
    const std::size_t i = std::size_t(y) * width + x;
    return {dx[i], dy[i]};
  }
  /// Bilinear interpolation; positions outside the grid use the nearest edge.
  Vec2 sample(Vec2 p) const;
};

/// Moves every point by the interpolated field vector. Points are not
/// clamped to the canvas.
Sketch apply_displacement(const Sketch& sketch, const DisplacementField& field);

/// "DSDF" magic, u32 LE width and height, then (dx, dy) f32 LE pairs.
std::string encode_field(const DisplacementField& field);
DisplacementField decode_field(std::string_view bytes);
void write_field(const DisplacementField& field, const std::filesystem::path& path);
DisplacementField read_field(const std::filesystem::path& path);

struct DemonsConfig {
  double sigma_field = 8.0;          // Gaussian applied to every update (px)
  int pyramid_levels = 3;            // factors 4, 2, 1
  int max_steps_per_level = 60;
  double regularization = 0.05;      // weight of the diffusion term
  double grid_spacing = 4.0;         // control grid spacing (px)
  double min_relative_decrease = 1e-4;
};

/// Demons-style estimator on distance transforms. Minimises the mean squared
/// fixed-image distance at warped moving-foreground pixels plus a diffusion
/// penalty; every accepted step strictly lowers that objective.
DisplacementField estimate_displacement(const RasterImage& moving, const RasterImage& fixed,
                                        const DemonsConfig& config = {});

/// Mean distance-to-fixed over the warped moving foreground (px).
double mean_warped_distance(const RasterImage& moving, const RasterImage& fixed,
                            const DisplacementField& field);

}  // namespace dsketch
