#pragma once

#include <vector>

#include "dsketch/core/raster.hpp"

namespace dsketch {

/// Euclidean distance (px) from each pixel to the nearest foreground pixel.
struct DistanceField {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[std::size_t(y) * width + x]; }
};

/// Exact Euclidean distance transform (separable lower-envelope algorithm of
/// Felzenszwalb and Huttenlocher). Throws kEmpty on an all-background image.
DistanceField distance_transform(const RasterImage& image);

/// Squared distances, same algorithm, without the final square root.
std::vector<double> squared_distance_transform(const RasterImage& image);

}  // namespace dsketch
