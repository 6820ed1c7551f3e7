#include "dsketch/core/distance.hpp"

#include <cmath>
#include <limits>

#include "dsketch/core/error.hpp"

namespace dsketch {
namespace {

constexpr double kInf = 1e20;

// 1D squared distance transform of a sampled function (lower envelope of
// parabolas).
void transform_1d(const double* f, int n, double* d, std::vector<int>& v, std::vector<double>& z) {
  auto intersect = [&](int q, int p) {
    return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
  };
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const RasterImage& image) {
  if (image.foreground_count() == 0) fail(ErrorCode::kEmpty, "empty raster");
  const int w = image.width;
  const int h = image.height;
  std::vector<double> grid(std::size_t(w) * h);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = image.pixels[i] == kForeground ? 0.0 : kInf;
  }
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = grid[std::size_t(y) * w + x];
    transform_1d(f.data(), h, d.data(), v, z);
    for (int y = 0; y < h; ++y) grid[std::size_t(y) * w + x] = d[y];
  }
  for (int y = 0; y < h; ++y) {
    double* row = grid.data() + std::size_t(y) * w;
    std::copy(row, row + w, f.begin());
    transform_1d(f.data(), w, d.data(), v, z);
    std::copy(d.begin(), d.begin() + w, row);
  }
  return grid;
}

DistanceField distance_transform(const RasterImage& image) {
  DistanceField field{image.width, image.height, squared_distance_transform(image)};
  for (auto& v : field.values) v = std::sqrt(v);
  return field;
}

}  // namespace dsketch
