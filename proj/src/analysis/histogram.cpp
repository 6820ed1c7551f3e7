#include "dsketch/analysis/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsketch/core/error.hpp"

namespace dsketch {

Histogram Histogram::uniform(double lo, double width, std::size_t bins) {
  if (!(width > 0.0) || bins == 0) fail(ErrorCode::kInvalidArgument, "histogram needs bins > 0 and width > 0");
  Histogram h;
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = lo + width * double(i);
  h.counts.assign(bins, 0);
  return h;
}

std::size_t Histogram::bin_of(double value) const {
  const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), value);
  if (it == bin_edges.begin()) return 0;
  return std::min<std::size_t>(std::size_t(it - bin_edges.begin()) - 1, counts.size() - 1);
}

void Histogram::add(double value) {
  if (std::isnan(value)) fail(ErrorCode::kInvalidArgument, "histogram value is NaN");
  ++counts[bin_of(value)];
}

void Histogram::add_all(std::span<const double> values) {
  for (double v : values) add(v);
}

void Histogram::merge(const Histogram& other) {
  if (other.bin_edges != bin_edges) fail(ErrorCode::kInvalidArgument, "histogram edges differ");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

std::size_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::vector<double> Histogram::density() const {
  std::vector<double> d(counts.size(), 0.0);
  const double n = double(total());
  if (n == 0) return d;
  for (std::size_t i = 0; i < counts.size(); ++i)
    d[i] = double(counts[i]) / (n * (bin_edges[i + 1] - bin_edges[i]));
  return d;
}

}  // namespace dsketch
