#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dsketch {

/// Fixed-width bins over [lo, lo + bins * width). Values outside the range
/// are clamped into the first or last bin so the total always equals the
/// number of added values.
struct Histogram {
  std::vector<double> bin_edges;  // bins + 1, strictly increasing
  std::vector<std::size_t> counts;
  bool normalized = false;

  static Histogram uniform(double lo, double width, std::size_t bins);

  std::size_t bins() const { return counts.size(); }
  std::size_t bin_of(double value) const;
  void add(double value);
  void add_all(std::span<const double> values);
  void merge(const Histogram& other);  // same edges required
  std::size_t total() const;
  /// counts / (total * bin width); all zeros for an empty histogram.
  std::vector<double> density() const;
};

struct HistogramSpec {
  double lo = 0.0;
  double bin_width = 1.0;
  std::size_t bins = 50;
  Histogram make() const { return Histogram::uniform(lo, bin_width, bins); }
};

inline constexpr HistogramSpec kDistanceBins{0.0, 1.0, 50};
inline constexpr HistogramSpec kRotationBins{-180.0, 1.0, 360};
inline constexpr HistogramSpec kTranslationBins{0.0, 5.0, 100};
inline constexpr HistogramSpec kScaleBins{0.0, 0.02, 150};

}  // namespace dsketch
