#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dsketch/core/sketch.hpp"

namespace dsketch {

inline constexpr int kTemporalBins = 25;
inline constexpr double kTemporalAlpha = 0.001;

enum class CorrelationClass { kPositive, kNegative, kNone };
std::string_view to_string(CorrelationClass c);

enum class TemporalFeature { kBinCount, kX, kY, kCenterDist, kPressure };
inline constexpr std::array<TemporalFeature, 5> kTemporalFeatures{
    TemporalFeature::kBinCount, TemporalFeature::kX, TemporalFeature::kY,
    TemporalFeature::kCenterDist, TemporalFeature::kPressure};
std::string_view to_string(TemporalFeature f);

struct FeatureCorrelation {
  TemporalFeature feature = TemporalFeature::kBinCount;
  double rho = 0.0;
  double p = 1.0;
  CorrelationClass cls = CorrelationClass::kNone;
};

/// positive / negative at p < alpha, otherwise none.
CorrelationClass classify(double rho, double p, double alpha = kTemporalAlpha);

struct TimedPixel {
  int x = 0;
  int y = 0;
  double t = 0.0;
  double pressure = 0.0;
  int stroke = 0;
};

/// Width-1 pixels of the sketch, each with the earliest time the pen covered
/// it. Time and pressure are interpolated linearly along each segment.
std::vector<TimedPixel> timed_pixels(const Sketch& sketch, bool content_only);

struct DirectionFractions {
  double positive = 0.0;
  double negative = 0.0;
  double none = 0.0;
};

struct TemporalProfile {
  std::array<std::size_t, kTemporalBins> bin_counts{};
  std::vector<FeatureCorrelation> correlations;  // in kTemporalFeatures order
  DirectionFractions stroke_x;                   // per-stroke x over time
  DirectionFractions stroke_y;
  const FeatureCorrelation& of(TemporalFeature f) const;
};

/// Pixels are binned into 25 equal-duration bins over [t_min, t_max]. The
/// bin_count feature correlates counts with the bin index; the other
/// features correlate per-pixel values with the pixel times. Undefined
/// correlations classify as none. Throws kInvalidArgument when the drawing
/// has zero duration.
TemporalProfile temporal_profile(const Sketch& sketch, bool content_only = true);

struct OrderingCosts {
  double simplicity = 0.0;
  double proximity = 0.0;
  double collinearity = 0.0;
  double anchoring = 0.0;
  bool warning = false;  // fewer than two strokes
};

struct OrderingConfig {
  double resample_spacing = 4.0;
  double collinear_gap = 30.0;
  double collinear_angle_deg = 20.0;
  double tangent_length = 10.0;
  double anchor_distance = 5.0;
};

/// Arc length times mean absolute turning angle (radians) of the stroke
/// sampled every `spacing` px of arc length.
double stroke_complexity(const Stroke& stroke, double spacing = 4.0);

/// Guideline costs in [0, 1], lower means the drawing order follows the
/// guideline more closely:
///   simplicity   - fraction of stroke pairs drawn in decreasing complexity
///                  (ties count 1/2);
///   proximity    - mean gap end_k -> start_k+1 over the canvas diagonal;
///   collinearity - over stroke pairs whose endpoints are closer than 30 px
///                  with tangents within 20 degrees, mean of
///                  (order distance - 1) / (strokes - 2);
///   anchoring    - fraction of attachments (an endpoint of A within 5 px of
///                  the interior of B) where A was drawn before B.
OrderingCosts ordering_costs(const Sketch& sketch, bool content_only = true,
                             const OrderingConfig& config = {});

}  // namespace dsketch
