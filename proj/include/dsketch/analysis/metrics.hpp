#pragma once

#include <utility>
#include <vector>

#include "dsketch/analysis/histogram.hpp"
#include "dsketch/core/raster.hpp"
#include "dsketch/core/sketch.hpp"
#include "dsketch/pixreg/registration.hpp"
#include "dsketch/simfit/multilevel.hpp"

namespace dsketch {

inline constexpr double kValidityThreshold = 1.2;
inline constexpr double kValidStrokeRate = 0.8;
inline constexpr double kIncorrectStrokeRate = 0.5;
inline constexpr double kDefaultCdrRadius = 3.0;

bool is_valid_drawing(double e_star);
bool is_valid_drawing(const RegistrationResult& result);

/// Fraction of the stroke's width-1 pixels within the Chebyshev tolerance of
/// a tracing pixel. 0 when the stroke covers no canvas pixel.
double stroke_overlap_rate(const Stroke& stroke, const RasterImage& tracing, int tolerance = 1);

/// Rate of every stroke against the content raster of the tracing.
std::vector<double> stroke_overlap_rates(const Sketch& sketch, const Sketch& tracing,
                                         int tolerance = 1);

std::vector<bool> valid_strokes(const Sketch& stroke_level, const Sketch& tracing,
                                double threshold = kValidStrokeRate, int tolerance = 1);

/// Distance from every foreground pixel of each `from` raster to the nearest
/// foreground pixel in the union of `to`. Throws kEmpty when either side is
/// empty, kInvalidArgument on size mismatch.
std::vector<double> closest_distances(const std::vector<RasterImage>& from,
                                      const std::vector<RasterImage>& to);

Histogram closest_distance_histogram(const std::vector<Sketch>& from,
                                     const std::vector<Sketch>& to,
                                     const HistogramSpec& spec = kDistanceBins);

/// Pixels foreground in at least one drawing and within rho of a foreground
/// pixel in every drawing. Throws kInvalidArgument for fewer than 2 drawings.
RasterImage compute_cdr(const std::vector<RasterImage>& drawings, double rho = kDefaultCdrRadius);
RasterImage compute_cdr(const std::vector<Sketch>& drawings, double rho = kDefaultCdrRadius);

/// Centroid of the tracing's width-1 content raster.
Vec2 object_center(const Sketch& tracing);

struct DrawingErrors {
  double e_gr = 0.0;  // |theta_G|, degrees
  double e_gt = 0.0;  // |T_G| about the object center, px
  double e_gs = 0.0;  // |S_G - 1|
  double e_lr = 0.0;  // mean |theta| of the relative stroke transforms
  double e_lt = 0.0;  // about each stroke's sketch-level centroid
  double e_ls = 0.0;
  double e_p = 0.0;   // incorrect strokes / strokes
  bool valid = true;
};

/// Errors of one drawing. Stroke-level terms average over content strokes that
/// received their own fit (fallback strokes are skipped); E_P counts content
/// strokes of the stroke-level sketch with overlap rate below 50%.
DrawingErrors scaffold_errors(const MultiLevelRegistration& multi, const Sketch& tracing,
                              int tolerance = 1);

/// Per-point distances between two sketches of identical topology. Throws
/// kCorrespondence otherwise.
std::vector<double> point_displacements(const Sketch& stroke_level, const Sketch& pixel_level);
Histogram pixel_displacement_histogram(const Sketch& stroke_level, const Sketch& pixel_level,
                                       const HistogramSpec& spec = kDistanceBins);

struct LineImageScore {
  double precision = 0.0;
  double recall = 0.0;
};

/// The image plays the registered role and the width-1 raster of the sketch
/// the tracing role. Throws kEmpty for an empty image and kInvalidArgument
/// when sizes differ.
LineImageScore compare_line_image(const RasterImage& image, const Sketch& registered,
                                  int tolerance = 1, bool content_only = true);

}  // namespace dsketch
