#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dsketch/core/sketch.hpp"
#include "dsketch/simfit/multilevel.hpp"
#include "dsketch/simfit/similarity.hpp"
#include "dsketch/synthesis/bezier.hpp"
#include "dsketch/synthesis/mlp.hpp"
#include "json.hpp"

namespace dsketch {

/// All synthesis randomness comes from one generator of this type.
using Rng = std::mt19937_64;

enum class DisturberKind { kExtrinsic, kIntrinsic, kPoint };
std::string_view to_string(DisturberKind kind);
DisturberKind parse_disturber_kind(std::string_view name);

/// extrinsic: theta (deg), tx, ty (px, about the stroke centroid), log s;
/// intrinsic: 12 control-point offsets in the stroke frame;
/// point: mu, sigma (px, along the curve normal).
int output_size(DisturberKind kind);
inline constexpr int kModelInputs = 13;  // 12 control coordinates + noise level

struct TrainingPair {
  DisturberKind kind = DisturberKind::kExtrinsic;
  BezierStroke input;
  std::vector<double> target;  // output_size(kind) values
  double m = 0.0;              // normalized change magnitude
  std::size_t drawing = 0;     // index into the dataset
  std::size_t stroke = 0;
};

/// 90th percentiles used to normalize extrinsic magnitudes.
struct ReferenceScales {
  double theta = 1.0;
  double translation = 1.0;
  double scale = 1.0;
};

struct TrainingSet {
  std::vector<TrainingPair> extrinsic;
  std::vector<TrainingPair> intrinsic;
  std::vector<TrainingPair> point;
  ReferenceScales refs;
  const std::vector<TrainingPair>& of(DisturberKind kind) const;
};

struct TrainingDrawing {
  MultiLevelRegistration levels;
  Sketch tracing;
  double e_star = 0.0;
};

/// One pair per kind for every valid content stroke (overlap >= 80% at
/// stroke level) of every valid drawing (E* > 1.2) whose group equals
/// `style`. Throws kEmpty when nothing qualifies.
TrainingSet build_training_pairs(std::span<const TrainingDrawing> dataset, Group style,
                                 int tolerance = 1);

/// Draws from per-output normal distributions instead of a network: output_i
/// = n * (mean_i + sd_i * z_i). The point kind ignores n and returns
/// (mean_0, mean_1).
struct StatisticalModel {
  std::vector<double> mean;
  std::vector<double> sd;
};

struct DisturberModel {
  DisturberKind kind = DisturberKind::kExtrinsic;
  Group style = Group::kNovice;
  std::optional<Mlp> network;
  std::optional<StatisticalModel> statistical;
  std::vector<double> out_mean;  // network outputs are (y - out_mean) / out_std
  std::vector<double> out_std;
  std::vector<double> jitter;    // per-output spread added as n * jitter * N(0, 1)
  TrainStats training;
  std::size_t pairs = 0;

  /// Raw model output at input (coords, n) before jitter.
  std::vector<double> predict(std::span<const double> coords, double n) const;
};

struct DisturberTraining {
  TrainConfig train;
  std::vector<int> hidden{64, 64};
};

/// Trains on normalized targets; the point kind is conditioned on n = 0.
/// Warns (through `warnings`) below 100 pairs. Throws kEmpty with no pairs.
DisturberModel train_disturber(std::span<const TrainingPair> pairs, DisturberKind kind, Group style,
                               const DisturberTraining& config = {},
                               std::vector<std::string>* warnings = nullptr);

/// Desk-scale fallback parameters per kind and style.
DisturberModel default_statistical_disturber(DisturberKind kind, Group style);

struct ExtrinsicResult {
  SimilarityTransform transform;  // canvas coordinates
  BezierStroke stroke;
};

ExtrinsicResult disturb_extrinsic(const BezierStroke& b, double n1, const DisturberModel& model, Rng& rng);
BezierStroke disturb_intrinsic(const BezierStroke& b, double n2, const DisturberModel& model, Rng& rng);

inline constexpr double kPointSmoothingSigma = 2.0;  // samples

/// Moves interior points along the local normal by N(mu, sigma^2) draws
/// smoothed with a Gaussian of 2 samples; endpoints stay fixed.
Stroke disturb_points(const Stroke& polyline, const DisturberModel& model, Rng& rng);

/// Normalized smoothing kernel used by disturb_points (radius 3 sigma).
std::vector<double> point_smoothing_kernel();

BezierStroke transform_bezier(const BezierStroke& b, const SimilarityTransform& t);

nlohmann::json model_to_json(const DisturberModel& model);
DisturberModel model_from_json(const nlohmann::json& j);
void save_model(const DisturberModel& model, const std::filesystem::path& path);
DisturberModel load_model(const std::filesystem::path& path);

}  // namespace dsketch
