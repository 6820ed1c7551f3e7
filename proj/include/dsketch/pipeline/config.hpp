#pragma once

#include <string>
#include <vector>

#include "dsketch/analysis/histogram.hpp"
#include "dsketch/analysis/metrics.hpp"
#include "dsketch/pixreg/registration.hpp"
#include "dsketch/synthesis/disturber.hpp"
#include "dsketch/synthesis/synthesize.hpp"
#include "json.hpp"

namespace dsketch {

struct AnalysisConfig {
  double rho = kDefaultCdrRadius;
  int tolerance = 1;
  HistogramSpec distance_bins = kDistanceBins;
};

struct SynthesisSettings {
  SynthesisConfig synthesis;
  DisturberTraining training;
};

struct IoConfig {
  std::string dataset;
  std::string output;
};

/// Every tunable of the batch pipeline. JSON layout:
///   registration {iters, omega, tolerance, sigma_field, content_only}
///   analysis     {rho, tolerance, distance_bin_width, distance_bins}
///   synthesis    {eps_c, w_s, w_m, mlp_hidden, epochs, learning_rate,
///                 momentum, batch, seed, n1, n2}
///   io           {dataset, output}
///   jobs
struct Config {
  RegistrationConfig registration;
  AnalysisConfig analysis;
  SynthesisSettings synthesis;
  IoConfig io;
  int jobs = 1;
};

/// Applies a (possibly partial) JSON object on top of `config`. Unknown keys
/// and out-of-range values throw kValidation; wrong JSON types throw kFormat.
void merge_config(Config& config, const nlohmann::json& overrides);

nlohmann::json config_to_json(const Config& config);

}  // namespace dsketch
