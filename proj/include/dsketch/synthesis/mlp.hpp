#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "json.hpp"

namespace dsketch {

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch = 32;
  std::uint64_t seed = 7;
};

struct TrainStats {
  int epochs = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;  // loss of the returned (best) weights
  int best_epoch = 0;       // 0: the initial weights were never beaten
};

/// Fully connected network with tanh hidden layers and a linear output layer.
class Mlp {
 public:
  Mlp() = default;
  /// Xavier-uniform hidden weights from the seed; the output layer starts at
  /// zero.
  Mlp(std::vector<int> sizes, std::uint64_t seed);

  const std::vector<int>& sizes() const { return sizes_; }
  int inputs() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int outputs() const { return sizes_.empty() ? 0 : sizes_.back(); }
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  /// Mean over rows of the squared error summed over outputs, halved.
  double loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const;

  /// Mini-batch SGD with momentum on rows of x / y, keeping the weights with
  /// the lowest full-data loss seen after any epoch (or the initial ones).
  /// Throws kDivergence naming the epoch when the loss becomes non-finite.
  TrainStats train(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TrainConfig& config);

  nlohmann::json to_json() const;
  static Mlp from_json(const nlohmann::json& j);

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;  // weights_[l] is sizes[l+1] x sizes[l]
  std::vector<Eigen::VectorXd> biases_;
};

}  // namespace dsketch
