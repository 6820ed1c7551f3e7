#include "dsketch/synthesis/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "dsketch/core/error.hpp"

namespace dsketch {

Mlp::Mlp(std::vector<int> sizes, std::uint64_t seed) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) fail(ErrorCode::kInvalidArgument, "network needs at least two layers");
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    if (in <= 0 || out <= 0) fail(ErrorCode::kInvalidArgument, "layer sizes must be positive");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(out, in);
    if (l + 2 < sizes_.size()) {
      const double a = std::sqrt(6.0 / double(in + out));
      std::uniform_real_distribution<double> u(-a, a);
      for (int r = 0; r < out; ++r)
        for (int c = 0; c < in; ++c) w(r, c) = u(rng);
    }
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(out));
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    a = weights_[l] * a + biases_[l];
    if (l + 1 < weights_.size()) a = a.array().tanh().matrix();
  }
  return a;
}

double Mlp::loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
  if (x.rows() == 0) return 0.0;
  double s = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    s += (forward(x.row(i).transpose()) - y.row(i).transpose()).squaredNorm();
  return 0.5 * s / double(x.rows());
}

TrainStats Mlp::train(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TrainConfig& cfg) {
  if (x.rows() != y.rows() || x.cols() != inputs() || y.cols() != outputs())
    fail(ErrorCode::kInvalidArgument, "training data does not match the network shape");
  if (cfg.epochs < 0 || cfg.batch < 1 || !(cfg.learning_rate > 0))
    fail(ErrorCode::kInvalidArgument, "invalid training configuration");
  TrainStats stats;
  stats.initial_loss = loss(x, y);
  stats.final_loss = stats.initial_loss;
  if (x.rows() == 0) return stats;

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t layers = weights_.size();
  std::vector<Eigen::MatrixXd> vw, gw;
  std::vector<Eigen::VectorXd> vb, gb;
  for (std::size_t l = 0; l < layers; ++l) {
    vw.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    vb.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  gw = vw;
  gb = vb;
  std::vector<Eigen::Index> order(std::size_t(x.rows()));
  std::iota(order.begin(), order.end(), 0);
  auto best_w = weights_;
  auto best_b = biases_;
  std::vector<Eigen::VectorXd> act(layers + 1);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += std::size_t(cfg.batch)) {
      const std::size_t end = std::min(order.size(), start + std::size_t(cfg.batch));
      for (std::size_t l = 0; l < layers; ++l) {
        gw[l].setZero();
        gb[l].setZero();
      }
      for (std::size_t k = start; k < end; ++k) {
        act[0] = x.row(order[k]).transpose();
        for (std::size_t l = 0; l < layers; ++l) {
          act[l + 1] = weights_[l] * act[l] + biases_[l];
          if (l + 1 < layers) act[l + 1] = act[l + 1].array().tanh().matrix();
        }
        Eigen::VectorXd delta = act[layers] - y.row(order[k]).transpose();
        for (std::size_t l = layers; l-- > 0;) {
          gw[l] += delta * act[l].transpose();
          gb[l] += delta;
          if (l > 0) {
            delta = (weights_[l].transpose() * delta).cwiseProduct(
                (1.0 - act[l].array().square()).matrix());
          }
        }
      }
      const double scale = 1.0 / double(end - start);
      for (std::size_t l = 0; l < layers; ++l) {
        vw[l] = cfg.momentum * vw[l] - cfg.learning_rate * scale * gw[l];
        vb[l] = cfg.momentum * vb[l] - cfg.learning_rate * scale * gb[l];
        weights_[l] += vw[l];
        biases_[l] += vb[l];
      }
    }
    const double l = loss(x, y);
    if (!std::isfinite(l))
      fail(ErrorCode::kDivergence, "training diverged at epoch " + std::to_string(epoch));
    stats.epochs = epoch;
    if (l < stats.final_loss) {
      stats.final_loss = l;
      stats.best_epoch = epoch;
      best_w = weights_;
      best_b = biases_;
    }
  }
  weights_ = std::move(best_w);
  biases_ = std::move(best_b);
  return stats;
}

nlohmann::json Mlp::to_json() const {
  nlohmann::json j;
  j["layers"] = sizes_;
  nlohmann::json w = nlohmann::json::array(), b = nlohmann::json::array();
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    std::vector<double> flat;
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) flat.push_back(weights_[l](r, c));
    w.push_back(flat);
    b.push_back(std::vector<double>(biases_[l].data(), biases_[l].data() + biases_[l].size()));
  }
  j["weights"] = w;
  j["biases"] = b;
  return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  Mlp m;
  try {
    m.sizes_ = j.at("layers").get<std::vector<int>>();
    const auto& w = j.at("weights");
    const auto& b = j.at("biases");
    if (m.sizes_.size() < 2 || w.size() + 1 != m.sizes_.size() || b.size() + 1 != m.sizes_.size())
      fail(ErrorCode::kFormat, "network layer counts do not match");
    for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
      const auto flat = w[l].get<std::vector<double>>();
      const auto bias = b[l].get<std::vector<double>>();
      const int in = m.sizes_[l], out = m.sizes_[l + 1];
      if (in <= 0 || out <= 0 || flat.size() != std::size_t(in) * std::size_t(out) ||
          bias.size() != std::size_t(out))
        fail(ErrorCode::kFormat, "network weights have the wrong size in layer " + std::to_string(l));
      Eigen::MatrixXd wm(out, in);
      for (int r = 0; r < out; ++r)
        for (int c = 0; c < in; ++c) wm(r, c) = flat[std::size_t(r) * std::size_t(in) + std::size_t(c)];
      m.weights_.push_back(wm);
      m.biases_.push_back(Eigen::Map<const Eigen::VectorXd>(bias.data(), out));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("network: ") + e.what());
  }
  return m;
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.sizes_ != b.sizes_) return false;
  for (std::size_t l = 0; l < a.weights_.size(); ++l)
    if (a.weights_[l] != b.weights_[l] || a.biases_[l] != b.biases_[l]) return false;
  return true;
}

}  // namespace dsketch
