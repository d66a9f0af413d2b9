#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "emo/learn/classifier.hpp"
#include "emo/rng.hpp"

namespace emo {

class ParamReader;

struct MlpParams {
  std::vector<std::size_t> hidden_layer_sizes{100};
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;

  static MlpParams read(ParamReader& p);
};

// Feed-forward network: ReLU hidden layers, sigmoid outputs. All parameters
// live in one flat vector: per layer, the (out x in) weight matrix in
// column-major order followed by its bias vector.
class MlpNetwork {
 public:
  MlpNetwork() = default;
  MlpNetwork(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t outputs);

  // Glorot-uniform weights, zero biases.
  void initialize(Rng& rng);

  std::size_t layer_count() const noexcept { return shapes_.size(); }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return shapes_.empty() ? 0 : shapes_.back().first; }

  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
  Eigen::VectorXd& parameters() noexcept { return params_; }
  const Eigen::VectorXd& parameters() const noexcept { return params_; }

  // Output logits, rows x outputs.
  Eigen::MatrixXd logits(const FeatureMatrix& x) const;
  // Mean over rows of the binary cross-entropy summed over outputs.
  double loss(const FeatureMatrix& x, const LabelMatrix& y) const;
  // Same loss; `grad` receives d(loss)/d(parameters) in flat layout.
  double loss_and_gradient(const FeatureMatrix& x, const LabelMatrix& y, Eigen::VectorXd& grad) const;

  void save(BinaryWriter& w) const;
  static MlpNetwork load(BinaryReader& r);

 private:
  std::size_t input_dim_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> shapes_;  // (out, in) per layer
  std::vector<std::size_t> offsets_;                         // weight start per layer
  Eigen::VectorXd params_;
};

class Mlp final : public Model {
 public:
  static Mlp fit(const FeatureMatrix& x, const LabelMatrix& y, const MlpParams& params, std::uint64_t seed);

  PredictionMatrix predict(const FeatureMatrix& x) const override;
  void save(BinaryWriter& w) const override;
  static Mlp load(BinaryReader& r);

  const MlpNetwork& network() const noexcept { return network_; }

 private:
  MlpNetwork network_;
};

// Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-8) over every
// parameter, with central differences of step `epsilon`.
double gradient_check(const MlpNetwork& network, const FeatureMatrix& x, const LabelMatrix& y, double epsilon);
// Builds and initializes the network described by an mlp spec (seeded by it).
double gradient_check(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelMatrix& y, double epsilon);

}  // namespace emo
