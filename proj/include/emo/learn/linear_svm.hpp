#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

#include "emo/learn/classifier.hpp"

namespace emo {

class ParamReader;

struct SvmParams {
  double regularization = 1e-4;  // lambda
  std::size_t epochs = 1000;

  static SvmParams read(ParamReader& p);
};

// One hinge-loss linear separator per label, trained by Pegasos stochastic
// subgradient descent (step 1/(lambda t)) with a constant bias feature.
class LinearSvm final : public Model {
 public:
  static LinearSvm fit(const FeatureMatrix& x, const LabelMatrix& y, const SvmParams& params, std::uint64_t seed);

  // Raw margins, rows x labels.
  Eigen::MatrixXd decision_function(const FeatureMatrix& x) const;
  // Scores are the logistic of the margin.
  PredictionMatrix predict(const FeatureMatrix& x) const override;
  void save(BinaryWriter& w) const override;
  static LinearSvm load(BinaryReader& r);

  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  const Eigen::VectorXd& bias() const noexcept { return bias_; }

 private:
  Eigen::MatrixXd weights_;  // labels x features
  Eigen::VectorXd bias_;
};

}  // namespace emo
