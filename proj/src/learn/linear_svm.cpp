#include "emo/learn/linear_svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "emo/binary_io.hpp"
#include "emo/error.hpp"
#include "emo/learn/params.hpp"
#include "emo/rng.hpp"

namespace emo {

SvmParams SvmParams::read(ParamReader& p) {
  SvmParams s;
  s.regularization = p.real("regularization", 1e-4);
  if (!(s.regularization > 0.0) || !std::isfinite(s.regularization)) {
    throw ConfigError("svm: regularization must be positive");
  }
  s.epochs = static_cast<std::size_t>(p.integer("epochs", 1000, 1));
  return s;
}

LinearSvm LinearSvm::fit(const FeatureMatrix& x, const LabelMatrix& y, const SvmParams& params,
                         std::uint64_t seed) {
  const std::size_t n = x.rows();
  const auto d = static_cast<Eigen::Index>(x.cols());
  const auto L = static_cast<Eigen::Index>(y.cols());
  const double lambda = params.regularization;

  // w = scale * v; the shrink step only touches `scale`.
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(L, d);
  Eigen::VectorXd vb = Eigen::VectorXd::Zero(L);
  double scale = 1.0;
  Eigen::VectorXd margin(L);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  double t = 0.0;

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      t += 1.0;
      const double eta = 1.0 / (lambda * t);
      margin = vb;
      x.for_each_nonzero(i, [&](std::size_t c, double val) { margin += v.col(static_cast<Eigen::Index>(c)) * val; });
      margin *= scale;

      const double shrink = 1.0 - 1.0 / t;
      if (shrink == 0.0) {
        v.setZero();
        vb.setZero();
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      for (Eigen::Index l = 0; l < L; ++l) {
        const double sign = y(i, static_cast<std::size_t>(l)) ? 1.0 : -1.0;
        if (sign * margin(l) >= 1.0) continue;
        const double step = eta * sign / scale;
        x.for_each_nonzero(i, [&](std::size_t c, double val) { v(l, static_cast<Eigen::Index>(c)) += step * val; });
        vb(l) += step;
      }
      if (scale < 1e-9) {
        v *= scale;
        vb *= scale;
        scale = 1.0;
      }
    }
  }

  LinearSvm m;
  m.weights_ = v * scale;
  m.bias_ = vb * scale;
  return m;
}

Eigen::MatrixXd LinearSvm::decision_function(const FeatureMatrix& x) const {
  Eigen::MatrixXd out = x.multiply_transposed(weights_);
  out.rowwise() += bias_.transpose();
  return out;
}

PredictionMatrix LinearSvm::predict(const FeatureMatrix& x) const {
  const Eigen::MatrixXd margin = decision_function(x);
  PredictionMatrix out{LabelMatrix(x.rows(), static_cast<std::size_t>(bias_.size())),
                       Eigen::MatrixXd(margin.rows(), margin.cols())};
  for (Eigen::Index i = 0; i < margin.rows(); ++i) {
    for (Eigen::Index j = 0; j < margin.cols(); ++j) {
      const double score = 1.0 / (1.0 + std::exp(-margin(i, j)));
      (*out.scores)(i, j) = score;
      out.labels(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = score > 0.5;
    }
  }
  return out;
}

void LinearSvm::save(BinaryWriter& w) const {
  w.matrix(weights_);
  w.matrix(Eigen::MatrixXd(bias_));
}

LinearSvm LinearSvm::load(BinaryReader& r) {
  LinearSvm m;
  m.weights_ = r.matrix<Eigen::MatrixXd>();
  const auto b = r.matrix<Eigen::MatrixXd>();
  if (b.cols() != 1 || b.rows() != m.weights_.rows()) throw FormatError("svm: bias shape mismatch");
  m.bias_ = b.col(0);
  return m;
}

}  // namespace emo
