#include "emo/learn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emo/binary_io.hpp"
#include "emo/error.hpp"
#include "emo/learn/params.hpp"

namespace emo {
namespace {

constexpr double kRelativeErrorFloor = 1e-8;
constexpr std::size_t kPredictChunk = 1024;

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

MlpParams MlpParams::read(ParamReader& p) {
  MlpParams m;
  const auto hidden = p.integers("hidden_layer_sizes", {100}, 1);
  m.hidden_layer_sizes.assign(hidden.begin(), hidden.end());
  m.learning_rate = p.real("learning_rate", 1e-3);
  m.momentum = p.real("momentum", 0.9);
  m.epochs = static_cast<std::size_t>(p.integer("epochs", 200, 1));
  m.batch_size = static_cast<std::size_t>(p.integer("batch_size", 32, 1));
  if (!(m.learning_rate > 0.0) || !std::isfinite(m.learning_rate)) {
    throw ConfigError("mlp: learning_rate must be positive");
  }
  if (!(m.momentum >= 0.0 && m.momentum < 1.0)) throw ConfigError("mlp: momentum must lie in [0, 1)");
  return m;
}

MlpNetwork::MlpNetwork(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t outputs)
    : input_dim_(input_dim) {
  std::size_t in = input_dim;
  std::size_t total = 0;
  hidden.push_back(outputs);
  for (auto out : hidden) {
    shapes_.emplace_back(out, in);
    offsets_.push_back(total);
    total += out * in + out;
    in = out;
  }
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
}

void MlpNetwork::initialize(Rng& rng) {
  params_.setZero();
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    const auto [out, in] = shapes_[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> draw(-bound, bound);
    double* w = params_.data() + offsets_[l];
    for (std::size_t i = 0; i < out * in; ++i) w[i] = draw(rng);
  }
}

Eigen::Map<const Eigen::MatrixXd> MlpNetwork::weight(std::size_t layer) const {
  const auto [out, in] = shapes_[layer];
  return {params_.data() + offsets_[layer], static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)};
}

Eigen::Map<const Eigen::VectorXd> MlpNetwork::bias(std::size_t layer) const {
  const auto [out, in] = shapes_[layer];
  return {params_.data() + offsets_[layer] + out * in, static_cast<Eigen::Index>(out)};
}

Eigen::MatrixXd MlpNetwork::logits(const FeatureMatrix& x) const {
  if (x.cols() != input_dim_) throw ShapeError("mlp: input width mismatch");
  Eigen::MatrixXd a = x.multiply_transposed(weight(0));
  a.rowwise() += bias(0).transpose();
  for (std::size_t l = 1; l < shapes_.size(); ++l) {
    a = a.cwiseMax(0.0);
    Eigen::MatrixXd z = a * weight(l).transpose();
    z.rowwise() += bias(l).transpose();
    a = std::move(z);
  }
  return a;
}

double MlpNetwork::loss(const FeatureMatrix& x, const LabelMatrix& y) const {
  const Eigen::MatrixXd z = logits(x);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j)
      acc += softplus(z(i, j)) - (y(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) ? z(i, j) : 0.0);
  return acc / static_cast<double>(z.rows());
}

double MlpNetwork::loss_and_gradient(const FeatureMatrix& x, const LabelMatrix& y, Eigen::VectorXd& grad) const {
  if (x.cols() != input_dim_) throw ShapeError("mlp: input width mismatch");
  const std::size_t layers = shapes_.size();
  const double m = static_cast<double>(x.rows());

  // activations[l] is the input of layer l (for l >= 1); pre[l] its output before ReLU.
  std::vector<Eigen::MatrixXd> pre(layers), act(layers);
  pre[0] = x.multiply_transposed(weight(0));
  pre[0].rowwise() += bias(0).transpose();
  for (std::size_t l = 1; l < layers; ++l) {
    act[l] = pre[l - 1].cwiseMax(0.0);
    pre[l] = act[l] * weight(l).transpose();
    pre[l].rowwise() += bias(l).transpose();
  }

  const Eigen::MatrixXd& z = pre.back();
  Eigen::MatrixXd delta(z.rows(), z.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double target = y(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) ? 1.0 : 0.0;
      loss += softplus(z(i, j)) - target * z(i, j);
      delta(i, j) = (sigmoid(z(i, j)) - target) / m;
    }
  }

  grad.setZero(params_.size());
  for (std::size_t l = layers; l-- > 0;) {
    const auto [out, in] = shapes_[l];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offsets_[l], static_cast<Eigen::Index>(out),
                                   static_cast<Eigen::Index>(in));
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[l] + out * in, static_cast<Eigen::Index>(out));
    if (l == 0) {
      gw = x.transpose_multiply(delta).transpose();
    } else {
      gw.noalias() = delta.transpose() * act[l];
    }
    gb = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd back = delta * weight(l);
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss / m;
}

void MlpNetwork::save(BinaryWriter& w) const {
  w.u64(input_dim_);
  w.u64(shapes_.size());
  for (const auto& [out, in] : shapes_) w.u64(out);
  w.f64s(std::span<const double>(params_.data(), static_cast<std::size_t>(params_.size())));
}

MlpNetwork MlpNetwork::load(BinaryReader& r) {
  const std::size_t input = r.length();
  const std::size_t layers = r.length();
  if (layers == 0) throw FormatError("mlp: no layers");
  std::vector<std::size_t> sizes(layers);
  for (auto& s : sizes) s = r.length();
  const std::size_t outputs = sizes.back();
  sizes.pop_back();
  MlpNetwork net(input, sizes, outputs);
  const auto params = r.f64s();
  if (params.size() != static_cast<std::size_t>(net.params_.size())) throw FormatError("mlp: parameter count mismatch");
  net.params_ = Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
  return net;
}

Mlp Mlp::fit(const FeatureMatrix& x, const LabelMatrix& y, const MlpParams& params, std::uint64_t seed) {
  Rng rng(seed);
  Mlp model;
  model.network_ = MlpNetwork(x.cols(), params.hidden_layer_sizes, y.cols());
  model.network_.initialize(rng);

  const std::size_t n = x.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::VectorXd& theta = model.network_.parameters();
  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd grad;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += params.batch_size) {
      const std::size_t stop = std::min(n, start + params.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      model.network_.loss_and_gradient(x.select_rows(batch), y.select_rows(batch), grad);
      velocity = params.momentum * velocity - params.learning_rate * grad;
      theta += velocity;
    }
  }
  if (!theta.allFinite()) throw Error("mlp: training diverged (non-finite parameters); lower learning_rate");
  return model;
}

PredictionMatrix Mlp::predict(const FeatureMatrix& x) const {
  const std::size_t L = network_.output_dim();
  PredictionMatrix out{LabelMatrix(x.rows(), L),
                       Eigen::MatrixXd(static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(L))};
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < x.rows(); start += kPredictChunk) {
    const std::size_t stop = std::min(x.rows(), start + kPredictChunk);
    rows.resize(stop - start);
    std::iota(rows.begin(), rows.end(), start);
    const Eigen::MatrixXd z = network_.logits(x.select_rows(rows));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const double s = sigmoid(z(i, j));
        const auto r = static_cast<std::size_t>(start) + static_cast<std::size_t>(i);
        (*out.scores)(static_cast<Eigen::Index>(r), j) = s;
        out.labels(r, static_cast<std::size_t>(j)) = s > 0.5;
      }
    }
  }
  return out;
}

void Mlp::save(BinaryWriter& w) const { network_.save(w); }

Mlp Mlp::load(BinaryReader& r) {
  Mlp m;
  m.network_ = MlpNetwork::load(r);
  return m;
}

double gradient_check(const MlpNetwork& network, const FeatureMatrix& x, const LabelMatrix& y, double epsilon) {
  Eigen::VectorXd analytic;
  network.loss_and_gradient(x, y, analytic);
  MlpNetwork probe = network;
  Eigen::VectorXd& theta = probe.parameters();
  double worst = 0.0;
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    const double saved = theta(p);
    theta(p) = saved + epsilon;
    const double up = probe.loss(x, y);
    theta(p) = saved - epsilon;
    const double down = probe.loss(x, y);
    theta(p) = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = analytic(p);
    const double denom = std::max({std::abs(a), std::abs(numeric), kRelativeErrorFloor});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

double gradient_check(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelMatrix& y, double epsilon) {
  if (spec.kind != ClassifierKind::mlp) throw ConfigError("gradient_check: spec must be of kind mlp");
  ParamReader reader(spec.params, "mlp");
  const MlpParams params = MlpParams::read(reader);
  reader.finish();
  MlpNetwork net(x.cols(), params.hidden_layer_sizes, y.cols());
  Rng rng(spec.seed);
  net.initialize(rng);
  return gradient_check(net, x, y, epsilon);
}

}  // namespace emo
