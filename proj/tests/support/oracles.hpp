#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Each one takes a different route from the library code it checks.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "emo/labels.hpp"
#include "emo/learn/mlp.hpp"

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;
using Docs = std::vector<std::vector<std::string>>;

// IDF by scanning every document for every term.
inline std::map<std::string, double> idf(const Docs& docs) {
  std::set<std::string> terms;
  for (const auto& d : docs) terms.insert(d.begin(), d.end());
  std::map<std::string, double> out;
  const double n = static_cast<double>(docs.size());
  for (const auto& t : terms) {
    double df = 0;
    for (const auto& d : docs) df += std::find(d.begin(), d.end(), t) != d.end() ? 1 : 0;
    out[t] = std::log((1.0 + n) / (1.0 + df)) + 1.0;
  }
  return out;
}

// Term -> weight per document, optionally scaled to unit length.
inline std::vector<std::map<std::string, double>> tfidf(const Docs& train, const Docs& docs, bool normalize) {
  const auto weights = idf(train);
  std::vector<std::map<std::string, double>> out;
  for (const auto& d : docs) {
    std::map<std::string, double> row;
    for (const auto& t : d)
      if (weights.count(t)) row[t] += 1.0;
    double norm = 0;
    for (auto& [t, v] : row) {
      v *= weights.at(t);
      norm += v * v;
    }
    if (normalize && norm > 0)
      for (auto& [t, v] : row) v /= std::sqrt(norm);
    out.push_back(row);
  }
  return out;
}

using Matrix = std::vector<std::vector<double>>;

// Sample covariance (n - 1 denominator) of row-major data.
inline Matrix covariance(const Matrix& x) {
  const std::size_t n = x.size(), d = x[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : x)
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(n);
  Matrix c(d, std::vector<double>(d, 0.0));
  for (const auto& r : x)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) c[a][b] += (r[a] - mean[a]) * (r[b] - mean[b]) / static_cast<double>(n - 1);
  return c;
}

struct EigenPairs {
  std::vector<double> values;  // descending
  Matrix vectors;              // one eigenvector per row
};

// Cyclic Jacobi rotations on a symmetric matrix.
inline EigenPairs jacobi(Matrix a) {
  const std::size_t d = a.size();
  Matrix v(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(d);
  for (std::size_t i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
  EigenPairs out;
  for (auto i : order) {
    out.values.push_back(a[i][i]);
    std::vector<double> col(d);
    for (std::size_t k = 0; k < d; ++k) col[k] = v[k][i];
    out.vectors.push_back(col);
  }
  return out;
}

// F1 per label as 2PR/(P+R) with P and R as exact fractions; 0 when P+R = 0.
inline Rational f1_macro_exact(const emo::LabelMatrix& gold, const emo::LabelMatrix& pred) {
  Rational total = 0;
  for (std::size_t j = 0; j < gold.cols(); ++j) {
    long tp = 0, predicted = 0, actual = 0;
    for (std::size_t i = 0; i < gold.rows(); ++i) {
      tp += gold(i, j) && pred(i, j);
      predicted += pred(i, j);
      actual += gold(i, j);
    }
    const Rational p = predicted ? Rational(tp, predicted) : Rational(0);
    const Rational r = actual ? Rational(tp, actual) : Rational(0);
    if (p + r != 0) total += 2 * p * r / (p + r);
  }
  return total / static_cast<long>(gold.cols());
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Network loss written out with scalar loops and the plain log-sigmoid form.
inline double mlp_loss(const emo::MlpNetwork& net, const Matrix& x, const emo::LabelMatrix& y) {
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> a = x[i];
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      const auto w = net.weight(l);
      const auto b = net.bias(l);
      std::vector<double> z(static_cast<std::size_t>(w.rows()));
      for (Eigen::Index o = 0; o < w.rows(); ++o) {
        double s = b(o);
        for (Eigen::Index k = 0; k < w.cols(); ++k) s += w(o, k) * a[static_cast<std::size_t>(k)];
        z[static_cast<std::size_t>(o)] = (l + 1 < net.layer_count()) ? std::max(0.0, s) : s;
      }
      a = z;
    }
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double p = 1.0 / (1.0 + std::exp(-a[j]));
      total -= y(i, j) ? std::log(p) : std::log(1.0 - p);
    }
  }
  return total / static_cast<double>(x.size());
}

// Central differences of mlp_loss over every parameter.
inline Eigen::VectorXd mlp_numeric_gradient(emo::MlpNetwork net, const Matrix& x, const emo::LabelMatrix& y,
                                            double eps) {
  Eigen::VectorXd g(net.parameters().size());
  for (Eigen::Index p = 0; p < g.size(); ++p) {
    const double saved = net.parameters()(p);
    net.parameters()(p) = saved + eps;
    const double up = mlp_loss(net, x, y);
    net.parameters()(p) = saved - eps;
    const double down = mlp_loss(net, x, y);
    net.parameters()(p) = saved;
    g(p) = (up - down) / (2 * eps);
  }
  return g;
}

inline emo::LabelMatrix random_labels(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double p = 0.4) {
  std::bernoulli_distribution bit(p);
  emo::LabelMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = bit(rng);
  return m;
}

}  // namespace oracle
