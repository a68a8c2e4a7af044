#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "curvgraph/error.hpp"
#include "curvgraph/markov_chain.hpp"

namespace testutil {

using curvgraph::Field;
using curvgraph::MarkovChain;

// Runs fn and returns the code of the curvgraph::Error it throws, or nullopt.
template <class Fn>
std::optional<curvgraph::ErrorCode> error_of(Fn&& fn) {
  try {
    fn();
  } catch (const curvgraph::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline Eigen::MatrixXd dense_kernel(const MarkovChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : chain.triplets()) {
    k(static_cast<Eigen::Index>(t.src), static_cast<Eigen::Index>(t.dst)) += t.rate;
  }
  return k;
}

inline Eigen::VectorXd vec(const Field& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
}

inline Field field(const Eigen::VectorXd& v) { return Field(v.data(), v.data() + v.size()); }

// Lf = (K - I) f
inline Eigen::VectorXd dense_generator(const Eigen::MatrixXd& k, const Eigen::VectorXd& f) {
  return k * f - f;
}

// Gamma(f,g) = 1/2 (L(fg) - f Lg - g Lf)
inline Eigen::VectorXd dense_gamma(const Eigen::MatrixXd& k, const Eigen::VectorXd& f,
                                   const Eigen::VectorXd& g) {
  const Eigen::VectorXd fg = f.cwiseProduct(g);
  return 0.5 * (dense_generator(k, fg) - f.cwiseProduct(dense_generator(k, g)) -
                g.cwiseProduct(dense_generator(k, f)));
}

inline Eigen::VectorXd dense_gamma2(const Eigen::MatrixXd& k, const Eigen::VectorXd& f) {
  const Eigen::VectorXd gf = dense_gamma(k, f, f);
  return 0.5 * dense_generator(k, gf) - dense_gamma(k, f, dense_generator(k, f));
}

// P_t through the spectral decomposition of the symmetrized generator.
inline Eigen::MatrixXd dense_heat(const MarkovChain& chain, double t) {
  const Eigen::MatrixXd k = dense_kernel(chain);
  const auto n = k.rows();
  Eigen::VectorXd root(n);
  for (Eigen::Index i = 0; i < n; ++i) root(i) = std::sqrt(chain.stationary(static_cast<std::size_t>(i)));
  Eigen::MatrixXd l = k - Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd s = root.asDiagonal() * l * root.cwiseInverse().asDiagonal();
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::MatrixXd e = es.eigenvectors() *
                            (t * es.eigenvalues()).array().exp().matrix().asDiagonal() *
                            es.eigenvectors().transpose();
  return root.cwiseInverse().asDiagonal() * e * root.asDiagonal();
}

// All-pairs hop counts by Floyd-Warshall.
inline Eigen::MatrixXd floyd_warshall(const MarkovChain& chain) {
  const Eigen::MatrixXd k = dense_kernel(chain);
  const auto n = k.rows();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && k(i, j) > 0.0) d(i, j) = 1.0;
    }
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, m) + d(m, j));
    }
  }
  return d;
}

// Random walk with holding `lazy` on a random connected weighted graph.
// pi is proportional to the weighted degree.
inline MarkovChain random_reversible_chain(std::uint64_t seed, std::size_t n, double lazy) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    w[i][j] = w[j][i] = weight(rng);
  }
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    if (i != j) w[i][j] = w[j][i] = weight(rng);
  }
  std::vector<curvgraph::Triplet> trip;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("v" + std::to_string(i));
    double deg = 0.0;
    for (double v : w[i]) deg += v;
    for (std::size_t j = 0; j < n; ++j) {
      if (w[i][j] > 0.0) trip.push_back({i, j, (1.0 - lazy) * w[i][j] / deg});
    }
    trip.push_back({i, i, lazy});
  }
  return curvgraph::build_chain(labels, trip);
}

inline Field random_field(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Field f(n);
  for (double& v : f) v = u(rng);
  return f;
}

inline double integrate(const MarkovChain& chain, const Field& f) {
  double s = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) s += f[x] * chain.stationary(x);
  return s;
}

inline Field normalized_density(const MarkovChain& chain, Field f) {
  const double z = integrate(chain, f);
  for (double& v : f) v /= z;
  return f;
}

}  // namespace testutil
