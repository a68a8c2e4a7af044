#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "curvgraph/error.hpp"
#include "curvgraph/parallel.hpp"
#include "curvgraph/transport.hpp"

namespace curvgraph {
namespace {

// Gamma(f)(z) and the gradient of f -> Gamma(f)(z).
double gamma_with_gradient(const MarkovChain& chain, const Eigen::VectorXd& f, std::size_t z,
                           std::vector<std::pair<std::size_t, double>>& grad) {
  grad.clear();
  double q = 0.0;
  double gz = 0.0;
  for (const Transition& t : chain.neighbors(z)) {
    const double diff = f(static_cast<Eigen::Index>(t.target)) - f(static_cast<Eigen::Index>(z));
    q += 0.5 * t.rate * diff * diff;
    grad.push_back({t.target, t.rate * diff});
    gz -= t.rate * diff;
  }
  grad.push_back({z, gz});
  return q;
}

double max_gamma(const MarkovChain& chain, const Eigen::VectorXd& f) {
  double worst = 0.0;
  for (std::size_t z = 0; z < chain.size(); ++z) {
    double q = 0.0;
    for (const Transition& t : chain.neighbors(z)) {
      const double diff = f(static_cast<Eigen::Index>(t.target)) - f(static_cast<Eigen::Index>(z));
      q += 0.5 * t.rate * diff * diff;
    }
    worst = std::max(worst, q);
  }
  return worst;
}

// -tau c.f - sum_z log(1 - Gamma(f)(z)); +inf outside the domain.
double barrier_value(const MarkovChain& chain, const Eigen::VectorXd& f,
                     const Eigen::VectorXd& c, double tau) {
  double v = -tau * c.dot(f);
  for (std::size_t z = 0; z < chain.size(); ++z) {
    double q = 0.0;
    for (const Transition& t : chain.neighbors(z)) {
      const double diff = f(static_cast<Eigen::Index>(t.target)) - f(static_cast<Eigen::Index>(z));
      q += 0.5 * t.rate * diff * diff;
    }
    if (!(q < 1.0)) return std::numeric_limits<double>::infinity();
    v -= std::log1p(-q);
  }
  return v;
}

// Maximizes c.f over Gamma(f) <= 1 with f(pinned) = 0 by a log-barrier
// Newton method. c must sum to zero.
GammaPotential maximize_linear(const MarkovChain& chain, const Eigen::VectorXd& c,
                               std::size_t pinned, double tol) {
  const std::size_t n = chain.size();
  GammaPotential out;
  out.f.assign(n, 0.0);
  if (c.isZero(0.0)) return out;

  std::vector<std::size_t> free_idx;
  std::vector<long> position(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == pinned) continue;
    position[v] = static_cast<long>(free_idx.size());
    free_idx.push_back(v);
  }
  const auto k = static_cast<Eigen::Index>(free_idx.size());

  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const double m = static_cast<double>(n);
  double tau = 1.0;
  std::vector<std::pair<std::size_t, double>> grad_z;
  for (int outer = 0; outer < 200; ++outer) {
    for (int newton = 0; newton < 200; ++newton) {
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(k, k);
      for (std::size_t v = 0; v < n; ++v) {
        if (position[v] >= 0) grad(position[v]) -= tau * c(static_cast<Eigen::Index>(v));
      }
      for (std::size_t z = 0; z < n; ++z) {
        const double q = gamma_with_gradient(chain, f, z, grad_z);
        const double s = 1.0 - q;
        for (const auto& [a, ga] : grad_z) {
          if (position[a] < 0) continue;
          grad(position[a]) += ga / s;
          for (const auto& [b, gb] : grad_z) {
            if (position[b] < 0) continue;
            hess(position[a], position[b]) += ga * gb / (s * s);
          }
        }
        // Curvature of Gamma(.)(z) itself: sum_w K(z,w) (e_w - e_z)(e_w - e_z)^T.
        for (const Transition& t : chain.neighbors(z)) {
          const long pw = position[t.target];
          const long pz = position[z];
          const double w = t.rate / s;
          if (pw >= 0) hess(pw, pw) += w;
          if (pz >= 0) hess(pz, pz) += w;
          if (pw >= 0 && pz >= 0) {
            hess(pw, pz) -= w;
            hess(pz, pw) -= w;
          }
        }
      }
      const Eigen::VectorXd step = hess.ldlt().solve(-grad);
      const double decrement = -grad.dot(step);
      if (decrement <= 1e-14) break;
      Eigen::VectorXd full_step = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < k; ++i) {
        full_step(static_cast<Eigen::Index>(free_idx[static_cast<std::size_t>(i)])) = step(i);
      }
      const double current = barrier_value(chain, f, c, tau);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Eigen::VectorXd trial = f + alpha * full_step;
        const double v = barrier_value(chain, trial, c, tau);
        if (v <= current - 0.25 * alpha * decrement) {
          f = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (m / tau <= tol) break;
    tau *= 10.0;
  }

  // Push the iterate onto the boundary of the feasible set.
  const double worst = max_gamma(chain, f);
  if (worst > 0.0 && c.dot(f) > 0.0) f /= std::sqrt(worst);
  out.value = c.dot(f);
  out.gap = m / tau;
  out.f.assign(f.data(), f.data() + n);
  if (!std::isfinite(out.value)) throw Error(ErrorCode::unbounded, "Gamma-constrained problem diverged");
  return out;
}

}  // namespace

GammaPotential d_gamma_pair(const MarkovChain& chain, std::size_t x, std::size_t y,
                            double tol) {
  const std::size_t n = chain.size();
  if (x >= n || y >= n) throw Error(ErrorCode::invalid_argument, "state index out of range");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  if (x == y) return GammaPotential{0.0, Field(n, 0.0), 0.0};
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  c(static_cast<Eigen::Index>(x)) = 1.0;
  c(static_cast<Eigen::Index>(y)) = -1.0;
  return maximize_linear(chain, c, y, tol);
}

GammaPotential gamma_dual_cost(const MarkovChain& chain, std::span<const double> c, double tol) {
  const std::size_t n = chain.size();
  if (c.size() != n) throw Error(ErrorCode::dimension_mismatch, "objective length differs from n");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  double sum = 0.0;
  double mass = 0.0;
  for (double v : c) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "objective is not finite");
    sum += v;
    mass += std::abs(v);
  }
  if (std::abs(sum) > 1e-12 * std::max(1.0, mass)) {
    throw Error(ErrorCode::invalid_argument, "objective must sum to zero");
  }
  Eigen::VectorXd cv(static_cast<Eigen::Index>(n));
  for (std::size_t v = 0; v < n; ++v) cv(static_cast<Eigen::Index>(v)) = c[v];
  cv.array() -= sum / static_cast<double>(n);
  return maximize_linear(chain, cv, n - 1, tol);
}

DistanceMatrix d_gamma(const MarkovChain& chain, double tol) {
  const std::size_t n = chain.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) pairs.push_back({x, y});
  }
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    values[i] = d_gamma_pair(chain, pairs[i].first, pairs[i].second, tol).value;
  });
  DistanceMatrix d(n, DistanceKind::gamma);
  for (std::size_t i = 0; i < pairs.size(); ++i) d.set(pairs[i].first, pairs[i].second, values[i]);
  d.validate(std::max(1e-9, 4.0 * tol));
  return d;
}

}  // namespace curvgraph
