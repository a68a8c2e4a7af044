#include "curvgraph/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "curvgraph/error.hpp"

namespace curvgraph {
namespace {

// A vertex of the image of the transport polytope under
// pi -> z_x = sum_y d(x,y) pi(x,y) / sqrt(mu(x)),  x in supp(mu).
struct Vertex {
  Eigen::VectorXd z;
  std::vector<double> plan;  // row-major n*n coupling
};

class WeakProblem {
 public:
  WeakProblem(std::span<const double> nu, std::span<const double> mu, const DistanceMatrix& d)
      : nu_(nu), mu_(mu), d_(d), n_(d.size()) {
    for (std::size_t x = 0; x < n_; ++x) {
      if (mu[x] > 0.0) sx_.push_back(x);
    }
  }

  std::size_t dim() const { return sx_.size(); }
  const std::vector<std::size_t>& sources() const { return sx_; }

  Eigen::VectorXd image(const std::vector<double>& plan) const {
    Eigen::VectorXd z(static_cast<Eigen::Index>(sx_.size()));
    for (std::size_t i = 0; i < sx_.size(); ++i) {
      const std::size_t x = sx_[i];
      double m = 0.0;
      for (std::size_t y = 0; y < n_; ++y) m += d_(x, y) * plan[x * n_ + y];
      z(static_cast<Eigen::Index>(i)) = m / std::sqrt(mu_[x]);
    }
    return z;
  }

  // argmin over couplings of <w, z(pi)>; also returns the LP multipliers.
  LinearTransport oracle(const Eigen::VectorXd& w) const {
    std::vector<double> cost(n_ * n_, 0.0);
    for (std::size_t i = 0; i < sx_.size(); ++i) {
      const std::size_t x = sx_[i];
      const double scale = w(static_cast<Eigen::Index>(i)) / std::sqrt(mu_[x]);
      for (std::size_t y = 0; y < n_; ++y) cost[x * n_ + y] = scale * d_(x, y);
    }
    return solve_transport(mu_, nu_, cost);
  }

  // g = -2 psi on supp(nu) and the largest admissible value elsewhere, where
  // (phi, psi) are multipliers for the cost a_x d(x,y), a_x = z_x / sqrt(mu(x)).
  Field potential(const Eigen::VectorXd& z, const LinearTransport& lt) const {
    Field a(n_, 0.0);
    for (std::size_t i = 0; i < sx_.size(); ++i) {
      a[sx_[i]] = z(static_cast<Eigen::Index>(i)) / std::sqrt(mu_[sx_[i]]);
    }
    Field g(n_, 0.0);
    for (std::size_t y = 0; y < n_; ++y) {
      if (nu_[y] > 0.0) {
        g[y] = -2.0 * lt.col_potential[y];
        continue;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t x : sx_) best = std::max(best, 2.0 * lt.row_potential[x] - 2.0 * a[x] * d_(x, y));
      g[y] = best;
    }
    return g;
  }

  std::size_t n() const { return n_; }
  std::span<const double> mu() const { return mu_; }
  const DistanceMatrix& d() const { return d_; }

 private:
  std::span<const double> nu_;
  std::span<const double> mu_;
  const DistanceMatrix& d_;
  std::size_t n_;
  std::vector<std::size_t> sx_;
};

// min ||sum_i alpha_i v_i|| subject to sum alpha = 1.
Eigen::VectorXd affine_minimizer(const std::vector<Vertex>& corral) {
  const auto k = static_cast<Eigen::Index>(corral.size());
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(k);
  if (k == 1) {
    alpha(0) = 1.0;
    return alpha;
  }
  const Eigen::VectorXd& v0 = corral[0].z;
  Eigen::MatrixXd b(v0.size(), k - 1);
  for (Eigen::Index i = 1; i < k; ++i) b.col(i - 1) = corral[static_cast<std::size_t>(i)].z - v0;
  const Eigen::VectorXd beta = b.completeOrthogonalDecomposition().solve(-v0);
  alpha(0) = 1.0 - beta.sum();
  alpha.tail(k - 1) = beta;
  return alpha;
}

double weak_cost(std::span<const double> mu, const DistanceMatrix& d,
                 const std::vector<double>& plan) {
  const std::size_t n = d.size();
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (!(mu[x] > 0.0)) continue;
    double m = 0.0;
    for (std::size_t y = 0; y < n; ++y) m += d(x, y) * plan[x * n + y];
    total += m * m / mu[x];
  }
  return total;
}

void require_probability(std::span<const double> p, std::size_t n, const char* what) {
  if (p.size() != n) throw Error(ErrorCode::dimension_mismatch, std::string(what) + " size mismatch");
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::invalid_argument, std::string(what) + " has a negative entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " does not sum to one");
  }
}

}  // namespace

WeakTransportResult weak_transport(std::span<const double> nu, std::span<const double> mu,
                                   const DistanceMatrix& d, const WeakTransportOptions& opts) {
  const std::size_t n = d.size();
  require_probability(nu, n, "nu");
  require_probability(mu, n, "mu");
  const WeakProblem prob(nu, mu, d);

  auto make_vertex = [&](const LinearTransport& lt) {
    Vertex v;
    v.plan = lt.plan.weights;
    v.z = prob.image(v.plan);
    return v;
  };

  // Start from the W1-optimal coupling.
  Eigen::VectorXd start_dir(static_cast<Eigen::Index>(prob.dim()));
  for (std::size_t i = 0; i < prob.dim(); ++i) {
    start_dir(static_cast<Eigen::Index>(i)) = std::sqrt(mu[prob.sources()[i]]);
  }
  std::vector<Vertex> corral{make_vertex(prob.oracle(start_dir))};
  std::vector<double> lambda{1.0};
  Eigen::VectorXd z = corral[0].z;

  WeakTransportResult out;
  LinearTransport last_oracle;
  double gap = std::numeric_limits<double>::infinity();
  std::size_t iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    last_oracle = prob.oracle(z);
    Vertex v = make_vertex(last_oracle);
    gap = z.squaredNorm() - z.dot(v.z);
    double scale = 1.0;
    for (const Vertex& c : corral) scale = std::max(scale, c.z.squaredNorm());
    if (gap <= opts.stationarity_tol * scale) break;
    bool repeated = false;
    for (const Vertex& c : corral) {
      if ((c.z - v.z).norm() <= 1e-14 * std::sqrt(scale)) repeated = true;
    }
    if (repeated) break;
    corral.push_back(std::move(v));
    lambda.push_back(0.0);

    // Minor cycles: move towards the affine minimizer until it lies in the
    // relative interior of the corral.
    for (;;) {
      const Eigen::VectorXd alpha = affine_minimizer(corral);
      bool interior = true;
      for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (alpha(i) <= 1e-15) interior = false;
      }
      if (interior) {
        for (std::size_t i = 0; i < corral.size(); ++i) lambda[i] = alpha(static_cast<Eigen::Index>(i));
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        const double a = alpha(static_cast<Eigen::Index>(i));
        if (a <= 1e-15) theta = std::min(theta, lambda[i] / (lambda[i] - a));
      }
      theta = std::clamp(theta, 0.0, 1.0);
      for (std::size_t i = 0; i < corral.size(); ++i) {
        lambda[i] = theta * alpha(static_cast<Eigen::Index>(i)) + (1.0 - theta) * lambda[i];
      }
      std::vector<Vertex> kept;
      std::vector<double> kept_lambda;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (lambda[i] > 1e-15) {
          kept.push_back(std::move(corral[i]));
          kept_lambda.push_back(lambda[i]);
        }
      }
      corral = std::move(kept);
      lambda = std::move(kept_lambda);
      double total = 0.0;
      for (double l : lambda) total += l;
      for (double& l : lambda) l /= total;
      if (corral.size() == 1) break;
    }
    z.setZero();
    for (std::size_t i = 0; i < corral.size(); ++i) z += lambda[i] * corral[i].z;
  }
  if (iter == opts.max_iterations) last_oracle = prob.oracle(z);

  std::vector<double> plan(n * n, 0.0);
  for (std::size_t i = 0; i < corral.size(); ++i) {
    for (std::size_t k = 0; k < plan.size(); ++k) plan[k] += lambda[i] * corral[i].plan[k];
  }
  out.value = weak_cost(mu, d, plan);
  out.plan.kind = TransportPlan::Kind::kernel_family;
  out.plan.n = n;
  out.plan.weights.assign(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    if (mu[x] > 0.0) {
      for (std::size_t y = 0; y < n; ++y) out.plan.weights[x * n + y] = plan[x * n + y] / mu[x];
    } else {
      out.plan.weights[x * n + x] = 1.0;
    }
  }
  out.plan.value = out.value;
  out.gap = std::max(gap, 0.0);
  out.iterations = iter;
  out.dual_potential = prob.potential(z, last_oracle);
  return out;
}

double weak_dual_objective(std::span<const double> nu, std::span<const double> mu,
                           const DistanceMatrix& d, std::span<const double> g) {
  const std::size_t n = d.size();
  if (nu.size() != n || mu.size() != n || g.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "dual objective inputs disagree in size");
  }
  const Field q = inf_convolution(g, d, 1.0);
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (mu[x] > 0.0) total += q[x] * mu[x];
    if (nu[x] > 0.0) total -= g[x] * nu[x];
  }
  return total;
}

double weak_transport_dual(std::span<const double> nu, std::span<const double> mu,
                           const DistanceMatrix& d, const std::vector<Field>& g_family) {
  if (g_family.empty()) throw Error(ErrorCode::invalid_argument, "no candidate potentials");
  double best = -std::numeric_limits<double>::infinity();
  for (const Field& g : g_family) best = std::max(best, weak_dual_objective(nu, mu, d, g));
  return best;
}

Field weak_dual_ascent(std::span<const double> nu, std::span<const double> mu,
                       const DistanceMatrix& d, Field start, double target,
                       std::size_t iterations) {
  const std::size_t n = d.size();
  if (start.size() != n) throw Error(ErrorCode::dimension_mismatch, "potential size mismatch");
  Field g = std::move(start);
  Field best = g;
  double best_value = weak_dual_objective(nu, mu, d, g);
  for (std::size_t it = 0; it < iterations; ++it) {
    const double value = weak_dual_objective(nu, mu, d, g);
    if (value > best_value) {
      best_value = value;
      best = g;
    }
    // Supergradient: mixture of the optimal kernels of Q_1 g minus nu.
    Field s(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      if (!(mu[x] > 0.0)) continue;
      const auto pt = inf_convolution_at(g, d, 1.0, x);
      s[pt.lo] += mu[x] * (1.0 - pt.weight_hi);
      s[pt.hi] += mu[x] * pt.weight_hi;
    }
    double norm2 = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      s[y] -= nu[y];
      norm2 += s[y] * s[y];
    }
    if (norm2 <= 1e-30 || target - value <= 0.0) break;
    const double step = (target - value) / norm2;
    for (std::size_t y = 0; y < n; ++y) g[y] += step * s[y];
  }
  if (weak_dual_objective(nu, mu, d, g) > best_value) best = g;
  return best;
}

double symmetrized_weak_transport(std::span<const double> a, std::span<const double> b,
                                  const DistanceMatrix& d) {
  return 0.5 * (weak_transport(a, b, d).value + weak_transport(b, a, d).value);
}

}  // namespace curvgraph
