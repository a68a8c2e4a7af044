#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "curvgraph/audit_record.hpp"
#include "curvgraph/distance.hpp"
#include "curvgraph/markov_chain.hpp"

namespace curvgraph {

struct TransportPlan {
  enum class Kind { coupling, kernel_family };
  Kind kind = Kind::coupling;
  std::size_t n = 0;
  // Row-major n*n. Coupling: pi(x,y) with marginals (mu, nu). Kernel family:
  // rows p_x(.) with sum_x mu(x) p_x(y) = nu(y); rows with mu(x) = 0 are
  // left as the Dirac at x.
  std::vector<double> weights;
  double value = 0.0;

  double operator()(std::size_t x, std::size_t y) const { return weights[x * n + y]; }
};

const char* plan_kind_name(TransportPlan::Kind kind) noexcept;

// Optimal coupling for a linear cost (row-major n*n). row_potential and
// col_potential are LP multipliers: phi(x) + psi(y) <= cost(x,y) with
// equality on the support of the plan, sum mu phi + sum nu psi = value.
struct LinearTransport {
  double value = 0.0;
  TransportPlan plan;
  Field row_potential;
  Field col_potential;
};

LinearTransport solve_transport(std::span<const double> mu, std::span<const double> nu,
                                std::span<const double> cost);

enum class W1Method { coupling, potentials };

struct WassersteinResult {
  double value = 0.0;  // W_p, not W_p^p
  TransportPlan plan;  // empty weights for the potentials formulation
  // p = 1 only: 1-Lipschitz f with sum f mu - sum f nu = W_1.
  Field potential;
};

WassersteinResult wasserstein_p(std::span<const double> mu, std::span<const double> nu,
                                const DistanceMatrix& d, double p,
                                W1Method method = W1Method::coupling);

// Gamma-distance: d(x,y) = sup { f(x) - f(y) : Gamma(f) <= 1 }.
struct GammaPotential {
  double value = 0.0;
  Field f;          // feasible maximizer, f(y) = 0
  double gap = 0.0; // certified duality gap of the barrier solve
};

GammaPotential d_gamma_pair(const MarkovChain& chain, std::size_t x, std::size_t y,
                            double tol = 1e-7);
DistanceMatrix d_gamma(const MarkovChain& chain, double tol = 1e-7);

// sup { sum_x c(x) g(x) : Gamma(g) <= 1 } for c summing to zero. With
// c = (f - 1) pi this is the transport cost whose dual ranges over
// Gamma-feasible potentials only; it never exceeds W1 over d_Gamma, and is
// strictly smaller when some d_Gamma-Lipschitz g has Gamma(g) > 1.
// `value` is a feasible lower bound within `gap` of the supremum.
GammaPotential gamma_dual_cost(const MarkovChain& chain, std::span<const double> c,
                               double tol = 1e-9);

// |grad~ g|(x) = sup_y [g(y) - g(x)]_- / d(x,y)
Field tilde_gradient(std::span<const double> g, const DistanceMatrix& d);

// Q~_t g(x) = inf_p  int g dp + (int d(x,.) dp)^2 / t
struct InfConvolutionPoint {
  double value = 0.0;
  double mean_distance = 0.0;  // int d(x,.) dp at the optimum
  // Optimal p is (1-w) delta_lo + w delta_hi.
  std::size_t lo = 0;
  std::size_t hi = 0;
  double weight_hi = 0.0;
};

InfConvolutionPoint inf_convolution_at(std::span<const double> g, const DistanceMatrix& d,
                                       double t, std::size_t x);
Field inf_convolution(std::span<const double> g, const DistanceMatrix& d, double t);

struct WeakTransportOptions {
  double stationarity_tol = 1e-10;
  std::size_t max_iterations = 500;
};

// W~2(nu|mu)^2 = inf sum_x mu(x) (sum_y d(x,y) p_x(y))^2 over kernels with
// sum_x mu(x) p_x = nu. `value` is the squared cost.
struct WeakTransportResult {
  double value = 0.0;
  TransportPlan plan;
  double gap = 0.0;      // Frank-Wolfe stationarity gap at termination
  Field dual_potential;  // g with dual objective close to value
  std::size_t iterations = 0;
};

WeakTransportResult weak_transport(std::span<const double> nu, std::span<const double> mu,
                                   const DistanceMatrix& d,
                                   const WeakTransportOptions& opts = {});

// Dual objective  int Q~_1 g dmu - int g dnu  (never above the primal).
double weak_dual_objective(std::span<const double> nu, std::span<const double> mu,
                           const DistanceMatrix& d, std::span<const double> g);

// Best dual objective over the candidate potentials.
double weak_transport_dual(std::span<const double> nu, std::span<const double> mu,
                           const DistanceMatrix& d, const std::vector<Field>& g_family);

// Supergradient ascent on the dual started from `start`. Returns the best
// potential found.
Field weak_dual_ascent(std::span<const double> nu, std::span<const double> mu,
                       const DistanceMatrix& d, Field start, double target,
                       std::size_t iterations = 50);

// 1/2 (W~2(a|b)^2 + W~2(b|a)^2)
double symmetrized_weak_transport(std::span<const double> a, std::span<const double> b,
                                  const DistanceMatrix& d);

// Convexity of t -> Q~_t g(x) (midpoint test on consecutive grid points) and
// the Hamilton-Jacobi inequality by right differences. t_grid increasing,
// at least 3 points.
std::vector<AuditRecord> hj_check(std::span<const double> g, const DistanceMatrix& d,
                                  std::span<const double> t_grid);

}  // namespace curvgraph
