#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "curvgraph/markov_chain.hpp"

namespace curvgraph {

inline constexpr double kPositivityFloor = 1e-12;

// Lf(x) = sum_y (f(y) - f(x)) K(x,y)
Field generator_apply(const MarkovChain& chain, std::span<const double> f);

// Gamma(f,g)(x) = 1/2 sum_y (f(y)-f(x)) (g(y)-g(x)) K(x,y)
Field gamma(const MarkovChain& chain, std::span<const double> f, std::span<const double> g);
Field gamma(const MarkovChain& chain, std::span<const double> f);

// Gamma2(f) = 1/2 L Gamma(f) - Gamma(f, Lf)
Field gamma2(const MarkovChain& chain, std::span<const double> f);

// Gamma2~(f) = Gamma2(f) - Gamma(f, Gamma(f)/f). NonPositiveField when some
// f(x) < floor.
Field gamma2_tilde(const MarkovChain& chain, std::span<const double> f,
                   double floor = kPositivityFloor);

// Pointwise versions. They read f only on the 2-ball around x.
double generator_at(const MarkovChain& chain, std::span<const double> f, std::size_t x);
double gamma_at(const MarkovChain& chain, std::span<const double> f,
                std::span<const double> g, std::size_t x);
double gamma2_at(const MarkovChain& chain, std::span<const double> f, std::size_t x);
double gamma2_tilde_at(const MarkovChain& chain, std::span<const double> f, std::size_t x,
                       double floor = kPositivityFloor);

// States within `radius` hops of x, sorted by (distance, index); x first.
std::vector<std::size_t> ball(const MarkovChain& chain, std::size_t x, int radius);

// Quadratic forms of f -> Gamma(f)(x) and f -> Gamma2(f)(x) over the 2-ball.
struct LocalForms {
  std::size_t center = 0;
  std::vector<std::size_t> support;  // support[0] == center
  Eigen::MatrixXd gamma_form;
  Eigen::MatrixXd gamma2_form;

  // Embeds coordinates over `support` into a full field (zero elsewhere).
  Field embed(const Eigen::VectorXd& local, std::size_t n) const;
  Eigen::VectorXd restrict(std::span<const double> f) const;
};

LocalForms local_forms(const MarkovChain& chain, std::size_t x);

}  // namespace curvgraph
