#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curvgraph/distance.hpp"

namespace curvgraph {

struct Tolerances {
  double row_sum = 1e-12;           // |sum_y K(x,y) - 1|
  double detailed_balance = 1e-12;  // |K(x,y)pi(x) - K(y,x)pi(y)|
  double density = 1e-10;           // |sum f pi - 1| for densities
  double metric = 1e-9;             // triangle inequality slack
};

struct Triplet {
  std::size_t src;
  std::size_t dst;
  double rate;
};

struct Transition {
  std::size_t target;
  double rate;
};

// Finite irreducible reversible Markov kernel normalized to rows summing to
// one. Immutable once built; only build_chain constructs instances.
class MarkovChain {
 public:
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t index_of(std::string_view label) const;

  double kernel(std::size_t x, std::size_t y) const;
  double holding(std::size_t x) const { return holding_[x]; }
  // Positive off-diagonal entries of row x, sorted by target.
  std::span<const Transition> neighbors(std::size_t x) const {
    return {edges_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }
  std::span<const double> stationary() const noexcept { return pi_; }
  double stationary(std::size_t x) const { return pi_[x]; }

  double laziness(std::size_t x) const { return 1.0 - holding_[x]; }
  double laziness() const noexcept { return max_laziness_; }

  // All positive entries, diagonal included, in row-major order.
  std::vector<Triplet> triplets() const;

 private:
  friend MarkovChain build_chain(std::vector<std::string> labels,
                                 std::span<const Triplet> entries,
                                 const Tolerances& tol);
  MarkovChain() = default;

  std::vector<std::string> labels_;
  std::vector<std::size_t> offsets_;
  std::vector<Transition> edges_;
  std::vector<double> holding_;
  std::vector<double> pi_;
  double max_laziness_ = 0.0;
};

// Validates normalization, irreducibility and detailed balance, and solves
// for the stationary measure. Duplicate (src,dst) entries are summed.
MarkovChain build_chain(std::vector<std::string> labels,
                        std::span<const Triplet> entries,
                        const Tolerances& tol = {});

enum class StandardChain { two_point, hypercube, cycle, complete };

StandardChain parse_standard_chain(std::string_view name);
const char* standard_chain_name(StandardChain name) noexcept;

// hypercube(N): {0,1}^N, K(x,y) = 1/(2N) across one coordinate, K(x,x) = 1/2.
// cycle(n): K(x,x+-1) = 1/2. complete(n): K(x,y) = 1/n for every y.
// two_point ignores n and equals hypercube(1).
MarkovChain standard_chain(StandardChain name, std::size_t n = 1);

inline constexpr std::size_t kMaxHypercubeDimension = 20;

// Shortest-path hop counts on the support graph of K.
DistanceMatrix graph_distance(const MarkovChain& chain);

struct Laziness {
  std::vector<double> per_state;
  double global = 0.0;
};

Laziness laziness(const MarkovChain& chain);

// sum_x f(x) pi(x)
double integrate(const MarkovChain& chain, std::span<const double> f);

}  // namespace curvgraph
