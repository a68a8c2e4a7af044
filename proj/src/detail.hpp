#pragma once

#include <cstddef>

#include "curvgraph/markov_chain.hpp"

namespace curvgraph::detail {

struct LocalCd {
  double value = 0.0;
  Field witness;  // Gamma(witness)(x) = 1; empty when value is -inf
  std::size_t null_dim = 0;
};

// Local Bakry-Emery constant at x and a minimizing direction.
LocalCd cd_at(const MarkovChain& chain, std::size_t x);

}  // namespace curvgraph::detail
