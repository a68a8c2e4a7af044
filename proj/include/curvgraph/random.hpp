#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "curvgraph/distance.hpp"
#include "curvgraph/markov_chain.hpp"

namespace curvgraph {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Independent generator for stream (seed, a, b). Streams are keyed by the
// unit of work (state, start, trial) so results do not depend on scheduling.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Normalized exp(sigma * Z) density w.r.t. pi.
Field random_density(const MarkovChain& chain, std::mt19937_64& rng, double sigma);
// Entries exp(U(-log_range, log_range)).
Field random_positive_field(std::size_t n, std::mt19937_64& rng, double log_range);
// Uniform entries in [lo, hi].
Field random_uniform_field(std::size_t n, std::mt19937_64& rng, double lo, double hi);
// Random probability vector (Dirichlet(1) on a random support size).
Field random_probability(std::size_t n, std::mt19937_64& rng);
// 1-Lipschitz w.r.t. d (McShane envelope of random values), centered under pi.
Field random_lipschitz(const MarkovChain& chain, const DistanceMatrix& d, std::mt19937_64& rng);

}  // namespace curvgraph
