#include "curvgraph/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "curvgraph/error.hpp"

namespace curvgraph {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

// std::normal_distribution and friends are implementation-defined; these
// helpers only use the raw 64-bit output so streams match across toolchains.
namespace {

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
  const double u1 = open_unit(rng);
  const double u2 = unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

Field random_density(const MarkovChain& chain, std::mt19937_64& rng, double sigma) {
  const std::size_t n = chain.size();
  Field z(n);
  for (double& v : z) v = sigma * gaussian(rng);
  const double shift = *std::max_element(z.begin(), z.end());
  Field f(n);
  double mass = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    f[x] = std::exp(z[x] - shift);
    mass += f[x] * chain.stationary(x);
  }
  for (double& v : f) v /= mass;
  return f;
}

Field random_positive_field(std::size_t n, std::mt19937_64& rng, double log_range) {
  Field f(n);
  for (double& v : f) v = std::exp(log_range * (2.0 * unit(rng) - 1.0));
  return f;
}

Field random_uniform_field(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  Field f(n);
  for (double& v : f) v = lo + (hi - lo) * unit(rng);
  return f;
}

Field random_probability(std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "empty space");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
  const std::size_t support = 1 + rng() % n;
  Field p(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < support; ++i) {
    const double e = -std::log(open_unit(rng));
    p[order[i]] = e;
    total += e;
  }
  for (double& v : p) v /= total;
  return p;
}

Field random_lipschitz(const MarkovChain& chain, const DistanceMatrix& d, std::mt19937_64& rng) {
  const std::size_t n = chain.size();
  if (d.size() != n) throw Error(ErrorCode::dimension_mismatch, "distance size mismatch");
  const double scale = std::max(d.diameter(), 1e-12);
  Field raw(n);
  for (double& v : raw) v = scale * (2.0 * unit(rng) - 1.0);
  // McShane: the smallest 1-Lipschitz majorant of raw on the whole space.
  Field f(n);
  for (std::size_t x = 0; x < n; ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < n; ++y) best = std::min(best, raw[y] + d(x, y));
    f[x] = best;
  }
  double mean = 0.0;
  for (std::size_t x = 0; x < n; ++x) mean += f[x] * chain.stationary(x);
  for (double& v : f) v -= mean;
  return f;
}

}  // namespace curvgraph
