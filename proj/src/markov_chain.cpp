#include "curvgraph/markov_chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "curvgraph/error.hpp"

namespace curvgraph {
namespace {

// Above this size the dense null-space solve is replaced by propagating
// detailed-balance ratios along a BFS tree.
constexpr std::size_t kDenseStationaryLimit = 4096;

std::vector<bool> reachable(std::size_t n, std::size_t start,
                            const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

std::vector<double> stationary_dense(std::size_t n, const std::vector<double>& dense) {
  // (K^T - I) pi = 0 with the last equation replaced by sum pi = 1.
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = dense[j * n + i] - (i == j ? 1.0 : 0.0);
    }
  }
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd pi = a.fullPivLu().solve(b);
  return {pi.data(), pi.data() + n};
}

}  // namespace

std::size_t MarkovChain::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw Error(ErrorCode::invalid_argument, "unknown state label '" + std::string(label) + "'");
}

double MarkovChain::kernel(std::size_t x, std::size_t y) const {
  if (x == y) return holding_[x];
  const auto row = neighbors(x);
  const auto it = std::lower_bound(row.begin(), row.end(), y,
                                   [](const Transition& t, std::size_t v) { return t.target < v; });
  return (it != row.end() && it->target == y) ? it->rate : 0.0;
}

std::vector<Triplet> MarkovChain::triplets() const {
  std::vector<Triplet> out;
  for (std::size_t x = 0; x < size(); ++x) {
    bool diag_done = holding_[x] == 0.0;
    for (const Transition& t : neighbors(x)) {
      if (!diag_done && t.target > x) {
        out.push_back({x, x, holding_[x]});
        diag_done = true;
      }
      out.push_back({x, t.target, t.rate});
    }
    if (!diag_done) out.push_back({x, x, holding_[x]});
  }
  return out;
}

MarkovChain build_chain(std::vector<std::string> labels, std::span<const Triplet> entries,
                        const Tolerances& tol) {
  const std::size_t n = labels.size();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "chain needs at least one state");
  {
    std::set<std::string> distinct(labels.begin(), labels.end());
    if (distinct.size() != n) throw Error(ErrorCode::invalid_argument, "state labels must be distinct");
  }

  std::vector<std::map<std::size_t, double>> rows(n);
  for (const Triplet& e : entries) {
    if (e.src >= n || e.dst >= n) {
      throw Error(ErrorCode::invalid_argument, "triplet index out of range");
    }
    if (!std::isfinite(e.rate) || e.rate < 0.0) {
      throw Error(ErrorCode::invalid_argument, "kernel entries must be finite and nonnegative");
    }
    if (e.rate > 0.0) rows[e.src][e.dst] += e.rate;
  }

  MarkovChain chain;
  chain.labels_ = std::move(labels);
  chain.offsets_.assign(n + 1, 0);
  chain.holding_.assign(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double total = 0.0;
    for (const auto& [y, rate] : rows[x]) {
      total += rate;
      if (y == x) {
        chain.holding_[x] = rate;
      } else {
        chain.edges_.push_back({y, rate});
      }
    }
    chain.offsets_[x + 1] = chain.edges_.size();
    if (std::abs(total - 1.0) > tol.row_sum) {
      throw Error(ErrorCode::row_sum_violation,
                  "row " + std::to_string(x) + " sums to " + std::to_string(total));
    }
  }

  // Strong connectivity of the directed support.
  std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (const Transition& t : chain.neighbors(x)) {
      fwd[x].push_back(t.target);
      bwd[t.target].push_back(x);
    }
  }
  const auto f = reachable(n, 0, fwd);
  const auto b = reachable(n, 0, bwd);
  if (n == 1 || std::find(f.begin(), f.end(), false) != f.end() ||
      std::find(b.begin(), b.end(), false) != b.end()) {
    throw Error(ErrorCode::not_irreducible, "kernel is not irreducible");
  }

  std::vector<double> pi;
  if (n <= kDenseStationaryLimit) {
    std::vector<double> dense(n * n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      dense[x * n + x] = chain.holding_[x];
      for (const Transition& t : chain.neighbors(x)) dense[x * n + t.target] = t.rate;
    }
    pi = stationary_dense(n, dense);
  } else {
    pi.assign(n, 0.0);
    pi[0] = 1.0;
    std::vector<bool> seen(n, false);
    seen[0] = true;
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (const Transition& t : chain.neighbors(u)) {
        if (seen[t.target]) continue;
        const double back = chain.kernel(t.target, u);
        if (back <= 0.0) throw Error(ErrorCode::not_reversible, "one-way transition");
        pi[t.target] = pi[u] * t.rate / back;
        seen[t.target] = true;
        queue.push_back(t.target);
      }
    }
  }
  double mass = 0.0;
  for (double v : pi) mass += v;
  for (double& v : pi) v /= mass;
  for (std::size_t x = 0; x < n; ++x) {
    if (!(pi[x] > 0.0)) {
      throw Error(ErrorCode::not_reversible, "stationary measure is not positive");
    }
  }

  for (std::size_t x = 0; x < n; ++x) {
    for (const Transition& t : chain.neighbors(x)) {
      const double flow = t.rate * pi[x];
      const double back = chain.kernel(t.target, x) * pi[t.target];
      if (std::abs(flow - back) > tol.detailed_balance) {
        throw Error(ErrorCode::not_reversible,
                    "detailed balance fails between " + std::to_string(x) + " and " +
                        std::to_string(t.target));
      }
    }
  }
  chain.pi_ = std::move(pi);

  chain.max_laziness_ = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    const double j = 1.0 - chain.holding_[x];
    if (!(j > 0.0)) throw Error(ErrorCode::not_irreducible, "state never moves");
    chain.max_laziness_ = std::max(chain.max_laziness_, j);
  }
  return chain;
}

StandardChain parse_standard_chain(std::string_view name) {
  if (name == "two_point") return StandardChain::two_point;
  if (name == "hypercube") return StandardChain::hypercube;
  if (name == "cycle") return StandardChain::cycle;
  if (name == "complete") return StandardChain::complete;
  throw Error(ErrorCode::invalid_argument, "unknown chain builder '" + std::string(name) + "'");
}

const char* standard_chain_name(StandardChain name) noexcept {
  switch (name) {
    case StandardChain::two_point: return "two_point";
    case StandardChain::hypercube: return "hypercube";
    case StandardChain::cycle: return "cycle";
    case StandardChain::complete: return "complete";
  }
  return "unknown";
}

MarkovChain standard_chain(StandardChain name, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::unsupported_size, "size must be positive");
  std::vector<std::string> labels;
  std::vector<Triplet> entries;
  switch (name) {
    case StandardChain::two_point:
      return standard_chain(StandardChain::hypercube, 1);
    case StandardChain::hypercube: {
      if (n > kMaxHypercubeDimension) {
        throw Error(ErrorCode::unsupported_size,
                    "hypercube dimension above " + std::to_string(kMaxHypercubeDimension));
      }
      const std::size_t states = std::size_t{1} << n;
      const double rate = 1.0 / (2.0 * static_cast<double>(n));
      for (std::size_t x = 0; x < states; ++x) {
        std::string label(n, '0');
        for (std::size_t i = 0; i < n; ++i) {
          if (x & (std::size_t{1} << (n - 1 - i))) label[i] = '1';
        }
        labels.push_back(std::move(label));
        entries.push_back({x, x, 0.5});
        for (std::size_t i = 0; i < n; ++i) entries.push_back({x, x ^ (std::size_t{1} << i), rate});
      }
      break;
    }
    case StandardChain::cycle:
      if (n < 3) throw Error(ErrorCode::unsupported_size, "cycle needs at least 3 states");
      for (std::size_t x = 0; x < n; ++x) {
        labels.push_back(std::to_string(x));
        entries.push_back({x, (x + 1) % n, 0.5});
        entries.push_back({x, (x + n - 1) % n, 0.5});
      }
      break;
    case StandardChain::complete:
      if (n < 2) throw Error(ErrorCode::unsupported_size, "complete chain needs at least 2 states");
      for (std::size_t x = 0; x < n; ++x) {
        labels.push_back(std::to_string(x));
        for (std::size_t y = 0; y < n; ++y) entries.push_back({x, y, 1.0 / static_cast<double>(n)});
      }
      break;
  }
  return build_chain(std::move(labels), entries);
}

DistanceMatrix graph_distance(const MarkovChain& chain) {
  const std::size_t n = chain.size();
  // Symmetric support; reversibility makes the directed support symmetric
  // already, the union is taken anyway.
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (const Transition& t : chain.neighbors(x)) {
      adj[x].push_back(t.target);
      adj[t.target].push_back(x);
    }
  }
  DistanceMatrix d(n, DistanceKind::graph);
  std::vector<std::size_t> dist(n);
  constexpr std::size_t unseen = static_cast<std::size_t>(-1);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), unseen);
    dist[s] = 0;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : adj[u]) {
        if (dist[v] == unseen) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (std::size_t t = 0; t < n; ++t) d.set(s, t, static_cast<double>(dist[t]));
  }
  return d;
}

Laziness laziness(const MarkovChain& chain) {
  Laziness out;
  out.per_state.resize(chain.size());
  for (std::size_t x = 0; x < chain.size(); ++x) out.per_state[x] = chain.laziness(x);
  out.global = chain.laziness();
  return out;
}

double integrate(const MarkovChain& chain, std::span<const double> f) {
  if (f.size() != chain.size()) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
  double s = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) s += f[x] * chain.stationary(x);
  return s;
}

}  // namespace curvgraph
