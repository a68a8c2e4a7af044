#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "curvgraph/markov_chain.hpp"
#include "curvgraph/operators.hpp"
#include "curvgraph/random.hpp"
#include "curvgraph/transport.hpp"
#include "test_util.hpp"

using namespace curvgraph;
using testutil::error_of;

namespace {

MarkovChain two_point() { return standard_chain(StandardChain::two_point); }
MarkovChain hypercube(std::size_t n) { return standard_chain(StandardChain::hypercube, n); }

Field pi_of(const MarkovChain& c) { return Field(c.stationary().begin(), c.stationary().end()); }

// Path 0 - 1 - ... - n-1 with holding 1/2 at the ends.
MarkovChain path(std::size_t n) {
  std::vector<Triplet> t;
  std::vector<std::string> labels;
  for (std::size_t x = 0; x < n; ++x) {
    labels.push_back(std::to_string(x));
    if (x > 0) t.push_back({x, x - 1, 0.5});
    if (x + 1 < n) t.push_back({x, x + 1, 0.5});
    if (x == 0 || x + 1 == n) t.push_back({x, x, 0.5});
  }
  return build_chain(labels, t);
}

// Q_t g(x) minimized over all two-point measures by exact quadratic
// minimization on each segment.
double inf_convolution_oracle(const Field& g, const DistanceMatrix& d, double t, std::size_t x) {
  const std::size_t n = g.size();
  double best = g[x];
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t z = 0; z < n; ++z) {
      const double a = g[y];
      const double da = g[z] - g[y];
      const double m = d(x, y);
      const double dm = d(x, z) - d(x, y);
      // a + w da + (m + w dm)^2 / t on [0, 1]
      std::vector<double> cand{0.0, 1.0};
      if (dm != 0.0) cand.push_back(std::clamp(-(da * t / 2.0 + m * dm) / (dm * dm), 0.0, 1.0));
      for (double w : cand) {
        const double mean = m + w * dm;
        best = std::min(best, a + w * da + mean * mean / t);
      }
    }
  }
  return best;
}

// Weak cost on two points at distance 1, from the Lagrange conditions.
double two_point_weak(double nu0, double mu0) {
  if (mu0 >= nu0) return (mu0 - nu0) * (mu0 - nu0) / mu0;
  return (nu0 - mu0) * (nu0 - mu0) / (1.0 - mu0);
}

}  // namespace

TEST_CASE("Wasserstein closed forms") {
  const DistanceMatrix d2 = graph_distance(two_point());
  CHECK(wasserstein_p(Field{1, 0}, Field{0, 1}, d2, 1).value == doctest::Approx(1.0));
  CHECK(wasserstein_p(Field{1, 0}, Field{0.5, 0.5}, d2, 1).value == doctest::Approx(0.5));

  const DistanceMatrix dh = graph_distance(hypercube(2));
  const double w2 = wasserstein_p(Field{1, 0, 0, 0}, Field(4, 0.25), dh, 2).value;
  CHECK(w2 * w2 == doctest::Approx(1.5));

  CHECK(error_of([&] { wasserstein_p(Field{1, 0, 0}, Field{0, 1}, d2, 1); }) ==
        ErrorCode::dimension_mismatch);
  CHECK(error_of([&] { wasserstein_p(Field{1, 0}, Field{0, 1}, d2, 0.5); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("W1 on a path equals the CDF distance") {
  std::mt19937_64 rng(5);
  for (std::size_t n : {3, 5, 8}) {
    const DistanceMatrix d = graph_distance(path(n));
    for (int rep = 0; rep < 15; ++rep) {
      const Field mu = random_probability(n, rng);
      const Field nu = random_probability(n, rng);
      double oracle = 0.0;
      double cdf = 0.0;
      for (std::size_t x = 0; x + 1 < n; ++x) {
        cdf += mu[x] - nu[x];
        oracle += std::abs(cdf);
      }
      const auto coupling = wasserstein_p(mu, nu, d, 1);
      const auto potentials = wasserstein_p(mu, nu, d, 1, W1Method::potentials);
      CHECK(std::abs(coupling.value - oracle) <= 1e-10);
      CHECK(std::abs(potentials.value - oracle) <= 1e-10);
      for (const auto* r : {&coupling, &potentials}) {
        const Field& f = r->potential;
        REQUIRE(f.size() == n);
        double gap = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
          gap += f[x] * (mu[x] - nu[x]);
          for (std::size_t y = 0; y < n; ++y) CHECK(f[x] - f[y] <= d(x, y) + 1e-9);
        }
        CHECK(std::abs(gap - oracle) <= 1e-9);
      }
      // plan marginals
      const TransportPlan& p = coupling.plan;
      for (std::size_t x = 0; x < n; ++x) {
        double row = 0.0;
        double col = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
          row += p(x, y);
          col += p(y, x);
        }
        CHECK(std::abs(row - mu[x]) <= 1e-9);
        CHECK(std::abs(col - nu[x]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("tilde gradient") {
  const DistanceMatrix d2 = graph_distance(two_point());
  const Field g = tilde_gradient(Field{0, 1}, d2);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 1.0);
  const DistanceMatrix dh = graph_distance(hypercube(3));
  for (double v : tilde_gradient(Field(8, 4.0), dh)) CHECK(v == 0.0);
  Field neg(8);
  for (std::size_t y = 0; y < 8; ++y) neg[y] = -dh(5, y);
  CHECK(tilde_gradient(neg, dh)[5] == 1.0);
}

TEST_CASE("inf-convolution") {
  const DistanceMatrix d2 = graph_distance(two_point());
  const Field q = inf_convolution(Field{0, 1}, d2, 1.0);
  CHECK(q[0] == doctest::Approx(0.0));
  CHECK(q[1] == doctest::Approx(0.75));
  for (double t : {0.3, 1.0, 2.0}) {
    CHECK(inf_convolution(Field{0, 1}, d2, t)[1] == doctest::Approx(1.0 - t / 4.0));
  }
  for (double v : inf_convolution(Field{2.5, 2.5}, d2, 3.0)) CHECK(v == doctest::Approx(2.5));

  std::mt19937_64 rng(13);
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const MarkovChain c = testutil::random_reversible_chain(seed, 5 + seed, 0.2);
    const DistanceMatrix d = graph_distance(c);
    const std::size_t n = c.size();
    for (int rep = 0; rep < 5; ++rep) {
      const Field g = testutil::random_field(rng, n, -3, 3);
      Field prev = g;
      for (double t : {1e-6, 0.2, 1.0, 4.0}) {
        const Field qt = inf_convolution(g, d, t);
        for (std::size_t x = 0; x < n; ++x) {
          CHECK(std::abs(qt[x] - inf_convolution_oracle(g, d, t, x)) <= 1e-12);
          CHECK(qt[x] <= prev[x] + 1e-14);
          if (t == 1e-6) CHECK(std::abs(qt[x] - g[x]) <= 1e-4);
          const auto pt = inf_convolution_at(g, d, t, x);
          const double mean = (1 - pt.weight_hi) * d(x, pt.lo) + pt.weight_hi * d(x, pt.hi);
          const double val = (1 - pt.weight_hi) * g[pt.lo] + pt.weight_hi * g[pt.hi] +
                             mean * mean / t;
          CHECK(std::abs(val - qt[x]) <= 1e-12);
          CHECK(std::abs(pt.mean_distance - mean) <= 1e-12);
        }
        prev = qt;
      }
    }
  }
}

TEST_CASE("weak transport on two points") {
  const DistanceMatrix d2 = graph_distance(two_point());
  const auto a = weak_transport(Field{1, 0}, Field{0.5, 0.5}, d2);
  CHECK(std::abs(a.value - 0.5) <= 1e-12);
  CHECK(a.plan.kind == TransportPlan::Kind::kernel_family);
  CHECK(a.plan(0, 0) == doctest::Approx(1.0));
  CHECK(a.plan(1, 0) == doctest::Approx(1.0));
  const auto b = weak_transport(Field{0.5, 0.5}, Field{1, 0}, d2);
  CHECK(std::abs(b.value - 0.25) <= 1e-12);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 40; ++rep) {
    const double nu0 = u(rng);
    const double mu0 = 0.01 + 0.98 * u(rng);
    const auto r = weak_transport(Field{nu0, 1 - nu0}, Field{mu0, 1 - mu0}, d2);
    CHECK(std::abs(r.value - two_point_weak(nu0, mu0)) <= 1e-10);
  }

  const auto same = weak_transport(Field{0.3, 0.7}, Field{0.3, 0.7}, d2);
  CHECK(same.value <= 1e-14);
  CHECK(same.plan(0, 0) == doctest::Approx(1.0));
  CHECK(same.plan(1, 1) == doctest::Approx(1.0));

  // Dual potentials g = (0, c): the bound climbs to 1/2.
  double last = -1.0;
  for (double c : {0.5, 1.0, 2.0, 10.0, 100.0}) {
    const double v = weak_dual_objective(Field{1, 0}, Field{0.5, 0.5}, d2, Field{0, c});
    CHECK(v >= last - 1e-15);
    CHECK(v <= 0.5 + 1e-12);
    last = v;
  }
  CHECK(last == doctest::Approx(0.5));
  CHECK(weak_transport_dual(Field{1, 0}, Field{0.5, 0.5}, d2, {Field{0, 0}}) == 0.0);
}

TEST_CASE("weak transport primal, dual and Jensen ordering") {
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const MarkovChain c = seed == 0 ? hypercube(2) : testutil::random_reversible_chain(seed, 7, 0.3);
    const DistanceMatrix d = graph_distance(c);
    const std::size_t n = c.size();
    for (int rep = 0; rep < 25; ++rep) {
      const Field nu = random_probability(n, rng);
      const Field mu = random_probability(n, rng);
      const auto r = weak_transport(nu, mu, d);
      const double dual = weak_dual_objective(nu, mu, d, r.dual_potential);
      CHECK(dual <= r.value + 1e-8);
      CHECK(r.value - dual <= 1e-6);
      // kernel family constraints and reported cost
      double cost = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        double mix = 0.0;
        for (std::size_t x = 0; x < n; ++x) mix += mu[x] * r.plan(x, y);
        CHECK(std::abs(mix - nu[y]) <= 1e-9);
      }
      for (std::size_t x = 0; x < n; ++x) {
        double row = 0.0;
        double mean = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
          CHECK(r.plan(x, y) >= -1e-12);
          row += r.plan(x, y);
          mean += d(x, y) * r.plan(x, y);
        }
        CHECK(std::abs(row - 1.0) <= 1e-9);
        cost += mu[x] * mean * mean;
      }
      CHECK(std::abs(cost - r.value) <= 1e-9);
      const double w1 = wasserstein_p(mu, nu, d, 1).value;
      CHECK(w1 * w1 <= r.value + 1e-9);
      CHECK(w1 * w1 <= weak_transport(mu, nu, d).value + 1e-9);
    }
  }
}

TEST_CASE("Hamilton-Jacobi and convexity") {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.05 + (5.0 - 0.05) * i / 19.0);
  const DistanceMatrix d2 = graph_distance(two_point());
  for (const auto& r : hj_check(Field{1, 1}, d2, grid)) CHECK(r.pass);
  const auto recs = hj_check(Field{0, 1}, d2, grid);
  CHECK(count_violations(recs) == 0);

  std::mt19937_64 rng(8);
  const DistanceMatrix dh = graph_distance(hypercube(2));
  for (int rep = 0; rep < 20; ++rep) {
    const Field g = testutil::random_field(rng, 4, -2, 2);
    const auto r = hj_check(g, dh, grid);
    CHECK(count_violations(r) == 0);
    bool has_hj = false;
    bool has_convex = false;
    for (const auto& x : r) {
      has_hj |= x.tag == TheoremTag::hamilton_jacobi;
      has_convex |= x.tag == TheoremTag::inf_convolution_convexity;
    }
    CHECK(has_hj);
    CHECK(has_convex);
  }
  const std::vector<double> short_grid{0.1, 0.2};
  CHECK(error_of([&] { hj_check(Field{0, 1}, d2, short_grid); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("Gamma distance") {
  const DistanceMatrix tp = d_gamma(two_point());
  CHECK(std::abs(tp(0, 1) - 2.0) <= 1e-6);
  CHECK(tp.kind() == DistanceKind::gamma);

  const DistanceMatrix h2 = d_gamma(hypercube(2));
  CHECK(std::abs(h2(0, 1) - 2.0 * std::sqrt(2.0)) <= 1e-6);
  CHECK(std::abs(h2(0, 3) - 4.0) <= 1e-6);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MarkovChain c = testutil::random_reversible_chain(seed, 6, 0.2);
    const DistanceMatrix dg = graph_distance(c);
    const DistanceMatrix dga = d_gamma(c);
    const std::size_t n = c.size();
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        const double s = std::min(std::sqrt(c.laziness(x) / 2), std::sqrt(c.laziness(y) / 2));
        CHECK(dg(x, y) <= s * dga(x, y) + 1e-6);
        CHECK(dga(x, y) == dga(y, x));
        for (std::size_t z = 0; z < n; ++z) CHECK(dga(x, z) <= dga(x, y) + dga(y, z) + 2e-7);
      }
    }
    const GammaPotential p = d_gamma_pair(c, 0, n - 1);
    CHECK(p.f[n - 1] == 0.0);
    CHECK(std::abs(p.f[0] - p.value) <= 1e-12);
    for (double v : gamma(c, p.f)) CHECK(v <= 1.0 + 1e-7);
  }
  CHECK(error_of([] { d_gamma_pair(two_point(), 0, 3); }) == ErrorCode::invalid_argument);
}

TEST_CASE("Gamma-dual cost") {
  const MarkovChain h2 = hypercube(2);
  const DistanceMatrix dga = d_gamma(h2, 1e-10);

  // g = d_Gamma(., 11) is 1-Lipschitz for d_Gamma but Gamma(g)(01) > 1.
  Field g(4);
  for (std::size_t x = 0; x < 4; ++x) g[x] = dga(x, 3);
  CHECK(gamma(h2, g)[1] > 1.1);

  const Field f{2.0731218552178783, 0.009673901346883777, 1.8872539107187278,
                0.02995033271651001};
  Field m(4);
  Field c(4);
  for (std::size_t x = 0; x < 4; ++x) {
    m[x] = f[x] * 0.25;
    c[x] = (f[x] - 1.0) * 0.25;
  }
  const double w1 = wasserstein_p(m, pi_of(h2), dga, 1).value;
  const GammaPotential dual = gamma_dual_cost(h2, c, 1e-11);
  CHECK(std::abs(w1 - 1.41045) <= 1e-4);
  CHECK(dual.value <= 1.3875);
  CHECK(dual.value >= 1.3874);
  CHECK(dual.gap <= 1e-10);
  for (double v : gamma(h2, dual.f)) CHECK(v <= 1.0 + 1e-9);

  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const MarkovChain ch = testutil::random_reversible_chain(seed, 6, 0.25);
    const DistanceMatrix dd = d_gamma(ch);
    for (int rep = 0; rep < 5; ++rep) {
      const Field dens = random_density(ch, rng, 1.0);
      Field mm(6);
      Field cc(6);
      for (std::size_t x = 0; x < 6; ++x) {
        mm[x] = dens[x] * ch.stationary(x);
        cc[x] = (dens[x] - 1.0) * ch.stationary(x);
      }
      const GammaPotential gd = gamma_dual_cost(ch, cc);
      CHECK(gd.value <= wasserstein_p(mm, pi_of(ch), dd, 1).value + 1e-6);
      double lin = 0.0;
      for (std::size_t x = 0; x < 6; ++x) lin += cc[x] * gd.f[x];
      CHECK(std::abs(lin - gd.value) <= 1e-9);
    }
  }
  CHECK(error_of([&] { gamma_dual_cost(h2, Field{1, 0, 0, 0}); }) ==
        ErrorCode::invalid_argument);
}
