#include <cmath>
#include <random>

#include <doctest.h>

#include "curvgraph/markov_chain.hpp"
#include "curvgraph/operators.hpp"
#include "test_util.hpp"

using namespace curvgraph;
using testutil::error_of;

namespace {

MarkovChain two_point() { return standard_chain(StandardChain::two_point); }
MarkovChain hypercube(std::size_t n) { return standard_chain(StandardChain::hypercube, n); }

double weight(std::size_t x) { return static_cast<double>(__builtin_popcountll(x)); }

}  // namespace

TEST_CASE("generator examples") {
  const Field lf = generator_apply(two_point(), Field{0.0, 2.0});
  CHECK(lf[0] == 1.0);
  CHECK(lf[1] == -1.0);

  const MarkovChain h2 = hypercube(2);
  Field w(4);
  for (std::size_t x = 0; x < 4; ++x) w[x] = weight(x);
  const Field lw = generator_apply(h2, w);
  for (std::size_t x = 0; x < 4; ++x) CHECK(lw[x] == doctest::Approx((2.0 - 2.0 * w[x]) / 4.0));

  const Field zero = generator_apply(testutil::random_reversible_chain(3, 8, 0.2), Field(8, 3.5));
  for (double v : zero) CHECK(std::abs(v) <= 1e-15);
}

TEST_CASE("gamma examples") {
  const Field g = gamma(two_point(), Field{0.0, 2.0});
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 1.0);

  std::mt19937_64 rng(5);
  for (double a : {-3.0, 0.0, 0.7}) {
    for (double b : {-1.0, 4.0}) {
      const Field t = gamma(two_point(), Field{a, b});
      CHECK(t[0] == doctest::Approx(0.25 * (a - b) * (a - b)).epsilon(1e-15));
      CHECK(t[1] == t[0]);
    }
  }
  const MarkovChain c = testutil::random_reversible_chain(11, 10, 0.3);
  const Field h = testutil::random_field(rng, 10, -1, 1);
  for (double v : gamma(c, Field(10, -2.0), h)) CHECK(v == 0.0);

  // Gamma(d(x0,.)) <= J(x)/2
  const DistanceMatrix d = graph_distance(c);
  for (std::size_t x0 = 0; x0 < c.size(); ++x0) {
    const auto row = d.row(x0);
    const Field gd = gamma(c, row);
    for (std::size_t x = 0; x < c.size(); ++x) CHECK(gd[x] <= c.laziness(x) / 2.0 + 1e-15);
  }
}

TEST_CASE("gamma and gamma2 agree with the dense oracle") {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const MarkovChain c = testutil::random_reversible_chain(seed, 5 + seed % 6, 0.05 * seed);
    const Eigen::MatrixXd k = testutil::dense_kernel(c);
    const std::size_t n = c.size();
    for (int rep = 0; rep < 5; ++rep) {
      const Field f = testutil::random_field(rng, n, -2, 2);
      const Field g = testutil::random_field(rng, n, -2, 2);
      const Eigen::VectorXd gam = testutil::dense_gamma(k, testutil::vec(f), testutil::vec(g));
      const Eigen::VectorXd g2 = testutil::dense_gamma2(k, testutil::vec(f));
      const Field got = gamma(c, f, g);
      const Field got2 = gamma2(c, f);
      const Field lf = generator_apply(c, f);
      const Eigen::VectorXd lf_oracle = testutil::dense_generator(k, testutil::vec(f));
      for (std::size_t x = 0; x < n; ++x) {
        const auto i = static_cast<Eigen::Index>(x);
        CHECK(std::abs(got[x] - gam(i)) <= 1e-12);
        CHECK(std::abs(got2[x] - g2(i)) <= 1e-12);
        CHECK(std::abs(lf[x] - lf_oracle(i)) <= 1e-13);
        CHECK(std::abs(gamma_at(c, f, g, x) - got[x]) <= 1e-14);
        CHECK(std::abs(gamma2_at(c, f, x) - got2[x]) <= 1e-13);
      }
    }
  }
}

TEST_CASE("gamma properties") {
  std::mt19937_64 rng(23);
  const MarkovChain c = testutil::random_reversible_chain(4, 9, 0.2);
  const std::size_t n = c.size();
  for (int rep = 0; rep < 50; ++rep) {
    const Field f = testutil::random_field(rng, n, -3, 3);
    const Field g = testutil::random_field(rng, n, -3, 3);
    const Field fg = gamma(c, f, g);
    const Field gf = gamma(c, g, f);
    const Field ff = gamma(c, f);
    const Field gg = gamma(c, g);
    for (std::size_t x = 0; x < n; ++x) {
      CHECK(fg[x] == gf[x]);
      CHECK(ff[x] >= 0.0);
      CHECK(fg[x] * fg[x] <= ff[x] * gg[x] * (1 + 1e-12) + 1e-15);
    }
    // integration by parts
    const Field lg = generator_apply(c, g);
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      lhs += fg[x] * c.stationary(x);
      rhs -= f[x] * lg[x] * c.stationary(x);
    }
    CHECK(std::abs(lhs - rhs) <= 1e-10);

    // 2 sqrt f L sqrt f = L f - 2 Gamma(sqrt f)
    const Field p = testutil::random_field(rng, n, 0.01, 5);
    Field root(n);
    for (std::size_t x = 0; x < n; ++x) root[x] = std::sqrt(p[x]);
    const Field lroot = generator_apply(c, root);
    const Field lp = generator_apply(c, p);
    const Field groot = gamma(c, root);
    for (std::size_t x = 0; x < n; ++x) {
      CHECK(std::abs(2 * root[x] * lroot[x] - (lp[x] - 2 * groot[x])) <= 1e-10);
    }
  }
}

TEST_CASE("gamma2 examples") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const Field f = testutil::random_field(rng, 2, -5, 5);
    const Field g2 = gamma2(two_point(), f);
    const Field g = gamma(two_point(), f);
    CHECK(g2[0] == doctest::Approx(g[0]).epsilon(1e-13));
    CHECK(g2[1] == doctest::Approx(g[1]).epsilon(1e-13));
  }
  for (double v : gamma2(hypercube(2), Field(4, 1.0))) CHECK(v == 0.0);

  // Indicator of 00 on hypercube(2), expanded by hand:
  // Lf = (-1/2, 1/4, 1/4, 0), Gamma(f) = (1/4, 1/8, 1/8, 0),
  // L Gamma(f) = (-1/16, 0, 0, 1/16), Gamma(f, Lf) = (-3/16, -3/32, -3/32, 0).
  const Field g2 = gamma2(hypercube(2), Field{1, 0, 0, 0});
  CHECK(g2[0] == doctest::Approx(5.0 / 32));
  CHECK(g2[1] == doctest::Approx(3.0 / 32));
  CHECK(g2[2] == doctest::Approx(3.0 / 32));
  CHECK(g2[3] == doctest::Approx(1.0 / 32));
}

TEST_CASE("gamma2 tilde") {
  // Gamma(f) = 1 at both states but Gamma(f)/f = (1, 1/3) is not constant:
  // Gamma(f, Gamma(f)/f) = 1/4 * 2 * (-2/3) = -1/3, so Gamma2~ = 4/3.
  const Field t = gamma2_tilde(two_point(), Field{1.0, 3.0});
  CHECK(gamma2(two_point(), Field{1.0, 3.0})[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(t[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  // In general Gamma2~ = Gamma + Gamma^2 / (f0 f1) on two points.
  std::mt19937_64 r2(4);
  for (int rep = 0; rep < 20; ++rep) {
    const Field p = testutil::random_field(r2, 2, 0.1, 5.0);
    const double g = 0.25 * (p[0] - p[1]) * (p[0] - p[1]);
    const Field got = gamma2_tilde(two_point(), p);
    CHECK(std::abs(got[0] - (g + g * g / (p[0] * p[1]))) <= 1e-12 * (1 + got[0]));
    CHECK(std::abs(got[1] - got[0]) <= 1e-12 * (1 + got[0]));
  }
  for (double v : gamma2_tilde(hypercube(2), Field(4, 2.5))) CHECK(v == 0.0);

  Field f(4);
  for (std::size_t x = 0; x < 4; ++x) f[x] = std::exp(weight(x));
  Field f2 = f;
  for (double& v : f2) v *= 2;
  const Field a = gamma2_tilde(hypercube(2), f);
  const Field b = gamma2_tilde(hypercube(2), f2);
  for (std::size_t x = 0; x < 4; ++x) CHECK(std::abs(b[x] - 4 * a[x]) <= 1e-10);

  // Oracle: Gamma2(f) - Gamma(f, Gamma(f)/f) through the dense forms.
  std::mt19937_64 rng(9);
  const MarkovChain c = testutil::random_reversible_chain(8, 7, 0.4);
  const Eigen::MatrixXd k = testutil::dense_kernel(c);
  for (int rep = 0; rep < 20; ++rep) {
    const Field p = testutil::random_field(rng, 7, 0.1, 3);
    const Eigen::VectorXd v = testutil::vec(p);
    const Eigen::VectorXd gv = testutil::dense_gamma(k, v, v);
    const Eigen::VectorXd oracle =
        testutil::dense_gamma2(k, v) - testutil::dense_gamma(k, v, gv.cwiseQuotient(v));
    const Field got = gamma2_tilde(c, p);
    for (std::size_t x = 0; x < 7; ++x) {
      CHECK(std::abs(got[x] - oracle(static_cast<Eigen::Index>(x))) <= 1e-11);
    }
  }

  CHECK(error_of([] { gamma2_tilde(two_point(), Field{1.0, 0.0}); }) ==
        ErrorCode::non_positive_field);
  CHECK(error_of([] { gamma2_tilde(two_point(), Field{1.0, -1.0}); }) ==
        ErrorCode::non_positive_field);
}

TEST_CASE("local forms") {
  const LocalForms tp = local_forms(two_point(), 0);
  REQUIRE(tp.support.size() == 2);
  CHECK(tp.support[0] == 0);
  CHECK(tp.gamma_form(0, 0) == doctest::Approx(0.25));
  CHECK(tp.gamma_form(0, 1) == doctest::Approx(-0.25));
  CHECK(tp.gamma_form(1, 0) == doctest::Approx(-0.25));
  CHECK(tp.gamma_form(1, 1) == doctest::Approx(0.25));

  for (std::size_t x = 0; x < 8; ++x) CHECK(local_forms(hypercube(3), x).support.size() == 7);
  CHECK(ball(hypercube(3), 0, 1).size() == 4);

  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const MarkovChain c = testutil::random_reversible_chain(seed, 12, 0.2);
    for (std::size_t x = 0; x < c.size(); ++x) {
      const LocalForms lf = local_forms(c, x);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(lf.support.size());
      CHECK((lf.gamma_form * ones).norm() <= 1e-14);
      CHECK((lf.gamma2_form * ones).norm() <= 1e-13);
      CHECK((lf.gamma_form - lf.gamma_form.transpose()).norm() <= 1e-15);
      CHECK((lf.gamma2_form - lf.gamma2_form.transpose()).norm() <= 1e-14);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lf.gamma_form);
      CHECK(es.eigenvalues().minCoeff() >= -1e-14);
      for (int rep = 0; rep < 100 / static_cast<int>(c.size()) + 1; ++rep) {
        const Field f = testutil::random_field(rng, c.size(), -2, 2);
        const Eigen::VectorXd r = lf.restrict(f);
        CHECK(std::abs(r.dot(lf.gamma_form * r) - gamma_at(c, f, f, x)) <= 1e-12);
        CHECK(std::abs(r.dot(lf.gamma2_form * r) - gamma2_at(c, f, x)) <= 1e-12);
      }
    }
  }
}
