#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "curvgraph/chain_io.hpp"
#include "curvgraph/markov_chain.hpp"
#include "test_util.hpp"

using namespace curvgraph;
using testutil::error_of;

namespace {

std::vector<Triplet> two_state(double a, double b) {
  return {{0, 0, 1.0 - a}, {0, 1, a}, {1, 0, b}, {1, 1, 1.0 - b}};
}

}  // namespace

TEST_CASE("two-state chain solves stationarity by hand") {
  const auto trip = two_state(0.5, 0.5);
  const MarkovChain c = build_chain({"a", "b"}, trip);
  CHECK(c.stationary(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.stationary(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.laziness() == 0.5);
  CHECK(c.index_of("b") == 1);

  // pi(0) a = pi(1) b gives pi = (b, a)/(a+b).
  const auto skew = two_state(0.2, 0.6);
  const MarkovChain s = build_chain({"0", "1"}, skew);
  CHECK(s.stationary(0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(s.stationary(1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(s.laziness(0) == doctest::Approx(0.2));
  CHECK(s.laziness() == doctest::Approx(0.6));
}

TEST_CASE("validation errors") {
  const std::vector<Triplet> identity{{0, 0, 1.0}, {1, 1, 1.0}};
  CHECK(error_of([&] { build_chain({"0", "1"}, identity); }) == ErrorCode::not_irreducible);

  const std::vector<Triplet> short_row{{0, 0, 0.4}, {0, 1, 0.5}, {1, 0, 0.5}, {1, 1, 0.5}};
  CHECK(error_of([&] { build_chain({"0", "1"}, short_row); }) == ErrorCode::row_sum_violation);

  // Three-cycle rotating one way only.
  const std::vector<Triplet> rotation{{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}};
  CHECK(error_of([&] { build_chain({"0", "1", "2"}, rotation); }) ==
        ErrorCode::not_reversible);

  // Irreducible with a cycle whose rate product differs in the two directions.
  const std::vector<Triplet> kolmogorov{{0, 1, 0.6}, {0, 2, 0.4}, {1, 0, 0.4}, {1, 2, 0.6},
                                        {2, 0, 0.6}, {2, 1, 0.4}};
  CHECK(error_of([&] { build_chain({"0", "1", "2"}, kolmogorov); }) ==
        ErrorCode::not_reversible);

  const std::vector<Triplet> negative{{0, 0, 1.5}, {0, 1, -0.5}, {1, 0, 0.5}, {1, 1, 0.5}};
  CHECK(error_of([&] { build_chain({"0", "1"}, negative); }) == ErrorCode::invalid_argument);
  const auto trip = two_state(0.5, 0.5);
  CHECK(error_of([&] { build_chain({"x", "x"}, trip); }) == ErrorCode::invalid_argument);
  const std::vector<Triplet> out_of_range{{0, 5, 1.0}};
  CHECK(error_of([&] { build_chain({"0", "1"}, out_of_range); }) ==
        ErrorCode::invalid_argument);
  const std::vector<Triplet> single{{0, 0, 1.0}};
  CHECK(error_of([&] { build_chain({"0"}, single); }) == ErrorCode::not_irreducible);
}

TEST_CASE("standard chains") {
  const MarkovChain h2 = standard_chain(StandardChain::hypercube, 2);
  REQUIRE(h2.size() == 4);
  CHECK(h2.labels()[0] == "00");
  CHECK(h2.labels()[3] == "11");
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(h2.laziness(x) == 0.5);
    CHECK(h2.stationary(x) == doctest::Approx(0.25).epsilon(1e-14));
  }
  CHECK(h2.kernel(0, 1) == 0.25);
  CHECK(h2.kernel(0, 3) == 0.0);

  const MarkovChain k4 = standard_chain(StandardChain::complete, 4);
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(k4.laziness(x) == 0.75);
    CHECK(k4.stationary(x) == doctest::Approx(0.25).epsilon(1e-14));
  }

  const MarkovChain tp = standard_chain(StandardChain::two_point);
  const MarkovChain h1 = standard_chain(StandardChain::hypercube, 1);
  const auto trip = two_state(0.5, 0.5);
  const MarkovChain hand = build_chain({"0", "1"}, trip);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      CHECK(tp.kernel(x, y) == hand.kernel(x, y));
      CHECK(tp.kernel(x, y) == h1.kernel(x, y));
    }
    CHECK(tp.stationary(x) == hand.stationary(x));
  }

  CHECK(laziness(standard_chain(StandardChain::cycle, 5)).global == 1.0);
  CHECK(laziness(standard_chain(StandardChain::complete, 7)).global ==
        doctest::Approx(1.0 - 1.0 / 7.0));
  CHECK(laziness(standard_chain(StandardChain::hypercube, 3)).global == 0.5);

  CHECK(error_of([] { standard_chain(StandardChain::cycle, 2); }) ==
        ErrorCode::unsupported_size);
  CHECK(error_of([] { standard_chain(StandardChain::hypercube, 21); }) ==
        ErrorCode::unsupported_size);
  CHECK(error_of([] { standard_chain(StandardChain::complete, 1); }) ==
        ErrorCode::unsupported_size);
  CHECK(error_of([] { parse_standard_chain("torus"); }) == ErrorCode::invalid_argument);
  CHECK(parse_standard_chain("cycle") == StandardChain::cycle);
}

TEST_CASE("stationarity and positivity on random reversible chains") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MarkovChain c = testutil::random_reversible_chain(seed, 3 + seed % 9, 0.1 * (seed % 5));
    const Eigen::MatrixXd k = testutil::dense_kernel(c);
    const Eigen::VectorXd pi = testutil::vec(Field(c.stationary().begin(), c.stationary().end()));
    const Eigen::VectorXd moved = k.transpose() * pi;
    CHECK((moved - pi).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(pi.minCoeff() > 0.0);
    CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("graph distance against Floyd-Warshall") {
  const DistanceMatrix h3 = graph_distance(standard_chain(StandardChain::hypercube, 3));
  CHECK(h3(0, 7) == 3.0);
  CHECK(h3.kind() == DistanceKind::graph);
  CHECK(graph_distance(standard_chain(StandardChain::two_point))(0, 1) == 1.0);
  CHECK(graph_distance(standard_chain(StandardChain::cycle, 6))(0, 3) == 3.0);

  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const MarkovChain c = testutil::random_reversible_chain(seed, 4 + seed, 0.3);
    const DistanceMatrix d = graph_distance(c);
    const Eigen::MatrixXd oracle = testutil::floyd_warshall(c);
    for (std::size_t x = 0; x < c.size(); ++x) {
      for (std::size_t y = 0; y < c.size(); ++y) {
        CHECK(d(x, y) == oracle(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)));
        CHECK((d(x, y) == 1.0) == (x != y && c.kernel(x, y) > 0.0));
      }
    }
  }
}

TEST_CASE("chain files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "curvgraph_unit";
  std::filesystem::create_directories(dir);
  const MarkovChain c = testutil::random_reversible_chain(7, 9, 0.25);
  save_chain(c, dir / "c.json", {{"note", "x"}});
  const MarkovChain back = load_chain(dir / "c.json");
  REQUIRE(back.size() == c.size());
  CHECK(back.labels() == c.labels());
  for (std::size_t x = 0; x < c.size(); ++x) {
    CHECK(back.stationary(x) == c.stationary(x));
    for (std::size_t y = 0; y < c.size(); ++y) CHECK(back.kernel(x, y) == c.kernel(x, y));
  }

  CHECK(error_of([&] { load_chain(dir / "missing.json"); }) == ErrorCode::io_error);
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{ not json";
  }
  CHECK(error_of([&] { load_chain(dir / "bad.json"); }) == ErrorCode::io_error);
  CHECK(error_of([] { chain_from_json(nlohmann::json{{"states", {"a"}}}); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("CSV edge lists") {
  const std::string text = "src,dst,rate\na,b,0.5\nb,a,0.25\n";
  {
    std::istringstream in(text);
    CHECK(error_of([&] { chain_from_csv(in, false); }) == ErrorCode::row_sum_violation);
  }
  std::istringstream in(text);
  const MarkovChain c = chain_from_csv(in, true);
  CHECK(c.labels() == std::vector<std::string>{"a", "b"});
  CHECK(c.holding(0) == 0.5);
  CHECK(c.holding(1) == 0.75);
  CHECK(c.stationary(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  std::istringstream header("from,to,w\na,b,1\n");
  CHECK(error_of([&] { chain_from_csv(header, true); }) == ErrorCode::invalid_argument);
  std::istringstream rate("src,dst,rate\na,b,x\n");
  CHECK(error_of([&] { chain_from_csv(rate, true); }) == ErrorCode::invalid_argument);
}
