#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvgraph/curvgraph.h"

namespace {

struct Chain {
  cg_chain* ptr = nullptr;
  ~Chain() { cg_chain_free(ptr); }
};

nlohmann::json take(char* s) {
  auto doc = nlohmann::json::parse(s);
  cg_string_free(s);
  return doc;
}

}  // namespace

TEST_CASE("standard chains through the C API") {
  Chain h;
  REQUIRE(cg_chain_standard("hypercube", 2, &h.ptr) == CG_OK);
  CHECK(cg_chain_size(h.ptr) == 4);
  CHECK(std::string(cg_chain_label(h.ptr, 3)) == "11");
  CHECK(cg_chain_label(h.ptr, 4) == nullptr);
  std::vector<double> pi(4), j(4);
  CHECK(cg_chain_stationary(h.ptr, pi.data()) == CG_OK);
  CHECK(cg_chain_laziness(h.ptr, j.data()) == CG_OK);
  for (int i = 0; i < 4; ++i) {
    CHECK(pi[i] == doctest::Approx(0.25));
    CHECK(j[i] == 0.5);
  }
  double v = 0;
  CHECK(cg_cd_curvature(h.ptr, &v) == CG_OK);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(cg_coarse_ricci(h.ptr, &v) == CG_OK);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(cg_cde_curvature_upper(h.ptr, 16, 0, &v) == CG_OK);
  CHECK(std::abs(v - 0.5) <= 1e-6);
  std::vector<double> d(16);
  CHECK(cg_distance(h.ptr, CG_DISTANCE_GRAPH, d.data()) == CG_OK);
  CHECK(d[3] == 2.0);
  CHECK(cg_distance(h.ptr, CG_DISTANCE_GAMMA, d.data()) == CG_OK);
  CHECK(std::abs(d[3] - 4.0) <= 1e-6);
}

TEST_CASE("errors map to status codes") {
  Chain c;
  CHECK(cg_chain_standard("cycle", 2, &c.ptr) == CG_UNSUPPORTED_SIZE);
  CHECK(c.ptr == nullptr);
  CHECK(std::string(cg_last_error()).size() > 0);
  CHECK(std::string(cg_status_name(CG_UNSUPPORTED_SIZE)) == "UnsupportedSize");
  CHECK(cg_chain_standard("torus", 3, &c.ptr) == CG_INVALID_ARGUMENT);

  const size_t src[] = {0, 1};
  const size_t dst[] = {0, 1};
  const double rate[] = {1.0, 1.0};
  CHECK(cg_chain_from_triplets(2, nullptr, src, dst, rate, 2, &c.ptr) == CG_NOT_IRREDUCIBLE);
  const double short_rate[] = {0.9, 1.0};
  CHECK(cg_chain_from_triplets(2, nullptr, src, dst, short_rate, 2, &c.ptr) ==
        CG_ROW_SUM_VIOLATION);
  CHECK(cg_chain_load("/nonexistent/chain.json", 0, &c.ptr) == CG_IO_ERROR);
  CHECK(cg_chain_standard("two_point", 1, nullptr) == CG_INVALID_ARGUMENT);

  // a successful call clears the message
  CHECK(cg_chain_standard("two_point", 1, &c.ptr) == CG_OK);
  CHECK(std::string(cg_last_error()).empty());
}

TEST_CASE("triplets, save and load") {
  const char* labels[] = {"a", "b"};
  const size_t src[] = {0, 0, 1, 1};
  const size_t dst[] = {0, 1, 0, 1};
  const double rate[] = {0.8, 0.2, 0.6, 0.4};
  Chain c;
  REQUIRE(cg_chain_from_triplets(2, labels, src, dst, rate, 4, &c.ptr) == CG_OK);
  double pi[2];
  cg_chain_stationary(c.ptr, pi);
  CHECK(pi[0] == doctest::Approx(0.75));
  const auto path = std::filesystem::temp_directory_path() / "curvgraph_capi.json";
  REQUIRE(cg_chain_save(c.ptr, path.c_str(), "{\"k\":1}") == CG_OK);
  Chain back;
  REQUIRE(cg_chain_load(path.c_str(), 0, &back.ptr) == CG_OK);
  CHECK(std::string(cg_chain_label(back.ptr, 1)) == "b");
  double pi2[2];
  cg_chain_stationary(back.ptr, pi2);
  CHECK(pi2[0] == pi[0]);
  CHECK(cg_chain_save(c.ptr, path.c_str(), "{bad") == CG_INVALID_ARGUMENT);
}

TEST_CASE("JSON entry points") {
  Chain tp;
  REQUIRE(cg_chain_standard("two_point", 1, &tp.ptr) == CG_OK);
  char* out = nullptr;
  REQUIRE(cg_analyze_json(tp.ptr, R"({"what":"cd,coarse,functionals","density":[2,0]})", &out) ==
          CG_OK);
  auto doc = take(out);
  CHECK(doc["cd"]["global"].get<double>() == doctest::Approx(1.0));
  CHECK(doc["coarse"]["global"].get<double>() == doctest::Approx(1.0));
  CHECK(doc["functionals"]["fisher"].get<double>() == doctest::Approx(2.0));
  CHECK(doc["functionals"]["fisher_bar"] == "inf");

  REQUIRE(cg_transport_json(tp.ptr, R"({"mu":"pi","nu":"dirac:0","cost":"weak"})", &out) ==
          CG_OK);
  doc = take(out);
  CHECK(doc["value_squared"].get<double>() == doctest::Approx(0.5));
  CHECK(doc["dual_value"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  REQUIRE(cg_transport_json(tp.ptr, R"({"mu":[1,0],"nu":[0.5,0.5],"cost":"w1"})", &out) ==
          CG_OK);
  CHECK(take(out)["value"].get<double>() == doctest::Approx(0.5));
  CHECK(cg_transport_json(tp.ptr, R"({"mu":[1,0,0],"nu":"pi"})", &out) != CG_OK);
  CHECK(cg_transport_json(tp.ptr, "not json", &out) == CG_INVALID_ARGUMENT);

  size_t violations = 99;
  REQUIRE(cg_audit_json(tp.ptr, R"({"suites":"cd,coarse","trials":20,"seed":3})", &out,
                        &violations) == CG_OK);
  CHECK(violations == 0);
  doc = take(out);
  CHECK(doc["total_violations"] == 0);
  REQUIRE(cg_audit_json(tp.ptr, R"({"suites":"cd","trials":20,"kappa":1.5})", &out,
                        &violations) == CG_OK);
  CHECK(violations > 0);
  cg_string_free(out);
  CHECK(cg_audit_json(tp.ptr, R"({"suites":"bogus"})", &out, &violations) ==
        CG_INVALID_ARGUMENT);
}
