#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curvgraph/audit_record.hpp"
#include "curvgraph/distance.hpp"
#include "curvgraph/markov_chain.hpp"

namespace curvgraph {

// Distances reused across suites. d_gamma is only filled when requested.
struct AuditDistances {
  DistanceMatrix graph;
  std::optional<DistanceMatrix> gamma;
};

AuditDistances make_audit_distances(const MarkovChain& chain, bool with_gamma);

// Densities used by the transport-information suites: `trials` normalized
// exp(sigma Z) fields with sigma^2 cycling through {0.25, 1, 4}, followed by
// the Dirac densities 1_x / pi(x) and near-uniform two-block densities.
std::vector<Field> audit_densities(const MarkovChain& chain, std::size_t trials,
                                   std::uint64_t seed);

// Four records per density: W1 over d_Gamma vs I, W1 over d_g vs I, the
// Cheeger-type bound and the weak cost W~2(pi | f pi) vs the Dirichlet energy.
std::vector<AuditRecord> audit_cd_suite(const MarkovChain& chain, double kappa,
                                        std::size_t trials, std::uint64_t seed,
                                        const AuditDistances* distances = nullptr);

// The two d_Gamma records of the CD suite with W1 replaced by
// W_Gamma(f pi, pi) = sup { int g (f - 1) dpi : Gamma(g) <= 1 }, the cost the
// semigroup argument controls. W_Gamma <= W1 over d_Gamma, with strict
// inequality on hypercube(2). The left side is the solver value plus its gap.
std::vector<AuditRecord> audit_cd_gamma_dual_suite(const MarkovChain& chain, double kappa,
                                                   std::size_t trials, std::uint64_t seed);

// Three records per density, all over d_g.
std::vector<AuditRecord> audit_cde_suite(const MarkovChain& chain, double kappa_e,
                                         std::size_t trials, std::uint64_t seed,
                                         const AuditDistances* distances = nullptr);

// Three records per density: the W1-information bound, the L1 gradient bound
// and I(f) <= 4J.
std::vector<AuditRecord> audit_coarse_suite(const MarkovChain& chain, double kappa_c,
                                            std::size_t trials, std::uint64_t seed,
                                            const AuditDistances* distances = nullptr);

// Moment generating function bound for `trials` random 1-Lipschitz centered
// functions at every lambda, followed by the direct T1 check on `trials`
// random densities.
std::vector<AuditRecord> ti_implies_th_check(const MarkovChain& chain, double C,
                                             const DistanceMatrix& d,
                                             std::span<const double> lambda_grid,
                                             std::size_t trials, std::uint64_t seed);

// Exponential form of the weak transport-entropy inequality on random f in
// [-1,1]^n with exponent C/2, followed by the direct weak T2 check. Both use
// kernels leaving f pi, the orientation the exponential form is dual to.
std::vector<AuditRecord> weak_ti_th_check(const MarkovChain& chain, double C,
                                          std::size_t trials, std::uint64_t seed,
                                          const DistanceMatrix& d);

// d(x,y) <= 2/C (sqrt J(x) + sqrt J(y)) for every pair x < y, plus the Dirac
// Fisher values I(1_x/pi(x)) <= 4 J(x).
std::vector<AuditRecord> diameter_bound(const MarkovChain& chain, double C,
                                        const DistanceMatrix& d);
// kappa d_g(x,y) <= 2 min(sqrt J(x), sqrt J(y)) (sqrt J(x) + sqrt J(y)).
std::vector<AuditRecord> diameter_cd_bound(const MarkovChain& chain, double kappa,
                                           const DistanceMatrix& d_graph);
// min over pairs of the bound divided by the largest distance.
double diameter_bound_ratio(const MarkovChain& chain, double C, const DistanceMatrix& d);

// R(h) = W2(pi, nu_h)^2 / Ent(d nu_h / d pi) for the two-block perturbation
// nu_h. Records compare the floor d^2 pi(C1) pi(C2) to R(h) h; the note of
// each record carries R(h).
struct BlowupPoint {
  double h = 0.0;
  double w2_squared = 0.0;
  double entropy = 0.0;
  double ratio = 0.0;
};

std::vector<BlowupPoint> t2_blowup_series(const MarkovChain& chain,
                                          const std::vector<std::size_t>& block1,
                                          const std::vector<std::size_t>& block2,
                                          std::span<const double> h_grid,
                                          const DistanceMatrix& d);
std::vector<AuditRecord> t2_blowup_demo(const MarkovChain& chain,
                                        const std::vector<std::size_t>& block1,
                                        const std::vector<std::size_t>& block2,
                                        std::span<const double> h_grid,
                                        const DistanceMatrix& d);

enum class Suite {
  cd,
  cde,
  coarse,
  commutation,
  contraction,
  hj,
  gamma_estimates,
  fisher,
  ti_th,
  weak_ti_th,
  diameter,
  blowup,
};

const char* suite_name(Suite suite) noexcept;
Suite parse_suite(std::string_view name);
std::set<Suite> all_suites();
// "all" or a comma separated list.
std::set<Suite> parse_suites(std::string_view list);

struct AuditConfig {
  std::set<Suite> suites = all_suites();
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  std::size_t cde_starts = 64;
  std::optional<double> kappa;
  std::optional<double> kappa_e;
  std::optional<double> kappa_c;
  std::string chain_name;
};

struct SuiteSummary {
  TheoremTag tag{};
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_slack = 0.0;
  AuditRecord tightest;
  bool tight = false;
  bool informational = false;
};

struct AuditReport {
  std::string chain_name;
  std::size_t states = 0;
  std::vector<SuiteSummary> suites;
  std::vector<std::pair<std::string, double>> constants;
  std::vector<std::string> skipped;
  std::vector<AuditRecord> violations;  // at most a few per tag, with witnesses
  std::size_t total_violations = 0;
  nlohmann::json meta;
};

AuditReport run_full_audit(const MarkovChain& chain, const AuditConfig& config);

// Groups records by tag in first-seen order.
std::vector<SuiteSummary> summarize(const std::vector<AuditRecord>& records,
                                    bool informational = false);

nlohmann::json to_json(const AuditReport& report);

}  // namespace curvgraph
