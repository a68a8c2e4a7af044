#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "curvgraph/audit_record.hpp"
#include "curvgraph/distance.hpp"
#include "curvgraph/markov_chain.hpp"

namespace curvgraph {

enum class CurvatureNotion { cd, cde_prime, coarse };

const char* curvature_notion_name(CurvatureNotion notion) noexcept;

struct LocusValue {
  std::vector<std::size_t> locus;  // {x} or {x, y}
  double value = 0.0;
};

struct CurvatureReport {
  CurvatureNotion notion{};
  double global_value = 0.0;  // min over per_locus
  std::vector<LocusValue> per_locus;
  Field witness;              // achieves global_value at witness_locus
  std::vector<std::size_t> witness_locus;
  std::map<std::string, double> meta;
  std::string label;          // "exact", "upper_bound", "edge-restricted"
};

// Optimal Bakry-Emery constant: min_x inf { Gamma2(f)(x) / Gamma(f)(x) }.
// -inf when Gamma2 is negative on the kernel of Gamma at some state.
CurvatureReport cd_curvature(const MarkovChain& chain);

// Gamma2~(f)(x) / Gamma(f)(x) for f > 0 (NaN when Gamma(f)(x) = 0).
double cde_ratio(const MarkovChain& chain, std::span<const double> f, std::size_t x);

struct CdeOptions {
  std::size_t starts = 64;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 300;
};

// Multi-start local search for inf Gamma2~(f)(x)/Gamma(f)(x). The value is an
// upper bound on the best CDE' constant, labelled "upper_bound".
CurvatureReport cde_curvature_upper(const MarkovChain& chain, const CdeOptions& opts);
CurvatureReport cde_curvature_upper(const MarkovChain& chain, std::size_t starts,
                                    std::uint64_t seed);

enum class CdeVariant { all_points, negative_generator_only };

// One record per trial: the worst state for a random log-uniform positive f.
// negative_generator_only restricts the condition to states with Lf(x) < 0.
std::vector<AuditRecord> cde_verify(const MarkovChain& chain, double kappa_e,
                                    std::size_t trials, std::uint64_t seed,
                                    CdeVariant variant = CdeVariant::all_points);

enum class PairSet { all, edges_only };

// Derivative LP: kappa(x,y) = inf { (Lf(y) - Lf(x)) / d(x,y) : f 1-Lipschitz,
// f(x) - f(y) = d(x,y) }. Witness is the optimal potential of the minimizing
// pair, extended to the whole space.
CurvatureReport coarse_ricci(const MarkovChain& chain, const DistanceMatrix& d,
                             PairSet pairs = PairSet::all);
CurvatureReport coarse_ricci(const MarkovChain& chain, const DistanceMatrix& d,
                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

// (1/t)(1 - W1(mu_x^t, mu_y^t)/d(x,y)) with mu_x^t = (1-t) delta_x + t K(x,.).
double coarse_ricci_secant(const MarkovChain& chain, const DistanceMatrix& d, std::size_t x,
                           std::size_t y, double t);

// W1(P_t* mu, P_t* nu) <= e^{-k t} W1(mu, nu) on random pairs of measures;
// one record per (pair, t).
std::vector<AuditRecord> contraction_check(const MarkovChain& chain, const DistanceMatrix& d,
                                           double kappa_c, std::span<const double> t_grid,
                                           std::size_t trials, std::uint64_t seed);

}  // namespace curvgraph
