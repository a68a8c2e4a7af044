#pragma once

#include <span>
#include <vector>

#include "curvgraph/audit_record.hpp"
#include "curvgraph/markov_chain.hpp"

namespace curvgraph {

// Uniformization: P_t = e^{-t} sum_k t^k/k! K^k, cut once the Poisson tail
// drops below truncation_tol. The retained weights are renormalized so
// P_t stays a convex combination.
struct HeatOptions {
  double truncation_tol = 1e-12;
  std::size_t max_terms = 200000;

  void validate() const;
};

Field heat_apply(const MarkovChain& chain, std::span<const double> f, double t,
                 const HeatOptions& opts = {});
// mu P_t, acting on measures.
Field heat_adjoint(const MarkovChain& chain, std::span<const double> mu, double t,
                   const HeatOptions& opts = {});

// One record per (field, time, state), ordered in that nesting.
std::vector<AuditRecord> check_gamma_commutation(const MarkovChain& chain, double kappa,
                                                 const std::vector<Field>& fields,
                                                 std::span<const double> t_grid,
                                                 const HeatOptions& opts = {});

// Records for both the sqrt form and the Gamma(f)/f form, interleaved per
// (field, time, state). Fields must be strictly positive.
std::vector<AuditRecord> check_sqrt_commutation(const MarkovChain& chain, double kappa_e,
                                                const std::vector<Field>& fields,
                                                std::span<const double> t_grid,
                                                const HeatOptions& opts = {});

// sqrt Gamma(P_t f) <= e^{-k t} P_t sqrt Gamma(f). Not a result the toolkit
// certifies; records carry TheoremTag::classical_commutation and are meant
// to be reported, not counted as violations.
std::vector<AuditRecord> probe_classical_commutation(const MarkovChain& chain, double kappa,
                                                     const std::vector<Field>& fields,
                                                     std::span<const double> t_grid,
                                                     const HeatOptions& opts = {});

}  // namespace curvgraph
