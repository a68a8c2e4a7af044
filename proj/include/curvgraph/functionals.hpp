#pragma once

#include <span>
#include <vector>

#include "curvgraph/audit_record.hpp"
#include "curvgraph/markov_chain.hpp"

namespace curvgraph {

enum class FunctionalKind { entropy, fisher, fisher_modified, fisher_bar };

const char* functional_kind_name(FunctionalKind kind) noexcept;

struct FunctionalValue {
  FunctionalKind kind{};
  double value = 0.0;  // may be +inf for fisher_bar
  Field density;
};

// Ent(f) = sum f log f pi - (sum f pi) log(sum f pi), with 0 log 0 = 0.
FunctionalValue entropy(std::span<const double> f, const MarkovChain& chain);
// I(f) = 4 int Gamma(sqrt f) dpi
FunctionalValue fisher(std::span<const double> f, const MarkovChain& chain);
// I~(f) = int Gamma(f, log f) dpi. Requires f > 0.
FunctionalValue fisher_modified(std::span<const double> f, const MarkovChain& chain);
// Ibar(f) = int Gamma(f)/f dpi; +inf when f vanishes somewhere but not everywhere.
FunctionalValue fisher_bar(std::span<const double> f, const MarkovChain& chain);

// 4 J int f dpi, the ceiling on I(f).
double fisher_ceiling(std::span<const double> f, const MarkovChain& chain);

// int Gamma(f) dpi
double dirichlet_energy(std::span<const double> f, const MarkovChain& chain);

// Throws NegativeDensity / invalid_argument unless f >= 0 with
// |int f dpi - 1| <= tol.
void require_density(std::span<const double> f, const MarkovChain& chain, double tol = 1e-10);

// The four comparisons between Gamma and the one-sided gradient, in order
// (i)..(iv). Item (iii) needs f >= 0 and item (iv) f not identically zero;
// zeros of f make the right side of (iv) infinite.
std::vector<AuditRecord> gamma_estimates_check(std::span<const double> f,
                                               std::span<const double> g,
                                               const MarkovChain& chain,
                                               const DistanceMatrix& d);

}  // namespace curvgraph
