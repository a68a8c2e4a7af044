#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace curvgraph {

// Every inequality instance the toolkit certifies is tagged with the result
// it instantiates.
enum class TheoremTag {
  gamma_commutation,        // Gamma(P_t f) <= e^{-2 k t} P_t Gamma(f)
  sqrt_commutation,         // Gamma(sqrt P_t f) <= e^{-2 k t} P_t Gamma(sqrt f)
  ratio_commutation,        // Gamma(P_t f)/P_t f <= e^{-2 k t} P_t (Gamma(f)/f)
  classical_commutation,    // sqrt Gamma(P_t f) <= e^{-k t} P_t sqrt Gamma(f), informational
  cde_condition,            // Gamma2~(f) >= k_e Gamma(f)
  coarse_contraction,       // W1(P_t* mu, P_t* nu) <= e^{-k_c t} W1(mu, nu)
  hamilton_jacobi,          // d/dt Q_t g + |grad~ Q_t g|^2 / 4 <= 0
  inf_convolution_convexity,
  gamma_estimate_i,
  gamma_estimate_ii,
  gamma_estimate_iii,
  gamma_estimate_iv,
  fisher_upper_bound,       // I(f) <= 4J
  fisher_order_modified,    // I(f) <= I~(f)
  fisher_order_bar,         // I(f) <= Ibar(f)
  cd_w1_information_dgamma, // W1_{dGamma}(f pi, pi)^2 <= 2/k^2 I(f)
  cd_w1_information_dgraph, // W1_{dg}(f pi, pi)^2 <= J/k^2 I(f)
  cd_cheeger,               // W1_{dGamma}(f pi, pi) <= 1/k int sqrt Gamma(f)
  cd_w1_information_gamma_dual, // W_Gamma(f pi, pi)^2 <= 2/k^2 I(f)
  cd_cheeger_gamma_dual,    // W_Gamma(f pi, pi) <= 1/k int sqrt Gamma(f)
  cd_weak_dirichlet,        // W~2(pi | f pi)^2 <= sqrt2 J/k^2 int Gamma(f)
  cde_weak_information,     // W~2(f pi | pi)^2 <= 2J/k_e^2 I(f)
  cde_weak_information_bar, // W~2(f pi | pi)^2 <= 2J/k_e^2 Ibar(f)
  cde_weak_reverse_bar,     // W~2(pi | f pi)^2 <= 2J/k_e^2 Ibar(f)
  coarse_w1_information,    // W1(f pi, pi)^2 <= I(f)(J - I(f)/8)/k_c^2
  coarse_w1_l1,             // W1(f pi, pi) <= 1/k_c sum_{x!=y} |f(x)-f(y)| K pi
  ti_th_mgf,                // int e^{l f} dpi <= exp(l^2 / 2C)
  ti_th_direct,             // W1(f pi, pi)^2 <= 2/C Ent(f)
  weak_ti_th_exponential,   // int exp(a Q_1 f) dpi <= exp(a int f dpi)
  weak_ti_th_direct,        // W~2(pi | f pi)^2 <= 2/C Ent(f)
  diameter,                 // d(x,y) <= 2/C (sqrt J(x) + sqrt J(y))
  diameter_cd,              // k d_g(x,y) <= 2 min(sqrt J) (sqrt J(x) + sqrt J(y))
  t2_blowup,                // W2^2 / Ent grows like 1/h
};

const char* theorem_tag_name(TheoremTag tag) noexcept;
TheoremTag parse_theorem_tag(std::string_view name);

inline constexpr double kViolationTolerance = 1e-9;

struct AuditRecord {
  TheoremTag tag{};
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool pass = true;
  std::vector<double> witness;
  std::string note;
};

// Builds a record for `lhs <= rhs`. Passing means slack >= -tol * max(1, |rhs|);
// an infinite rhs always passes.
AuditRecord make_record(TheoremTag tag, std::string instance, double lhs, double rhs,
                        double tol = kViolationTolerance);

std::size_t count_violations(const std::vector<AuditRecord>& records);
// Smallest slack, +inf for an empty list.
double worst_slack(const std::vector<AuditRecord>& records);

}  // namespace curvgraph
