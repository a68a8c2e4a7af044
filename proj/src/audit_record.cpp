#include "curvgraph/audit_record.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvgraph/error.hpp"

namespace curvgraph {
namespace {

struct TagName {
  TheoremTag tag;
  const char* name;
};

constexpr TagName kTagNames[] = {
    {TheoremTag::gamma_commutation, "gamma_commutation"},
    {TheoremTag::sqrt_commutation, "sqrt_commutation"},
    {TheoremTag::ratio_commutation, "ratio_commutation"},
    {TheoremTag::classical_commutation, "classical_commutation"},
    {TheoremTag::cde_condition, "cde_condition"},
    {TheoremTag::coarse_contraction, "coarse_contraction"},
    {TheoremTag::hamilton_jacobi, "hamilton_jacobi"},
    {TheoremTag::inf_convolution_convexity, "inf_convolution_convexity"},
    {TheoremTag::gamma_estimate_i, "gamma_estimate_i"},
    {TheoremTag::gamma_estimate_ii, "gamma_estimate_ii"},
    {TheoremTag::gamma_estimate_iii, "gamma_estimate_iii"},
    {TheoremTag::gamma_estimate_iv, "gamma_estimate_iv"},
    {TheoremTag::fisher_upper_bound, "fisher_upper_bound"},
    {TheoremTag::fisher_order_modified, "fisher_order_modified"},
    {TheoremTag::fisher_order_bar, "fisher_order_bar"},
    {TheoremTag::cd_w1_information_dgamma, "cd_w1_information_dgamma"},
    {TheoremTag::cd_w1_information_dgraph, "cd_w1_information_dgraph"},
    {TheoremTag::cd_cheeger, "cd_cheeger"},
    {TheoremTag::cd_w1_information_gamma_dual, "cd_w1_information_gamma_dual"},
    {TheoremTag::cd_cheeger_gamma_dual, "cd_cheeger_gamma_dual"},
    {TheoremTag::cd_weak_dirichlet, "cd_weak_dirichlet"},
    {TheoremTag::cde_weak_information, "cde_weak_information"},
    {TheoremTag::cde_weak_information_bar, "cde_weak_information_bar"},
    {TheoremTag::cde_weak_reverse_bar, "cde_weak_reverse_bar"},
    {TheoremTag::coarse_w1_information, "coarse_w1_information"},
    {TheoremTag::coarse_w1_l1, "coarse_w1_l1"},
    {TheoremTag::ti_th_mgf, "ti_th_mgf"},
    {TheoremTag::ti_th_direct, "ti_th_direct"},
    {TheoremTag::weak_ti_th_exponential, "weak_ti_th_exponential"},
    {TheoremTag::weak_ti_th_direct, "weak_ti_th_direct"},
    {TheoremTag::diameter, "diameter"},
    {TheoremTag::diameter_cd, "diameter_cd"},
    {TheoremTag::t2_blowup, "t2_blowup"},
};

}  // namespace

const char* theorem_tag_name(TheoremTag tag) noexcept {
  for (const auto& e : kTagNames) {
    if (e.tag == tag) return e.name;
  }
  return "unknown";
}

TheoremTag parse_theorem_tag(std::string_view name) {
  for (const auto& e : kTagNames) {
    if (name == e.name) return e.tag;
  }
  throw Error(ErrorCode::invalid_argument, "unknown theorem tag '" + std::string(name) + "'");
}

AuditRecord make_record(TheoremTag tag, std::string instance, double lhs, double rhs,
                        double tol) {
  AuditRecord r;
  r.tag = tag;
  r.instance = std::move(instance);
  r.lhs = lhs;
  r.rhs = rhs;
  if (rhs == std::numeric_limits<double>::infinity()) {
    r.slack = rhs;
    r.pass = true;
    r.note = "infinite right-hand side";
    return r;
  }
  r.slack = rhs - lhs;
  r.pass = std::isfinite(r.slack) && r.slack >= -tol * std::max(1.0, std::abs(rhs));
  return r;
}

std::size_t count_violations(const std::vector<AuditRecord>& records) {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const AuditRecord& r) { return !r.pass; }));
}

double worst_slack(const std::vector<AuditRecord>& records) {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& r : records) w = std::min(w, r.slack);
  return w;
}

}  // namespace curvgraph
