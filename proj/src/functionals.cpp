#include "curvgraph/functionals.hpp"

#include <cmath>
#include <limits>

#include "curvgraph/error.hpp"
#include "curvgraph/operators.hpp"
#include "curvgraph/transport.hpp"

namespace curvgraph {
namespace {

void require_nonnegative(std::span<const double> f, const MarkovChain& chain) {
  if (f.size() != chain.size()) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
  for (double v : f) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "field has a non-finite entry");
    if (v < 0.0) throw Error(ErrorCode::negative_density, "density has a negative entry");
  }
}

void require_positive(std::span<const double> f, const MarkovChain& chain) {
  if (f.size() != chain.size()) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
  for (double v : f) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::non_positive_field, "field must be strictly positive");
    }
  }
}

FunctionalValue make_value(FunctionalKind kind, double value, std::span<const double> f) {
  return {kind, value, Field(f.begin(), f.end())};
}

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

}  // namespace

const char* functional_kind_name(FunctionalKind kind) noexcept {
  switch (kind) {
    case FunctionalKind::entropy: return "entropy";
    case FunctionalKind::fisher: return "fisher";
    case FunctionalKind::fisher_modified: return "fisher_modified";
    case FunctionalKind::fisher_bar: return "fisher_bar";
  }
  return "unknown";
}

FunctionalValue entropy(std::span<const double> f, const MarkovChain& chain) {
  require_nonnegative(f, chain);
  double body = 0.0;
  double mass = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    body += xlogx(f[x]) * chain.stationary(x);
    mass += f[x] * chain.stationary(x);
  }
  return make_value(FunctionalKind::entropy, std::max(0.0, body - xlogx(mass)), f);
}

FunctionalValue fisher(std::span<const double> f, const MarkovChain& chain) {
  require_nonnegative(f, chain);
  Field root(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) root[x] = std::sqrt(f[x]);
  return make_value(FunctionalKind::fisher, 4.0 * dirichlet_energy(root, chain), f);
}

FunctionalValue fisher_modified(std::span<const double> f, const MarkovChain& chain) {
  require_positive(f, chain);
  Field logf(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) logf[x] = std::log(f[x]);
  const Field g = gamma(chain, f, logf);
  return make_value(FunctionalKind::fisher_modified, std::max(0.0, integrate(chain, g)), f);
}

FunctionalValue fisher_bar(std::span<const double> f, const MarkovChain& chain) {
  require_nonnegative(f, chain);
  const Field g = gamma(chain, f);
  double total = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (g[x] == 0.0) continue;
    if (f[x] == 0.0) {
      return make_value(FunctionalKind::fisher_bar, std::numeric_limits<double>::infinity(), f);
    }
    total += g[x] / f[x] * chain.stationary(x);
  }
  return make_value(FunctionalKind::fisher_bar, total, f);
}

double fisher_ceiling(std::span<const double> f, const MarkovChain& chain) {
  return 4.0 * chain.laziness() * integrate(chain, f);
}

double dirichlet_energy(std::span<const double> f, const MarkovChain& chain) {
  if (f.size() != chain.size()) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
  return integrate(chain, gamma(chain, f));
}

void require_density(std::span<const double> f, const MarkovChain& chain, double tol) {
  require_nonnegative(f, chain);
  const double mass = integrate(chain, f);
  if (std::abs(mass - 1.0) > tol) {
    throw Error(ErrorCode::invalid_argument,
                "density integrates to " + std::to_string(mass) + " instead of 1");
  }
}

std::vector<AuditRecord> gamma_estimates_check(std::span<const double> f,
                                               std::span<const double> g,
                                               const MarkovChain& chain,
                                               const DistanceMatrix& d) {
  const std::size_t n = chain.size();
  if (f.size() != n || g.size() != n || d.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "inputs disagree in size");
  }
  const double j = chain.laziness();
  const Field grad_f = tilde_gradient(f, d);
  const Field grad_g = tilde_gradient(g, d);
  const Field gfg = gamma(chain, f, g);
  const Field gff = gamma(chain, f);
  const double cross = integrate(chain, gfg);

  std::vector<AuditRecord> out;
  double rhs = 0.0;
  for (std::size_t x = 0; x < n; ++x) rhs += grad_g[x] * grad_f[x] * chain.stationary(x);
  out.push_back(make_record(TheoremTag::gamma_estimate_i, "f,g", cross, std::sqrt(2.0) * j * rhs));

  rhs = 0.0;
  for (std::size_t x = 0; x < n; ++x) rhs += grad_g[x] * std::sqrt(gff[x]) * chain.stationary(x);
  out.push_back(make_record(TheoremTag::gamma_estimate_ii, "f,g", std::abs(cross),
                            std::sqrt(2.0 * j) * rhs));

  bool nonnegative = true;
  bool any_zero = false;
  bool all_zero = true;
  for (double v : f) {
    if (v < 0.0) nonnegative = false;
    if (v == 0.0) any_zero = true;
    if (v != 0.0) all_zero = false;
  }
  if (!nonnegative) {
    throw Error(ErrorCode::non_positive_field, "items (iii) and (iv) need a nonnegative f");
  }
  if (all_zero) throw Error(ErrorCode::non_positive_field, "item (iv) needs f not identically 0");

  Field root(n);
  for (std::size_t x = 0; x < n; ++x) root[x] = std::sqrt(f[x]);
  const Field groot = gamma(chain, root);
  rhs = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    rhs += grad_g[x] * std::sqrt(f[x] * groot[x]) * chain.stationary(x);
  }
  out.push_back(make_record(TheoremTag::gamma_estimate_iii, "f,g", cross,
                            2.0 * std::sqrt(2.0 * j) * rhs));

  const double lhs = integrate(chain, groot);
  if (any_zero) {
    auto rec = make_record(TheoremTag::gamma_estimate_iv, "f,g", lhs,
                           std::numeric_limits<double>::infinity());
    rec.note = "f vanishes somewhere: gradient of log f is infinite";
    out.push_back(std::move(rec));
  } else {
    Field logf(n);
    for (std::size_t x = 0; x < n; ++x) logf[x] = std::log(f[x]);
    const Field grad_log = tilde_gradient(logf, d);
    rhs = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      rhs += grad_log[x] * grad_log[x] * f[x] * chain.stationary(x);
    }
    out.push_back(make_record(TheoremTag::gamma_estimate_iv, "f,g", lhs, 0.25 * j * rhs));
  }
  return out;
}

}  // namespace curvgraph
