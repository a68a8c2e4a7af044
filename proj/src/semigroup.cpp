#include "curvgraph/semigroup.hpp"

#include <cmath>
#include <sstream>

#include "curvgraph/error.hpp"
#include "curvgraph/operators.hpp"
#include "curvgraph/parallel.hpp"

namespace curvgraph {
namespace {

Field apply_kernel(const MarkovChain& chain, const Field& f) {
  Field out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) {
    double s = chain.holding(x) * f[x];
    for (const Transition& t : chain.neighbors(x)) s += t.rate * f[t.target];
    out[x] = s;
  }
  return out;
}

Field apply_kernel_adjoint(const MarkovChain& chain, const Field& mu) {
  Field out(mu.size(), 0.0);
  for (std::size_t x = 0; x < mu.size(); ++x) {
    out[x] += chain.holding(x) * mu[x];
    for (const Transition& t : chain.neighbors(x)) out[t.target] += t.rate * mu[x];
  }
  return out;
}

template <class Step>
Field uniformize(const Field& start, double t, const HeatOptions& opts, Step step) {
  opts.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::invalid_argument, "time must be finite and nonnegative");
  }
  if (t == 0.0) return start;
  Field acc(start.size(), 0.0);
  Field power = start;
  double log_w = -t;
  double retained = 0.0;
  const double log_t = std::log(t);
  for (std::size_t k = 0;; ++k) {
    const double w = std::exp(log_w);
    retained += w;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * power[i];
    const double log_next = log_w + log_t - std::log(static_cast<double>(k + 1));
    const double ratio_cap = t / static_cast<double>(k + 2);
    if (ratio_cap < 1.0) {
      // Poisson weights beyond k+1 decay at least geometrically with ratio t/(k+2).
      const double tail = std::exp(log_next) / (1.0 - ratio_cap);
      if (tail < opts.truncation_tol) break;
    }
    if (k + 1 >= opts.max_terms) {
      throw Error(ErrorCode::truncation_failure,
                  "uniformization needs more than " + std::to_string(opts.max_terms) + " terms");
    }
    power = step(power);
    log_w = log_next;
  }
  for (double& v : acc) v /= retained;
  return acc;
}

std::string instance_label(std::size_t field, double t, std::size_t x) {
  std::ostringstream os;
  os << "field=" << field << " t=" << t << " x=" << x;
  return os.str();
}

}  // namespace

void HeatOptions::validate() const {
  if (!(truncation_tol > 0.0 && truncation_tol <= 1e-6)) {
    throw Error(ErrorCode::invalid_argument, "truncation_tol must lie in (0, 1e-6]");
  }
  if (max_terms < 1) throw Error(ErrorCode::invalid_argument, "max_terms must be positive");
}

Field heat_apply(const MarkovChain& chain, std::span<const double> f, double t,
                 const HeatOptions& opts) {
  if (f.size() != chain.size()) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
  return uniformize(Field(f.begin(), f.end()), t, opts,
                    [&](const Field& v) { return apply_kernel(chain, v); });
}

Field heat_adjoint(const MarkovChain& chain, std::span<const double> mu, double t,
                   const HeatOptions& opts) {
  if (mu.size() != chain.size()) throw Error(ErrorCode::dimension_mismatch, "measure size mismatch");
  return uniformize(Field(mu.begin(), mu.end()), t, opts,
                    [&](const Field& v) { return apply_kernel_adjoint(chain, v); });
}

std::vector<AuditRecord> check_gamma_commutation(const MarkovChain& chain, double kappa,
                                                 const std::vector<Field>& fields,
                                                 std::span<const double> t_grid,
                                                 const HeatOptions& opts) {
  const std::size_t n = chain.size();
  std::vector<std::vector<AuditRecord>> slots(fields.size());
  parallel_for(fields.size(), [&](std::size_t i) {
    const Field& f = fields[i];
    const Field gf = gamma(chain, f);
    for (double t : t_grid) {
      const Field lhs = gamma(chain, heat_apply(chain, f, t, opts));
      const Field pg = heat_apply(chain, gf, t, opts);
      const double decay = std::exp(-2.0 * kappa * t);
      for (std::size_t x = 0; x < n; ++x) {
        auto rec = make_record(TheoremTag::gamma_commutation, instance_label(i, t, x), lhs[x],
                               decay * pg[x]);
        if (!rec.pass) rec.witness = f;
        slots[i].push_back(std::move(rec));
      }
    }
  });
  std::vector<AuditRecord> out;
  for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(out));
  return out;
}

std::vector<AuditRecord> check_sqrt_commutation(const MarkovChain& chain, double kappa_e,
                                                const std::vector<Field>& fields,
                                                std::span<const double> t_grid,
                                                const HeatOptions& opts) {
  const std::size_t n = chain.size();
  for (const Field& f : fields) {
    if (f.size() != n) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
    for (double v : f) {
      if (!(v >= kPositivityFloor)) {
        throw Error(ErrorCode::non_positive_field, "sqrt commutation needs positive fields");
      }
    }
  }
  std::vector<std::vector<AuditRecord>> slots(fields.size());
  parallel_for(fields.size(), [&](std::size_t i) {
    const Field& f = fields[i];
    Field root(n);
    for (std::size_t x = 0; x < n; ++x) root[x] = std::sqrt(f[x]);
    const Field g_root = gamma(chain, root);
    const Field gf = gamma(chain, f);
    Field ratio(n);
    for (std::size_t x = 0; x < n; ++x) ratio[x] = gf[x] / f[x];
    for (double t : t_grid) {
      const Field pf = heat_apply(chain, f, t, opts);
      Field root_pf(n);
      for (std::size_t x = 0; x < n; ++x) root_pf[x] = std::sqrt(pf[x]);
      const Field lhs_sqrt = gamma(chain, root_pf);
      const Field lhs_ratio = gamma(chain, pf);
      const Field rhs_sqrt = heat_apply(chain, g_root, t, opts);
      const Field rhs_ratio = heat_apply(chain, ratio, t, opts);
      const double decay = std::exp(-2.0 * kappa_e * t);
      for (std::size_t x = 0; x < n; ++x) {
        auto a = make_record(TheoremTag::sqrt_commutation, instance_label(i, t, x), lhs_sqrt[x],
                             decay * rhs_sqrt[x]);
        auto b = make_record(TheoremTag::ratio_commutation, instance_label(i, t, x),
                             lhs_ratio[x] / pf[x], decay * rhs_ratio[x]);
        if (!a.pass) a.witness = f;
        if (!b.pass) b.witness = f;
        slots[i].push_back(std::move(a));
        slots[i].push_back(std::move(b));
      }
    }
  });
  std::vector<AuditRecord> out;
  for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(out));
  return out;
}

std::vector<AuditRecord> probe_classical_commutation(const MarkovChain& chain, double kappa,
                                                     const std::vector<Field>& fields,
                                                     std::span<const double> t_grid,
                                                     const HeatOptions& opts) {
  const std::size_t n = chain.size();
  std::vector<std::vector<AuditRecord>> slots(fields.size());
  parallel_for(fields.size(), [&](std::size_t i) {
    const Field& f = fields[i];
    Field root_gamma = gamma(chain, f);
    for (double& v : root_gamma) v = std::sqrt(v);
    for (double t : t_grid) {
      const Field lhs = gamma(chain, heat_apply(chain, f, t, opts));
      const Field rhs = heat_apply(chain, root_gamma, t, opts);
      const double decay = std::exp(-kappa * t);
      for (std::size_t x = 0; x < n; ++x) {
        auto rec = make_record(TheoremTag::classical_commutation, instance_label(i, t, x),
                               std::sqrt(lhs[x]), decay * rhs[x]);
        if (!rec.pass) rec.witness = f;
        slots[i].push_back(std::move(rec));
      }
    }
  });
  std::vector<AuditRecord> out;
  for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(out));
  return out;
}

}  // namespace curvgraph
