#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "curvgraph/curvature.hpp"
#include "curvgraph/error.hpp"
#include "curvgraph/operators.hpp"
#include "curvgraph/parallel.hpp"
#include "curvgraph/random.hpp"
#include "detail.hpp"

namespace curvgraph {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Evaluates the CDE' ratio at x as a function of u = log f on the 2-ball.
class LocalRatio {
 public:
  LocalRatio(const MarkovChain& chain, std::size_t x)
      : chain_(chain), x_(x), support_(ball(chain, x, 2)), field_(chain.size(), 1.0) {}

  std::size_t dim() const { return support_.size(); }
  const std::vector<std::size_t>& support() const { return support_; }

  double operator()(const Eigen::VectorXd& u) {
    ++evaluations_;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      field_[support_[i]] = std::exp(u(static_cast<Eigen::Index>(i)));
    }
    return ratio(field_);
  }

  double ratio(std::span<const double> f) const {
    const double g = gamma_at(chain_, f, f, x_);
    if (!(g > 0.0) || !std::isfinite(g)) return kNaN;
    for (std::size_t v : support_) {
      if (!(f[v] >= kPositivityFloor) || !std::isfinite(f[v])) return kNaN;
    }
    return gamma2_tilde_at(chain_, f, x_) / g;
  }

  Field field(const Eigen::VectorXd& u) const {
    Field f(chain_.size(), 1.0);
    for (std::size_t i = 0; i < support_.size(); ++i) f[support_[i]] = std::exp(u(static_cast<Eigen::Index>(i)));
    return f;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const MarkovChain& chain_;
  std::size_t x_;
  std::vector<std::size_t> support_;
  Field field_;
  std::size_t evaluations_ = 0;
};

struct Descent {
  double value = kNaN;
  Eigen::VectorXd u;
  bool converged = false;
};

Eigen::VectorXd numeric_gradient(LocalRatio& r, const Eigen::VectorXd& u, double fu, bool& ok) {
  const Eigen::Index m = u.size();
  Eigen::VectorXd g(m);
  ok = true;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(u(i)));
    Eigen::VectorXd up = u, dn = u;
    up(i) += h;
    dn(i) -= h;
    const double a = r(up), b = r(dn);
    if (std::isnan(a) || std::isnan(b)) {
      ok = false;
      g(i) = 0.0;
      continue;
    }
    g(i) = (a - b) / (2.0 * h);
  }
  (void)fu;
  return g;
}

// BFGS on u = log f with backtracking; the ratio is invariant under u + c.
Descent descend(LocalRatio& r, Eigen::VectorXd u, std::size_t max_iterations) {
  Descent out;
  double fu = r(u);
  if (std::isnan(fu)) return out;
  out.value = fu;
  out.u = u;
  const Eigen::Index m = u.size();
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(m, m);
  bool ok = true;
  Eigen::VectorXd grad = numeric_gradient(r, u, fu, ok);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    if (grad.norm() <= 1e-10) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd dir = -h_inv * grad;
    if (dir.dot(grad) >= 0.0) {
      h_inv.setIdentity();
      dir = -grad;
    }
    double step = 1.0;
    bool moved = false;
    Eigen::VectorXd next;
    double fnext = kNaN;
    for (int ls = 0; ls < 50; ++ls) {
      next = u + step * dir;
      fnext = r(next);
      if (!std::isnan(fnext) && fnext <= fu + 1e-4 * step * grad.dot(dir)) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      out.converged = true;
      break;
    }
    bool gok = true;
    const Eigen::VectorXd gnext = numeric_gradient(r, next, fnext, gok);
    const Eigen::VectorXd s = next - u;
    const Eigen::VectorXd y = gnext - grad;
    const double sy = s.dot(y);
    if (sy > 1e-16) {
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
      const Eigen::MatrixXd left = eye - s * y.transpose() / sy;
      h_inv = left * h_inv * left.transpose() + s * s.transpose() / sy;
    }
    u = next;
    // Keep the iterate centred; the ratio does not see constant shifts.
    u.array() -= u.mean();
    fu = r(u);
    grad = gok ? gnext : numeric_gradient(r, u, fu, gok);
    if (std::isnan(fu)) break;
    if (fu < out.value) {
      out.value = fu;
      out.u = u;
    }
    if (std::abs(s.norm()) < 1e-14) {
      out.converged = true;
      break;
    }
  }
  return out;
}

struct LocalCde {
  double value = std::numeric_limits<double>::infinity();
  Field witness;
  std::size_t dropped = 0;
  std::size_t starts = 0;
  std::size_t evaluations = 0;
};

LocalCde cde_at(const MarkovChain& chain, std::size_t x, const CdeOptions& opts,
                const Field& cd_witness) {
  LocalRatio r(chain, x);
  const std::size_t m = r.dim();
  LocalCde out;
  auto consider = [&](const Eigen::VectorXd& u0) {
    ++out.starts;
    // The start itself is an honest evaluation.
    const double v0 = r(u0);
    if (!std::isnan(v0) && v0 < out.value) {
      out.value = v0;
      out.witness = r.field(u0);
    }
    Descent d = descend(r, u0, opts.max_iterations);
    if (std::isnan(d.value)) {
      ++out.dropped;
      return;
    }
    if (d.value < out.value) {
      out.value = d.value;
      out.witness = r.field(d.u);
    }
  };

  // Near-constant starts 1 + s w along the CD witness: the CDE' ratio tends
  // to the CD ratio as s -> 0.
  double wmax = 0.0;
  for (std::size_t v : r.support()) wmax = std::max(wmax, std::abs(cd_witness[v]));
  if (wmax > 0.0) {
    for (double s = 1e-1; s >= 1e-7; s *= 0.1) {
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd u(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
          u(static_cast<Eigen::Index>(i)) = std::log1p(sign * s * cd_witness[r.support()[i]] / wmax);
        }
        consider(u);
      }
    }
  }
  // Shifted coordinate indicators 1 + c e_i.
  for (std::size_t i = 0; i < m; ++i) {
    for (double c : {1.0, 10.0}) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      u(static_cast<Eigen::Index>(i)) = std::log1p(c);
      consider(u);
    }
  }
  for (std::size_t k = 0; k < opts.starts; ++k) {
    auto rng = make_stream(opts.seed, x, k);
    const Field f = random_positive_field(m, rng, 2.0);
    Eigen::VectorXd u(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) u(static_cast<Eigen::Index>(i)) = std::log(f[i]);
    consider(u);
  }
  out.evaluations = r.evaluations();
  return out;
}

}  // namespace

double cde_ratio(const MarkovChain& chain, std::span<const double> f, std::size_t x) {
  if (f.size() != chain.size()) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
  const double g = gamma_at(chain, f, f, x);
  const double t = gamma2_tilde_at(chain, f, x);
  if (!(g > 0.0)) return kNaN;
  return t / g;
}

CurvatureReport cde_curvature_upper(const MarkovChain& chain, const CdeOptions& opts) {
  if (opts.starts < 1) throw Error(ErrorCode::invalid_argument, "need at least one start");
  const std::size_t n = chain.size();
  std::vector<LocalCde> local(n);
  parallel_for(n, [&](std::size_t x) {
    const detail::LocalCd cd = detail::cd_at(chain, x);
    local[x] = cde_at(chain, x, opts, cd.witness.empty() ? Field(n, 0.0) : cd.witness);
  });

  CurvatureReport rep;
  rep.notion = CurvatureNotion::cde_prime;
  rep.label = "upper_bound";
  rep.global_value = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  std::size_t dropped = 0, starts = 0, evaluations = 0;
  for (std::size_t x = 0; x < n; ++x) {
    rep.per_locus.push_back({{x}, local[x].value});
    dropped += local[x].dropped;
    starts += local[x].starts;
    evaluations += local[x].evaluations;
    if (local[x].value < rep.global_value) {
      rep.global_value = local[x].value;
      arg = x;
    }
  }
  rep.witness = local[arg].witness;
  rep.witness_locus = {arg};
  rep.meta["random_starts"] = static_cast<double>(opts.starts);
  rep.meta["total_starts"] = static_cast<double>(starts);
  rep.meta["dropped_starts"] = static_cast<double>(dropped);
  rep.meta["evaluations"] = static_cast<double>(evaluations);
  rep.meta["seed"] = static_cast<double>(opts.seed);
  return rep;
}

CurvatureReport cde_curvature_upper(const MarkovChain& chain, std::size_t starts,
                                    std::uint64_t seed) {
  CdeOptions opts;
  opts.starts = starts;
  opts.seed = seed;
  return cde_curvature_upper(chain, opts);
}

std::vector<AuditRecord> cde_verify(const MarkovChain& chain, double kappa_e, std::size_t trials,
                                    std::uint64_t seed, CdeVariant variant) {
  if (!(kappa_e > 0.0)) throw Error(ErrorCode::invalid_argument, "kappa_e must be positive");
  const std::size_t n = chain.size();
  std::vector<AuditRecord> out(trials);
  parallel_for(trials, [&](std::size_t i) {
    auto rng = make_stream(seed, 0xCDE, i);
    // Alternate narrow and wide log ranges.
    const double log_range = (i % 3 == 0) ? 0.5 : (i % 3 == 1 ? 2.0 : 5.0);
    const Field f = random_positive_field(n, rng, log_range);
    const Field g = gamma(chain, f);
    const Field t = gamma2_tilde(chain, f);
    const Field lf = variant == CdeVariant::negative_generator_only ? generator_apply(chain, f)
                                                                    : Field{};
    double worst = std::numeric_limits<double>::infinity();
    std::size_t at = n;
    for (std::size_t x = 0; x < n; ++x) {
      if (variant == CdeVariant::negative_generator_only && !(lf[x] < 0.0)) continue;
      const double slack = t[x] - kappa_e * g[x];
      if (slack < worst) {
        worst = slack;
        at = x;
      }
    }
    std::ostringstream os;
    os << "trial=" << i;
    if (at == n) {
      out[i] = make_record(TheoremTag::cde_condition, os.str() + " no qualifying state", 0.0, 0.0);
      return;
    }
    os << " x=" << at;
    out[i] = make_record(TheoremTag::cde_condition, os.str(), kappa_e * g[at], t[at]);
    if (!out[i].pass) out[i].witness = f;
  });
  return out;
}

}  // namespace curvgraph
