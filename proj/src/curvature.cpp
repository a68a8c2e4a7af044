#include "curvgraph/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "curvgraph/error.hpp"
#include "curvgraph/linprog.hpp"
#include "curvgraph/operators.hpp"
#include "curvgraph/parallel.hpp"
#include "curvgraph/random.hpp"
#include "curvgraph/semigroup.hpp"
#include "curvgraph/transport.hpp"
#include "detail.hpp"

namespace curvgraph {
namespace {

constexpr double kRankThreshold = 1e-10;

}  // namespace

detail::LocalCd detail::cd_at(const MarkovChain& chain, std::size_t x) {
  const LocalForms forms = local_forms(chain, x);
  const Eigen::MatrixXd& a = forms.gamma_form;
  const Eigen::MatrixXd& b = forms.gamma2_form;
  const Eigen::Index m = a.rows();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a);
  const Eigen::VectorXd evals = ea.eigenvalues();
  const double scale = std::max(evals.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  std::vector<Eigen::Index> range, null;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double rel = evals(i) / scale;
    if (rel > kRankThreshold) {
      range.push_back(i);
    } else if (rel < -kRankThreshold) {
      throw Error(ErrorCode::degenerate_form, "Gamma form is not positive semidefinite");
    } else {
      null.push_back(i);
    }
    if (std::abs(rel) > 1e-13 && std::abs(rel) < 1e-8) {
      throw Error(ErrorCode::degenerate_form, "Gamma form rank is numerically ambiguous");
    }
  }
  if (range.empty()) throw Error(ErrorCode::degenerate_form, "Gamma form vanishes");

  const auto r = static_cast<Eigen::Index>(range.size());
  const auto z = static_cast<Eigen::Index>(null.size());
  Eigen::MatrixXd ur(m, r), u0(m, z);
  Eigen::VectorXd lambda(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    ur.col(i) = ea.eigenvectors().col(range[static_cast<std::size_t>(i)]);
    lambda(i) = evals(range[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index i = 0; i < z; ++i) u0.col(i) = ea.eigenvectors().col(null[static_cast<std::size_t>(i)]);

  const double bscale = std::max(b.cwiseAbs().maxCoeff(), 1.0);
  Eigen::MatrixXd s = ur.transpose() * b * ur;
  Eigen::MatrixXd elim = Eigen::MatrixXd::Zero(z, r);  // b = elim * a on the null block
  LocalCd out;
  out.null_dim = static_cast<std::size_t>(z);
  if (z > 0) {
    const Eigen::MatrixXd b00 = u0.transpose() * b * u0;
    const Eigen::MatrixXd b0r = u0.transpose() * b * ur;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e0(b00);
    const double tol = kRankThreshold * bscale;
    if (e0.eigenvalues().minCoeff() < -tol) {
      // Gamma2 negative where Gamma vanishes: the ratio is unbounded below.
      out.value = -std::numeric_limits<double>::infinity();
      return out;
    }
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(z);
    for (Eigen::Index i = 0; i < z; ++i) {
      if (e0.eigenvalues()(i) > tol) inv(i) = 1.0 / e0.eigenvalues()(i);
    }
    const Eigen::MatrixXd pinv = e0.eigenvectors() * inv.asDiagonal() * e0.eigenvectors().transpose();
    const Eigen::MatrixXd residual = b0r - b00 * (pinv * b0r);
    if (residual.cwiseAbs().maxCoeff() > 1e-8 * bscale) {
      // Cross terms reach into the kernel of the null block: unbounded below.
      out.value = -std::numeric_limits<double>::infinity();
      return out;
    }
    elim = -pinv * b0r;
    s -= b0r.transpose() * pinv * b0r;
  }
  const Eigen::VectorXd inv_sqrt = lambda.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd scaled = inv_sqrt.asDiagonal() * s * inv_sqrt.asDiagonal();
  scaled = 0.5 * (scaled + scaled.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
  out.value = es.eigenvalues()(0);
  const Eigen::VectorXd coef = inv_sqrt.asDiagonal() * es.eigenvectors().col(0);
  Eigen::VectorXd local = ur * coef;
  if (z > 0) local += u0 * (elim * coef);
  out.witness = forms.embed(local, chain.size());
  return out;
}

namespace {

struct PairLp {
  double value = 0.0;
  Field witness;
};

PairLp coarse_pair(const MarkovChain& chain, const DistanceMatrix& d, std::size_t x,
                   std::size_t y) {
  const double dxy = d(x, y);
  if (!(dxy > 0.0)) throw Error(ErrorCode::invalid_argument, "distinct states at distance zero");
  // 1-Lipschitz functions on B1(x) u B1(y) extend to the whole space, and
  // the objective only reads those states.
  std::vector<std::size_t> s = ball(chain, x, 1);
  for (std::size_t v : ball(chain, y, 1)) {
    if (std::find(s.begin(), s.end(), v) == s.end()) s.push_back(v);
  }
  std::sort(s.begin(), s.end());
  const std::size_t k = s.size();
  auto pos = [&](std::size_t v) {
    return static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), v) - s.begin());
  };

  lp::Problem prob;
  prob.num_vars = k;
  prob.objective.assign(k, 0.0);
  prob.free_var.assign(k, true);
  // (Lf(y) - Lf(x)) / d(x,y)
  for (const Transition& t : chain.neighbors(y)) {
    prob.objective[pos(t.target)] += t.rate / dxy;
    prob.objective[pos(y)] -= t.rate / dxy;
  }
  for (const Transition& t : chain.neighbors(x)) {
    prob.objective[pos(t.target)] -= t.rate / dxy;
    prob.objective[pos(x)] += t.rate / dxy;
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double dij = d(s[i], s[j]);
      if (!std::isfinite(dij)) throw Error(ErrorCode::non_finite_distance, "infinite distance");
      prob.add_row({{{i, 1.0}, {j, -1.0}}, lp::Sense::le, dij});
    }
  }
  prob.add_row({{{pos(x), 1.0}, {pos(y), -1.0}}, lp::Sense::eq, dxy});
  prob.add_row({{{pos(y), 1.0}}, lp::Sense::eq, 0.0});
  const lp::Solution sol = lp::solve(prob);
  if (sol.status == lp::Status::infeasible) {
    throw Error(ErrorCode::lp_infeasible, "coarse Ricci LP infeasible");
  }
  if (sol.status != lp::Status::optimal) {
    throw Error(ErrorCode::lp_infeasible, "coarse Ricci LP did not reach optimality");
  }
  PairLp out;
  out.value = sol.objective;
  out.witness.assign(chain.size(), 0.0);
  for (std::size_t v = 0; v < chain.size(); ++v) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) best = std::min(best, sol.x[i] + d(s[i], v));
    out.witness[v] = best;
  }
  return out;
}

}  // namespace

const char* curvature_notion_name(CurvatureNotion notion) noexcept {
  switch (notion) {
    case CurvatureNotion::cd: return "CD";
    case CurvatureNotion::cde_prime: return "CDE_prime";
    case CurvatureNotion::coarse: return "coarse";
  }
  return "unknown";
}

CurvatureReport cd_curvature(const MarkovChain& chain) {
  const std::size_t n = chain.size();
  std::vector<detail::LocalCd> local(n);
  parallel_for(n, [&](std::size_t x) { local[x] = detail::cd_at(chain, x); });
  CurvatureReport rep;
  rep.notion = CurvatureNotion::cd;
  rep.label = "exact";
  rep.global_value = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  std::size_t max_null = 0;
  for (std::size_t x = 0; x < n; ++x) {
    rep.per_locus.push_back({{x}, local[x].value});
    max_null = std::max(max_null, local[x].null_dim);
    if (local[x].value < rep.global_value) {
      rep.global_value = local[x].value;
      arg = x;
    }
  }
  rep.witness = local[arg].witness;
  rep.witness_locus = {arg};
  rep.meta["rank_threshold"] = kRankThreshold;
  rep.meta["max_null_dimension"] = static_cast<double>(max_null);
  return rep;
}

CurvatureReport coarse_ricci(const MarkovChain& chain, const DistanceMatrix& d, PairSet pairs) {
  const std::size_t n = chain.size();
  std::vector<std::pair<std::size_t, std::size_t>> list;
  for (std::size_t x = 0; x < n; ++x) {
    if (pairs == PairSet::all) {
      for (std::size_t y = x + 1; y < n; ++y) list.push_back({x, y});
    } else {
      for (const Transition& t : chain.neighbors(x)) {
        if (t.target > x) list.push_back({x, t.target});
      }
    }
  }
  CurvatureReport rep = coarse_ricci(chain, d, list);
  if (pairs == PairSet::edges_only) rep.label = "edge-restricted";
  return rep;
}

CurvatureReport coarse_ricci(const MarkovChain& chain, const DistanceMatrix& d,
                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  if (d.size() != chain.size()) throw Error(ErrorCode::dimension_mismatch, "distance size mismatch");
  if (pairs.empty()) throw Error(ErrorCode::invalid_argument, "no pairs to evaluate");
  for (const auto& [x, y] : pairs) {
    if (x >= chain.size() || y >= chain.size() || x == y) {
      throw Error(ErrorCode::invalid_argument, "pairs must be distinct states");
    }
  }
  for (double v : d.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite_distance, "infinite distance");
  }
  std::vector<PairLp> results(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    results[i] = coarse_pair(chain, d, pairs[i].first, pairs[i].second);
  });
  CurvatureReport rep;
  rep.notion = CurvatureNotion::coarse;
  rep.label = "exact";
  rep.global_value = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    rep.per_locus.push_back({{pairs[i].first, pairs[i].second}, results[i].value});
    if (results[i].value < rep.global_value) {
      rep.global_value = results[i].value;
      arg = i;
    }
  }
  rep.witness = results[arg].witness;
  rep.witness_locus = {pairs[arg].first, pairs[arg].second};
  rep.meta["pairs"] = static_cast<double>(pairs.size());
  return rep;
}

double coarse_ricci_secant(const MarkovChain& chain, const DistanceMatrix& d, std::size_t x,
                           std::size_t y, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::invalid_argument, "t must lie in (0, 1]");
  const std::size_t n = chain.size();
  Field mx(n, 0.0), my(n, 0.0);
  mx[x] = 1.0 - t + t * chain.holding(x);
  my[y] = 1.0 - t + t * chain.holding(y);
  for (const Transition& e : chain.neighbors(x)) mx[e.target] += t * e.rate;
  for (const Transition& e : chain.neighbors(y)) my[e.target] += t * e.rate;
  const double w = wasserstein_p(mx, my, d, 1.0).value;
  return (1.0 - w / d(x, y)) / t;
}

std::vector<AuditRecord> contraction_check(const MarkovChain& chain, const DistanceMatrix& d,
                                           double kappa_c, std::span<const double> t_grid,
                                           std::size_t trials, std::uint64_t seed) {
  const std::size_t n = chain.size();
  std::vector<std::vector<AuditRecord>> slots(trials);
  parallel_for(trials, [&](std::size_t i) {
    auto rng = make_stream(seed, 0xC0A75E, i);
    const Field mu = random_probability(n, rng);
    const Field nu = random_probability(n, rng);
    const double w0 = wasserstein_p(mu, nu, d, 1.0).value;
    for (double t : t_grid) {
      Field pm = heat_adjoint(chain, mu, t);
      Field pn = heat_adjoint(chain, nu, t);
      const double wt = wasserstein_p(pm, pn, d, 1.0).value;
      std::ostringstream os;
      os << "pair=" << i << " t=" << t;
      auto rec = make_record(TheoremTag::coarse_contraction, os.str(), wt,
                             std::exp(-kappa_c * t) * w0, 1e-8);
      if (!rec.pass) {
        rec.witness = mu;
        rec.witness.insert(rec.witness.end(), nu.begin(), nu.end());
      }
      slots[i].push_back(std::move(rec));
    }
  });
  std::vector<AuditRecord> out;
  for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(out));
  return out;
}

}  // namespace curvgraph
