#include "curvgraph/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "curvgraph/error.hpp"
#include "curvgraph/linprog.hpp"

namespace curvgraph {
namespace {

constexpr double kMassTol = 1e-9;

void require_probability(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::invalid_argument, std::string(what) + " has a negative entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTol) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " does not sum to one");
  }
}

std::vector<std::size_t> support_of(std::span<const double> p) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s.push_back(i);
  }
  return s;
}

}  // namespace

const char* plan_kind_name(TransportPlan::Kind kind) noexcept {
  return kind == TransportPlan::Kind::coupling ? "coupling" : "kernel_family";
}

LinearTransport solve_transport(std::span<const double> mu, std::span<const double> nu,
                                std::span<const double> cost) {
  const std::size_t n = mu.size();
  if (nu.size() != n || cost.size() != n * n) {
    throw Error(ErrorCode::dimension_mismatch, "transport inputs disagree in size");
  }
  const auto sx = support_of(mu);
  const auto sy = support_of(nu);
  if (sx.empty() || sy.empty()) throw Error(ErrorCode::invalid_argument, "empty marginal");
  const std::size_t a = sx.size();
  const std::size_t b = sy.size();

  lp::Problem prob;
  prob.num_vars = a * b;
  prob.objective.resize(a * b);
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) prob.objective[i * b + j] = cost[sx[i] * n + sy[j]];
  }
  for (std::size_t i = 0; i < a; ++i) {
    lp::Row row{{}, lp::Sense::eq, mu[sx[i]]};
    for (std::size_t j = 0; j < b; ++j) row.terms.push_back({i * b + j, 1.0});
    prob.add_row(std::move(row));
  }
  // The last column constraint is implied by the others.
  for (std::size_t j = 0; j + 1 < b; ++j) {
    lp::Row row{{}, lp::Sense::eq, nu[sy[j]]};
    for (std::size_t i = 0; i < a; ++i) row.terms.push_back({i * b + j, 1.0});
    prob.add_row(std::move(row));
  }
  const lp::Solution sol = lp::solve(prob);
  if (sol.status == lp::Status::infeasible) {
    throw Error(ErrorCode::lp_infeasible, "transport LP infeasible");
  }
  if (sol.status != lp::Status::optimal) {
    throw Error(ErrorCode::lp_infeasible, "transport LP did not reach optimality");
  }

  LinearTransport out;
  out.plan.kind = TransportPlan::Kind::coupling;
  out.plan.n = n;
  out.plan.weights.assign(n * n, 0.0);
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) out.plan.weights[sx[i] * n + sy[j]] = sol.x[i * b + j];
  }
  out.value = sol.objective;
  out.plan.value = sol.objective;

  constexpr double inf = std::numeric_limits<double>::infinity();
  out.row_potential.assign(n, inf);
  out.col_potential.assign(n, inf);
  for (std::size_t i = 0; i < a; ++i) out.row_potential[sx[i]] = sol.duals[i];
  for (std::size_t j = 0; j < b; ++j) {
    out.col_potential[sy[j]] = (j + 1 < b) ? sol.duals[a + j] : 0.0;
  }
  // c-transforms extend the potentials off the supports while keeping
  // phi(x) + psi(y) <= cost(x,y) everywhere.
  for (std::size_t x = 0; x < n; ++x) {
    if (mu[x] > 0.0) continue;
    double best = inf;
    for (std::size_t y : sy) best = std::min(best, cost[x * n + y] - out.col_potential[y]);
    out.row_potential[x] = best;
  }
  for (std::size_t y = 0; y < n; ++y) {
    if (nu[y] > 0.0) continue;
    double best = inf;
    for (std::size_t x = 0; x < n; ++x) best = std::min(best, cost[x * n + y] - out.row_potential[x]);
    out.col_potential[y] = best;
  }
  return out;
}

WassersteinResult wasserstein_p(std::span<const double> mu, std::span<const double> nu,
                                const DistanceMatrix& d, double p, W1Method method) {
  const std::size_t n = d.size();
  if (mu.size() != n || nu.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "measures and distance disagree in size");
  }
  if (!(p >= 1.0)) throw Error(ErrorCode::invalid_argument, "p must be at least 1");
  require_probability(mu, "mu");
  require_probability(nu, "nu");
  WassersteinResult out;

  if (method == W1Method::potentials) {
    if (p != 1.0) throw Error(ErrorCode::invalid_argument, "potentials formulation needs p = 1");
    // max sum f (mu - nu)  s.t.  f(x) - f(y) <= d(x,y)
    lp::Problem prob;
    prob.num_vars = n;
    prob.objective.resize(n);
    prob.free_var.assign(n, true);
    for (std::size_t x = 0; x < n; ++x) prob.objective[x] = -(mu[x] - nu[x]);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (x == y) continue;
        prob.add_row({{{x, 1.0}, {y, -1.0}}, lp::Sense::le, d(x, y)});
      }
    }
    // Pin the additive constant.
    prob.add_row({{{0, 1.0}}, lp::Sense::eq, 0.0});
    const lp::Solution sol = lp::solve(prob);
    if (sol.status != lp::Status::optimal) {
      throw Error(ErrorCode::lp_infeasible, "potential LP did not reach optimality");
    }
    out.value = std::max(0.0, -sol.objective);
    out.potential = sol.x;
    out.plan.kind = TransportPlan::Kind::coupling;
    out.plan.n = n;
    out.plan.value = out.value;
    return out;
  }

  std::vector<double> cost(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) cost[x * n + y] = std::pow(d(x, y), p);
  }
  LinearTransport lt = solve_transport(mu, nu, cost);
  const double raw = std::max(0.0, lt.value);
  out.value = p == 1.0 ? raw : std::pow(raw, 1.0 / p);
  out.plan = std::move(lt.plan);
  out.plan.value = out.value;
  if (p == 1.0) {
    // f(x) = min_y d(x,y) - psi(y) over supp(nu) is 1-Lipschitz, dominates
    // phi on supp(mu) and sits below -psi on supp(nu).
    const auto sy = support_of(nu);
    out.potential.assign(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t y : sy) best = std::min(best, d(x, y) - lt.col_potential[y]);
      out.potential[x] = best;
    }
  }
  return out;
}

Field tilde_gradient(std::span<const double> g, const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (g.size() != n) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
  Field out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double best = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      const double drop = g[x] - g[y];
      if (drop > 0.0) best = std::max(best, drop / d(x, y));
    }
    out[x] = best;
  }
  return out;
}

InfConvolutionPoint inf_convolution_at(std::span<const double> g, const DistanceMatrix& d,
                                       double t, std::size_t x) {
  const std::size_t n = d.size();
  if (g.size() != n) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "t must be positive");

  // Only (int d dp, int g dp) matters, so the optimum lives on the lower
  // convex envelope of the points (d(x,y), g(y)).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = d(x, a), db = d(x, b);
    if (da != db) return da < db;
    if (g[a] != g[b]) return g[a] < g[b];
    return a < b;
  });
  std::vector<std::size_t> hull;
  for (std::size_t y : order) {
    if (!hull.empty() && d(x, hull.back()) == d(x, y)) continue;  // higher g at same distance
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      const double cross = (d(x, b) - d(x, a)) * (g[y] - g[a]) - (g[b] - g[a]) * (d(x, y) - d(x, a));
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(y);
  }

  InfConvolutionPoint best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t lo, std::size_t hi, double w) {
    const double m = (1.0 - w) * d(x, lo) + w * d(x, hi);
    const double v = (1.0 - w) * g[lo] + w * g[hi] + m * m / t;
    if (v < best.value) {
      best.value = v;
      best.mean_distance = m;
      best.lo = lo;
      best.hi = hi;
      best.weight_hi = w;
    }
  };
  consider(hull[0], hull[0], 0.0);
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const std::size_t lo = hull[k], hi = hull[k + 1];
    const double m0 = d(x, lo), m1 = d(x, hi);
    const double slope = (g[hi] - g[lo]) / (m1 - m0);
    const double m_star = std::clamp(-slope * t / 2.0, m0, m1);
    consider(lo, hi, (m_star - m0) / (m1 - m0));
    consider(hi, hi, 0.0);
  }
  return best;
}

Field inf_convolution(std::span<const double> g, const DistanceMatrix& d, double t) {
  Field out(d.size());
  for (std::size_t x = 0; x < d.size(); ++x) out[x] = inf_convolution_at(g, d, t, x).value;
  return out;
}

std::vector<AuditRecord> hj_check(std::span<const double> g, const DistanceMatrix& d,
                                  std::span<const double> t_grid) {
  if (t_grid.size() < 3) throw Error(ErrorCode::invalid_argument, "t_grid needs three points");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1]))) {
      throw Error(ErrorCode::invalid_argument, "t_grid must be positive and increasing");
    }
  }
  const std::size_t n = d.size();
  std::vector<Field> q;
  q.reserve(t_grid.size());
  for (double t : t_grid) q.push_back(inf_convolution(g, d, t));

  std::vector<AuditRecord> out;
  const Field gfield(g.begin(), g.end());
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const double s = t_grid[k], t = t_grid[k + 1];
    const Field mid = inf_convolution(g, d, 0.5 * (s + t));
    for (std::size_t x = 0; x < n; ++x) {
      std::ostringstream os;
      os << "s=" << s << " t=" << t << " x=" << x;
      auto rec = make_record(TheoremTag::inf_convolution_convexity, os.str(), mid[x],
                             0.5 * (q[k][x] + q[k + 1][x]), 1e-10);
      if (!rec.pass) rec.witness = gfield;
      out.push_back(std::move(rec));
    }
  }
  // Convexity puts the difference quotient below the left derivative at the
  // later time, where the Hamilton-Jacobi inequality applies.
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const double h = t_grid[k + 1] - t_grid[k];
    const Field grad = tilde_gradient(q[k + 1], d);
    for (std::size_t x = 0; x < n; ++x) {
      std::ostringstream os;
      os << "t=" << t_grid[k] << " h=" << h << " x=" << x;
      const double lhs = (q[k + 1][x] - q[k][x]) / h + 0.25 * grad[x] * grad[x];
      auto rec = make_record(TheoremTag::hamilton_jacobi, os.str(), lhs, 0.0);
      if (!rec.pass) rec.witness = gfield;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace curvgraph
