#include "curvgraph/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvgraph/error.hpp"

namespace curvgraph::lp {
namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, cols_); }
  double rhs(std::size_t i) const { return at(i, cols_); }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t r, std::size_t c, std::vector<double>& reduced, double& objective) {
    double* prow = &data_[r * (cols_ + 1)];
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j <= cols_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &data_[i * (cols_ + 1)];
      const double factor = row[c];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) row[j] -= factor * prow[j];
      row[c] = 0.0;
    }
    const double factor = reduced[c];
    if (factor != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) reduced[j] -= factor * prow[j];
      objective -= factor * prow[cols_];
      reduced[c] = 0.0;
    }
    basis_[r] = c;
  }

 private:
  std::size_t m_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { optimal, unbounded, iteration_limit };

// Minimizes with the given reduced-cost row; `allowed[j]` gates entering
// columns. `objective` holds -c_B^T x_B.
PhaseResult run_phase(Tableau& t, std::vector<double>& reduced, double& objective,
                      const std::vector<bool>& allowed, const Options& opt,
                      std::size_t& iterations) {
  std::size_t streak = 0;
  for (;;) {
    if (iterations >= opt.max_iterations) return PhaseResult::iteration_limit;
    const bool bland = streak >= opt.degenerate_streak;
    std::size_t enter = t.cols();
    double best = -opt.optimality_tol;
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (!allowed[j]) continue;
      if (reduced[j] < best) {
        enter = j;
        if (bland) break;
        best = reduced[j];
      }
    }
    if (enter == t.cols()) return PhaseResult::optimal;

    std::size_t leave = t.rows();
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, enter);
      if (a <= opt.pivot_tol) continue;
      const double r = std::max(t.rhs(i), 0.0) / a;
      if (leave == t.rows()) {
        ratio = r;
        leave = i;
        continue;
      }
      const double slop = 1e-12 * std::max(1.0, ratio);
      if (r < ratio - slop || (r <= ratio + slop && t.basis()[i] < t.basis()[leave])) {
        ratio = std::min(ratio, r);
        leave = i;
      }
    }
    if (leave == t.rows()) return PhaseResult::unbounded;
    streak = (ratio <= 1e-14) ? streak + 1 : 0;
    t.pivot(leave, enter, reduced, objective);
    ++iterations;
  }
}

}  // namespace

Solution solve(const Problem& problem, const Options& opt) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.rows.size();
  if (problem.objective.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "objective length differs from num_vars");
  }
  const bool any_free = !problem.free_var.empty();
  if (any_free && problem.free_var.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "free_var length differs from num_vars");
  }

  // Column layout: structural (with a negative copy for free variables),
  // one slack per inequality row, one artificial per row.
  std::vector<std::size_t> neg_col(n, static_cast<std::size_t>(-1));
  std::size_t cols = n;
  for (std::size_t j = 0; j < n; ++j) {
    if (any_free && problem.free_var[j]) neg_col[j] = cols++;
  }
  std::vector<std::size_t> slack_col(m, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < m; ++i) {
    if (problem.rows[i].sense != Sense::eq) slack_col[i] = cols++;
  }
  const std::size_t first_artificial = cols;
  cols += m;

  Tableau t(m, cols);
  std::vector<double> sign(m, 1.0);
  std::vector<std::size_t> identity_col(m);
  std::vector<bool> is_artificial_basis(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const Row& row = problem.rows[i];
    if (!std::isfinite(row.rhs)) throw Error(ErrorCode::invalid_argument, "non-finite rhs");
    sign[i] = row.rhs < 0.0 ? -1.0 : 1.0;
    for (const auto& [j, a] : row.terms) {
      if (j >= n) throw Error(ErrorCode::invalid_argument, "LP term index out of range");
      t.at(i, j) += sign[i] * a;
      if (neg_col[j] != static_cast<std::size_t>(-1)) t.at(i, neg_col[j]) -= sign[i] * a;
    }
    t.rhs(i) = sign[i] * row.rhs;
    Sense sense = row.sense;
    if (sign[i] < 0.0 && sense != Sense::eq) sense = sense == Sense::le ? Sense::ge : Sense::le;
    if (slack_col[i] != static_cast<std::size_t>(-1)) {
      // Slack enters the original row with +1 for <=, -1 for >=.
      const double s = (row.sense == Sense::le ? 1.0 : -1.0) * sign[i];
      t.at(i, slack_col[i]) = s;
    }
    t.at(i, first_artificial + i) = 1.0;
    if (sense == Sense::le) {
      identity_col[i] = slack_col[i];
      t.basis()[i] = slack_col[i];
    } else {
      identity_col[i] = first_artificial + i;
      t.basis()[i] = first_artificial + i;
      is_artificial_basis[i] = true;
    }
  }

  Solution sol;
  std::size_t iterations = 0;

  // Phase 1: minimize the sum of the basic artificials.
  std::vector<double> reduced(cols, 0.0);
  const bool need_phase1 =
      std::find(is_artificial_basis.begin(), is_artificial_basis.end(), true) !=
      is_artificial_basis.end();
  if (need_phase1) {
    double phase_obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial_basis[i]) continue;
      reduced[first_artificial + i] += 1.0;
      for (std::size_t j = 0; j < cols; ++j) reduced[j] -= t.at(i, j);
      phase_obj -= t.rhs(i);
    }
    std::vector<bool> allowed(cols, true);
    for (std::size_t j = first_artificial; j < cols; ++j) allowed[j] = false;
    const auto res = run_phase(t, reduced, phase_obj, allowed, opt, iterations);
    if (res != PhaseResult::optimal) {
      // Phase 1 is bounded below by zero, so anything else is numerical trouble.
      sol.status = Status::iteration_limit;
      sol.iterations = iterations;
      return sol;
    }
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] >= first_artificial) infeasibility += std::max(t.rhs(i), 0.0);
    }
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(problem.rows[i].rhs));
    if (infeasibility > opt.feasibility_tol * scale) {
      sol.status = Status::infeasible;
      sol.iterations = iterations;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    std::vector<double> dummy(cols, 0.0);
    double dummy_obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] < first_artificial) continue;
      std::size_t best = cols;
      double mag = opt.pivot_tol * 1e3;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (std::abs(t.at(i, j)) > mag) {
          mag = std::abs(t.at(i, j));
          best = j;
        }
      }
      if (best < cols) {
        t.pivot(i, best, dummy, dummy_obj);
        ++iterations;
      }
    }
  }

  // Phase 2.
  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = problem.objective[j];
    if (neg_col[j] != static_cast<std::size_t>(-1)) cost[neg_col[j]] = -problem.objective[j];
  }
  std::fill(reduced.begin(), reduced.end(), 0.0);
  for (std::size_t j = 0; j < cols; ++j) reduced[j] = cost[j];
  double obj_row = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double cb = cost[t.basis()[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < cols; ++j) reduced[j] -= cb * t.at(i, j);
    obj_row -= cb * t.rhs(i);
  }
  std::vector<bool> allowed(cols, true);
  for (std::size_t j = first_artificial; j < cols; ++j) allowed[j] = false;
  const auto res = run_phase(t, reduced, obj_row, allowed, opt, iterations);
  sol.iterations = iterations;
  if (res == PhaseResult::iteration_limit) {
    sol.status = Status::iteration_limit;
    return sol;
  }
  if (res == PhaseResult::unbounded) {
    sol.status = Status::unbounded;
    return sol;
  }

  std::vector<double> values(cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) values[t.basis()[i]] = std::max(t.rhs(i), 0.0);
  sol.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    sol.x[j] = values[j];
    if (neg_col[j] != static_cast<std::size_t>(-1)) sol.x[j] -= values[neg_col[j]];
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += problem.objective[j] * sol.x[j];
  sol.duals.assign(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    double y = 0.0;
    for (std::size_t i = 0; i < m; ++i) y += cost[t.basis()[i]] * t.at(i, identity_col[r]);
    sol.duals[r] = sign[r] * y;
  }
  sol.status = Status::optimal;
  return sol;
}

}  // namespace curvgraph::lp
