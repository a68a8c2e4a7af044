#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace curvgraph::lp {

enum class Sense { le, eq, ge };

struct Row {
  std::vector<std::pair<std::size_t, double>> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

// minimize c^T x  subject to rows, x_j >= 0 unless free_var[j].
struct Problem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<bool> free_var;  // empty means all nonnegative
  std::vector<Row> rows;

  std::size_t add_row(Row row) {
    rows.push_back(std::move(row));
    return rows.size() - 1;
  }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
  Status status = Status::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  // One multiplier per row with c^T x* = b^T y*. Redundant rows get 0.
  std::vector<double> duals;
  std::size_t iterations = 0;
};

struct Options {
  double pivot_tol = 1e-11;
  double optimality_tol = 1e-11;
  double feasibility_tol = 1e-9;
  std::size_t max_iterations = 200000;
  // Dantzig pricing falls back to Bland's rule after this many consecutive
  // degenerate pivots.
  std::size_t degenerate_streak = 50;
};

// Dense two-phase primal simplex on a full tableau.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace curvgraph::lp
