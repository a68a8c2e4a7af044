#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace curvgraph {

// A real value per state, aligned with the chain's state order.
using Field = std::vector<double>;

enum class DistanceKind { graph, gamma, custom };

const char* distance_kind_name(DistanceKind kind) noexcept;

// Dense symmetric distance matrix over the states of a chain.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, DistanceKind kind);
  // Row-major n*n values. Validated with `tol` (symmetry, zero diagonal,
  // nonnegativity, triangle inequality, finiteness).
  DistanceMatrix(std::size_t n, std::vector<double> values, DistanceKind kind,
                 double tol = 1e-9);

  std::size_t size() const noexcept { return n_; }
  DistanceKind kind() const noexcept { return kind_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {d_.data() + i * n_, n_};
  }
  std::span<const double> values() const noexcept { return d_; }

  // Sets d(i,j) and d(j,i).
  void set(std::size_t i, std::size_t j, double value);

  // Throws Error(non_finite_distance) or Error(invalid_argument).
  void validate(double tol = 1e-9) const;

  double diameter() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
  DistanceKind kind_ = DistanceKind::custom;
};

}  // namespace curvgraph
