#include "curvgraph/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curvgraph/error.hpp"

namespace curvgraph {

const char* distance_kind_name(DistanceKind kind) noexcept {
  switch (kind) {
    case DistanceKind::graph: return "graph";
    case DistanceKind::gamma: return "gamma";
    case DistanceKind::custom: return "custom";
  }
  return "custom";
}

DistanceMatrix::DistanceMatrix(std::size_t n, DistanceKind kind)
    : n_(n), d_(n * n, 0.0), kind_(kind) {}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> values, DistanceKind kind,
                               double tol)
    : n_(n), d_(std::move(values)), kind_(kind) {
  if (d_.size() != n * n) {
    throw Error(ErrorCode::dimension_mismatch, "distance matrix needs n*n entries");
  }
  validate(tol);
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  d_[i * n_ + j] = value;
  d_[j * n_ + i] = value;
}

void DistanceMatrix::validate(double tol) const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::non_finite_distance,
                    "distance (" + std::to_string(i) + "," + std::to_string(j) + ") is not finite");
      }
      if (v < 0.0) throw Error(ErrorCode::invalid_argument, "negative distance");
      if (i == j && v != 0.0) throw Error(ErrorCode::invalid_argument, "nonzero diagonal distance");
      if (std::abs(v - (*this)(j, i)) > tol) {
        throw Error(ErrorCode::invalid_argument, "distance matrix is not symmetric");
      }
    }
  }
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if ((*this)(i, j) > (*this)(i, k) + (*this)(k, j) + tol) {
          throw Error(ErrorCode::invalid_argument, "triangle inequality fails");
        }
      }
    }
  }
}

double DistanceMatrix::diameter() const {
  return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end());
}

}  // namespace curvgraph
