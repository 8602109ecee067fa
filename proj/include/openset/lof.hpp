#pragma once

#include <vector>

#include "openset/linalg.hpp"

namespace openset {

/// Local reachability density used when every neighbor sits at distance 0.
inline constexpr double kLofZeroReachEpsilon = 1e-12;

struct LofModel {
  Matrix points;                                // n x D training rows
  int k_neighbors = 0;
  Vector k_distance;                            // n
  std::vector<std::vector<int>> neighbors;      // n lists of exactly k indices
  Vector lrd;                                   // n local reachability densities

  int dim() const { return static_cast<int>(points.cols()); }
};

/// Exactly k nearest neighbors by Euclidean distance; ties are broken by
/// training-row index. A training row never lists itself, duplicates of it
/// are regular neighbors at distance 0.
LofModel lof_fit(const Matrix& X, int k);

/// Local outlier factor of a query point against the training rows.
double lof_factor(const LofModel& model, const VectorRef& x);

/// -lof_factor(x).
double lof_score(const LofModel& model, const VectorRef& x);

}  // namespace openset
