#pragma once

#include "openset/linalg.hpp"

namespace openset {

struct PcaModel {
  Vector mean;          // D
  Matrix components;    // m x D, orthonormal rows, descending singular value
  Vector singular_values;

  int num_components() const { return static_cast<int>(components.rows()); }
  int dim() const { return static_cast<int>(mean.size()); }
};

/// Principal subspace of the centered rows of X. Each component is oriented
/// so that its largest-magnitude entry is positive. Requires n >= 2 and
/// 1 <= m <= min(n, D).
PcaModel pca_fit(const Matrix& X, int m);

/// Negative squared reconstruction error: -||c - P^T P c||^2, c = x - mean.
double pca_score(const PcaModel& model, const VectorRef& x);

}  // namespace openset
