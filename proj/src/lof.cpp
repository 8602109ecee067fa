#include "openset/lof.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "openset/error.hpp"

namespace openset {
namespace {

struct Neighbor {
  double dist;
  int index;
  bool operator<(const Neighbor& o) const { return dist < o.dist || (dist == o.dist && index < o.index); }
};

// k nearest training rows to x, skipping row `exclude` (or none when -1).
std::vector<Neighbor> k_nearest(const Matrix& points, const VectorRef& x, int k, int exclude) {
  std::vector<Neighbor> all;
  all.reserve(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (i == exclude) continue;
    all.push_back({(points.row(i).transpose() - x).norm(), static_cast<int>(i)});
  }
  std::partial_sort(all.begin(), all.begin() + k, all.end());
  all.resize(k);
  return all;
}

double density_from_reach_sum(double sum, int k) {
  const double mean = sum / k;
  return mean > 0.0 ? 1.0 / mean : 1.0 / kLofZeroReachEpsilon;
}

}  // namespace

LofModel lof_fit(const Matrix& X, int k) {
  const auto n = X.rows();
  if (k < 1 || n <= k) {
    throw DataError("lof: need n > k >= 1 (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  }
  if (!X.allFinite()) throw DataError("lof: non-finite input");

  LofModel m;
  m.points = X;
  m.k_neighbors = k;
  m.k_distance.resize(n);
  m.neighbors.resize(n);
  std::vector<std::vector<double>> dists(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto nn = k_nearest(X, X.row(i).transpose(), k, static_cast<int>(i));
    m.k_distance(i) = nn.back().dist;
    for (const auto& nb : nn) {
      m.neighbors[i].push_back(nb.index);
      dists[i].push_back(nb.dist);
    }
  }

  m.lrd.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) sum += std::max(m.k_distance(m.neighbors[i][j]), dists[i][j]);
    m.lrd(i) = density_from_reach_sum(sum, k);
  }
  return m;
}

double lof_factor(const LofModel& m, const VectorRef& x) {
  if (x.size() != m.dim()) {
    throw DataError("lof: dimension mismatch (model " + std::to_string(m.dim()) + ", input " +
                    std::to_string(x.size()) + ")");
  }
  const auto nn = k_nearest(m.points, x, m.k_neighbors, -1);
  double reach = 0.0;
  double neighbor_lrd = 0.0;
  for (const auto& nb : nn) {
    reach += std::max(m.k_distance(nb.index), nb.dist);
    neighbor_lrd += m.lrd(nb.index);
  }
  const double own = density_from_reach_sum(reach, m.k_neighbors);
  return (neighbor_lrd / m.k_neighbors) / own;
}

double lof_score(const LofModel& m, const VectorRef& x) { return -lof_factor(m, x); }

}  // namespace openset
