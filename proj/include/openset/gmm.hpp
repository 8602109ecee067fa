#pragma once

#include <vector>

#include "openset/linalg.hpp"
#include "openset/scorer_config.hpp"

namespace openset {

inline constexpr double kGmmVarianceFloor = 1e-6;

/// Diagonal-covariance Gaussian mixture.
struct GmmModel {
  Vector weights;     // k
  Matrix means;       // k x D
  Matrix variances;   // k x D, every entry >= kGmmVarianceFloor

  int num_components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

struct GmmFitResult {
  GmmModel model;
  /// Mean log-likelihood after initialization and after every EM iteration,
  /// one trace per restart.
  std::vector<std::vector<double>> restart_traces;
  /// Index into restart_traces of the returned model.
  int best_restart = 0;
  double mean_log_likelihood = 0.0;
};

/// EM with k-means++ initialization; best of cfg.em_restarts runs by final
/// mean log-likelihood. Throws DataError if X has fewer than k rows.
GmmFitResult gmm_fit_detailed(const Matrix& X, int k, const ScorerConfig& cfg);

inline GmmModel gmm_fit(const Matrix& X, int k, const ScorerConfig& cfg) {
  return gmm_fit_detailed(X, k, cfg).model;
}

/// log sum_j w_j N(x; mu_j, diag var_j).
double gmm_score(const GmmModel& model, const VectorRef& x);

/// Row-wise posterior component probabilities (n x k).
Matrix gmm_responsibilities(const GmmModel& model, const Matrix& X);

}  // namespace openset
