#pragma once

#include <cstdint>
#include <vector>

#include "openset/metrics.hpp"
#include "openset/threshold_policy.hpp"

namespace openset {

inline constexpr int kDefaultGridSize = 512;
inline constexpr int kDefaultFolds = 5;

struct GridSearchResult {
  double tau = 0.0;
  double f1 = 0.0;
  std::size_t grid_points = 0;  // distinct candidates evaluated, sentinels included
};

/// Cutoff grid over the norm_scores of `records`: grid_size empirical
/// quantiles (order statistics at evenly spaced ranks) plus one value below
/// the minimum and one above the maximum. Returns the candidate with the best
/// averaged open-set F1; ties go to the larger tau. Records need true labels
/// (-1 for unknown); at least one known and one unknown are required.
GridSearchResult grid_search_threshold(const std::vector<ScoreRecord>& records, int num_classes,
                                       int grid_size = kDefaultGridSize,
                                       F1Averaging averaging = F1Averaging::kMacro);

/// Averaged open-set F1 when accepting records with norm_score >= tau.
double f1_at(const std::vector<ScoreRecord>& records, double tau, int num_classes,
             F1Averaging averaging = F1Averaging::kMacro);

struct FoldResult {
  double tau = 0.0;
  double train_f1 = 0.0;    // best F1 found on the other folds
  double heldout_f1 = 0.0;  // F1 of that tau on this fold
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct ThresholdSearchReport {
  int folds = 0;
  int grid_size = 0;
  std::uint64_t seed = 0;
  F1Averaging averaging = F1Averaging::kMacro;
  std::vector<FoldResult> per_fold;
  double mean_tau = 0.0;
  double std_tau = 0.0;
  double mean_f1 = 0.0;  // held-out
  double std_f1 = 0.0;
  double final_tau = 0.0;  // mean of the fold cutoffs

  ThresholdPolicy policy() const;
};

/// Stratified (known / unknown) k-fold search. Records are first sorted by
/// sample_id, so input order does not matter. Each stratum is shuffled with
/// the seed and dealt round-robin into folds. Throws DataError if folds < 2
/// or either stratum has fewer members than folds.
ThresholdSearchReport cross_validate_threshold(const std::vector<ScoreRecord>& records, int num_classes,
                                               int folds = kDefaultFolds, int grid_size = kDefaultGridSize,
                                               std::uint64_t seed = 42,
                                               F1Averaging averaging = F1Averaging::kMacro);

/// Cutoff that needs no unknown samples: the q-th percentile (linear
/// interpolation, q in [0, 100]) of the scores of correctly predicted
/// training records, pooled norm_scores for the global mode or each class's
/// raw_scores for the per-class mode.
ThresholdPolicy percentile_threshold(const std::vector<ScoreRecord>& train_records, double q, ThresholdMode mode,
                                     int num_classes);

}  // namespace openset
