#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "openset/feature_store.hpp"
#include "openset/scorer.hpp"

namespace openset {

inline constexpr double kNormStdFloor = 1e-12;

struct NormStats {
  double mean = 0.0;
  double stddev = 1.0;  // population std, floored at kNormStdFloor
};

/// Per-class scorers k_0..k_{C-1} plus the statistics that put their raw
/// scores on a common scale.
struct ModelBank {
  int num_classes = 0;
  int dim = 0;
  std::vector<ScorerModel> scorers;
  std::vector<NormStats> norm_stats;
  std::vector<std::size_t> train_counts;  // rows each scorer was fitted on
  ScorerConfig config;
  std::size_t min_class_samples = 0;
};

struct ScoreRecord {
  std::uint32_t sample_id = 0;
  std::int32_t true_label = kUnknownLabel;
  std::int32_t predicted_label = 0;
  double raw_score = 0.0;
  double norm_score = 0.0;

  bool operator==(const ScoreRecord&) const = default;
};

/// Fits scorer c on exactly the rows with predicted_label == true_label == c.
/// Throws DataError naming the first class that keeps fewer than
/// min_class_samples such rows (default: default_min_class_samples(cfg)).
/// Classes are fitted in parallel; scorer c uses seed mix_seed(cfg.rng_seed, c).
ModelBank fit_bank(const FeatureDataset& train, const ScorerConfig& cfg,
                   std::optional<std::size_t> min_class_samples = std::nullopt);

double normalize(const ModelBank& bank, int cls, double raw);

/// Scores every record under the scorer of its predicted class. Output order
/// follows the input record order.
std::vector<ScoreRecord> score_dataset(const ModelBank& bank, const FeatureDataset& data);

/// Rows of `data` as a double matrix.
Matrix to_matrix(const FeatureDataset& data);

/// Number of worker threads: GEMOS_THREADS if set and positive, otherwise the
/// hardware concurrency.
unsigned worker_count();

}  // namespace openset
