#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace openset {

enum class ScorerKind { kGmm, kPca, kIsolationForest, kLof };

std::string_view to_string(ScorerKind kind);

/// Accepts "gmm", "pca", "iforest", "lof". Throws DataError otherwise; the
/// message for "ocsvm" names it as an unsupported model kind.
ScorerKind parse_scorer_kind(std::string_view name);

struct ScorerConfig {
  ScorerKind kind = ScorerKind::kGmm;
  /// GMM mixture size or PCA retained dimensions.
  int num_components = 8;
  int num_trees = 100;
  int subsample_size = 256;
  int k_neighbors = 20;
  double em_tolerance = 1e-4;
  int em_max_iters = 200;
  int em_restarts = 3;
  std::uint64_t rng_seed = 42;

  bool operator==(const ScorerConfig&) const = default;
};

/// Throws DataError if a count is non-positive or the tolerance is not.
void check(const ScorerConfig& cfg);

/// Smallest per-class training set accepted by fit_bank for this config.
std::size_t default_min_class_samples(const ScorerConfig& cfg);

}  // namespace openset
