#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "openset/model_bank.hpp"

namespace openset {

enum class ThresholdMode {
  kGlobalNormalized,  // one tau compared against norm_score
  kPerClassRaw,       // tau[c] compared against raw_score of predicted class c
};

std::string_view to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view name);

struct ThresholdPolicy {
  ThresholdMode mode = ThresholdMode::kGlobalNormalized;
  std::vector<double> tau{0.0};
  std::string provenance;

  static ThresholdPolicy global(double tau, std::string provenance = {});
  static ThresholdPolicy per_class(std::vector<double> tau, std::string provenance = {});

  bool operator==(const ThresholdPolicy&) const = default;
};

/// Throws DataError on NaN entries or a tau count that does not fit the mode.
/// Infinite cutoffs are legal: -inf accepts everything, +inf nothing.
void check(const ThresholdPolicy& policy, int num_classes);

/// Score on a scale shared by all classes under this policy: norm_score in
/// the global mode, raw_score - tau[c] in the per-class mode. This is the
/// score AUC is computed on.
double comparison_score(const ScoreRecord& record, const ThresholdPolicy& policy);

bool accepts(const ScoreRecord& record, const ThresholdPolicy& policy);

struct OpenSetLabel {
  std::uint32_t sample_id = 0;
  /// predicted_label when accepted, num_classes (UNKNOWN) otherwise.
  std::int32_t label = 0;

  bool operator==(const OpenSetLabel&) const = default;
};

std::vector<OpenSetLabel> classify_open_set(const std::vector<ScoreRecord>& records, const ThresholdPolicy& policy,
                                            int num_classes);

/// Rewrites a global normalized cutoff as tau[c] = mean_c + tau * std_c.
ThresholdPolicy to_per_class_raw(const ThresholdPolicy& global, const ModelBank& bank);

}  // namespace openset
