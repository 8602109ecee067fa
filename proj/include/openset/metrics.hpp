#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "openset/threshold_policy.hpp"

namespace openset {

/// Mann-Whitney AUC for "higher score means known", mid-ranks for ties.
/// Throws DataError unless both groups are non-empty and lengths agree.
double binary_auc(std::span<const double> scores, const std::vector<bool>& is_known);

enum class F1Averaging { kMacro, kMicro };

std::string_view to_string(F1Averaging a);
F1Averaging parse_f1_averaging(std::string_view name);

struct Confusion {
  int num_classes = 0;  // C; labels run over [0, C], C = UNKNOWN
  std::vector<std::vector<std::int64_t>> counts;  // counts[truth][prediction]

  explicit Confusion(int c = 0)
      : num_classes(c), counts(c + 1, std::vector<std::int64_t>(c + 1, 0)) {}

  std::int64_t support(int cls) const;    // row sum
  std::int64_t predicted(int cls) const;  // column sum
};

struct F1Result {
  double average = 0.0;
  /// C + 1 entries; empty for classes absent from both truths and predictions.
  std::vector<std::optional<double>> per_class;
};

/// Per-class F1 = 2TP / (2TP + FP + FN). Macro averages the defined entries;
/// micro pools TP/FP/FN over the defined classes.
F1Result f1_from_confusion(const Confusion& conf, F1Averaging averaging = F1Averaging::kMacro);

/// Labels in [0, C]; a truth of -1 is read as UNKNOWN.
F1Result open_set_f1(std::span<const int> predictions, std::span<const int> truths, int num_classes,
                     F1Averaging averaging = F1Averaging::kMacro);

struct EvalReport {
  double auc = 0.0;
  F1Averaging averaging = F1Averaging::kMacro;
  double macro_f1 = 0.0;  // the averaged F1 under `averaging`
  std::vector<std::optional<double>> per_class_f1;
  double kkc_accuracy = 0.0;  // open-set label == true label over known rows
  double closed_set_accuracy = 0.0;  // predicted_label == true label over known rows
  std::size_t n_known = 0;
  std::size_t n_unknown = 0;
  Confusion confusion;
  ThresholdPolicy threshold_used;
};

EvalReport evaluate(const std::vector<ScoreRecord>& records, const ThresholdPolicy& policy, int num_classes,
                    F1Averaging averaging = F1Averaging::kMacro);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

/// One point per distinct score (descending), starting at (0, 0).
std::vector<RocPoint> roc_curve(std::span<const double> scores, const std::vector<bool>& is_known);

}  // namespace openset
