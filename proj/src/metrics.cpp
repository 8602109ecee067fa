#include "openset/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "openset/error.hpp"

namespace openset {

double binary_auc(std::span<const double> scores, const std::vector<bool>& is_known) {
  const std::size_t n = scores.size();
  if (is_known.size() != n) throw DataError("auc: scores and labels differ in length");
  const auto n_known = static_cast<std::size_t>(std::count(is_known.begin(), is_known.end(), true));
  const std::size_t n_unknown = n - n_known;
  if (n_known == 0 || n_unknown == 0) throw DataError("auc: need at least one known and one unknown sample");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ranks are 1-based; a run of ties [i, j) shares the rank (i + 1 + j) / 2.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (is_known[order[t]]) rank_sum += mid;
    }
    i = j;
  }
  const double nk = static_cast<double>(n_known);
  return (rank_sum - nk * (nk + 1.0) / 2.0) / (nk * static_cast<double>(n_unknown));
}

std::string_view to_string(F1Averaging a) { return a == F1Averaging::kMacro ? "macro" : "micro"; }

F1Averaging parse_f1_averaging(std::string_view name) {
  if (name == "macro") return F1Averaging::kMacro;
  if (name == "micro") return F1Averaging::kMicro;
  throw DataError("unknown F1 averaging '" + std::string(name) + "'");
}

std::int64_t Confusion::support(int cls) const {
  return std::accumulate(counts[cls].begin(), counts[cls].end(), std::int64_t{0});
}

std::int64_t Confusion::predicted(int cls) const {
  std::int64_t s = 0;
  for (const auto& row : counts) s += row[cls];
  return s;
}

F1Result f1_from_confusion(const Confusion& conf, F1Averaging averaging) {
  F1Result out;
  out.per_class.resize(conf.num_classes + 1);
  double sum = 0.0;
  int defined = 0;
  std::int64_t tp_all = 0, fp_all = 0, fn_all = 0;
  for (int c = 0; c <= conf.num_classes; ++c) {
    const std::int64_t tp = conf.counts[c][c];
    const std::int64_t fp = conf.predicted(c) - tp;
    const std::int64_t fn = conf.support(c) - tp;
    if (tp + fp + fn == 0) continue;
    const double f1 = static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
    out.per_class[c] = f1;
    sum += f1;
    ++defined;
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  if (averaging == F1Averaging::kMacro) {
    out.average = defined > 0 ? sum / defined : 0.0;
  } else {
    const std::int64_t denom = 2 * tp_all + fp_all + fn_all;
    out.average = denom > 0 ? static_cast<double>(2 * tp_all) / static_cast<double>(denom) : 0.0;
  }
  return out;
}

F1Result open_set_f1(std::span<const int> predictions, std::span<const int> truths, int num_classes,
                     F1Averaging averaging) {
  if (predictions.size() != truths.size()) throw DataError("f1: predictions and truths differ in length");
  Confusion conf(num_classes);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int t = truths[i] < 0 ? num_classes : truths[i];
    const int p = predictions[i];
    if (t > num_classes || p < 0 || p > num_classes) {
      throw DataError("f1: label outside [0, " + std::to_string(num_classes) + "] at position " + std::to_string(i));
    }
    ++conf.counts[t][p];
  }
  return f1_from_confusion(conf, averaging);
}

EvalReport evaluate(const std::vector<ScoreRecord>& records, const ThresholdPolicy& policy, int num_classes,
                    F1Averaging averaging) {
  const auto labels = classify_open_set(records, policy, num_classes);

  EvalReport rep;
  rep.averaging = averaging;
  rep.threshold_used = policy;
  rep.confusion = Confusion(num_classes);
  std::vector<double> comparison(records.size());
  std::vector<bool> known(records.size());
  std::size_t open_correct = 0, closed_correct = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.true_label >= num_classes) {
      throw DataError("sample " + std::to_string(r.sample_id) + ": true_label outside range");
    }
    const bool is_known = r.true_label >= 0;
    const int truth = is_known ? r.true_label : num_classes;
    ++rep.confusion.counts[truth][labels[i].label];
    comparison[i] = comparison_score(r, policy);
    known[i] = is_known;
    if (is_known) {
      ++rep.n_known;
      open_correct += labels[i].label == r.true_label;
      closed_correct += r.predicted_label == r.true_label;
    } else {
      ++rep.n_unknown;
    }
  }

  const auto f1 = f1_from_confusion(rep.confusion, averaging);
  rep.macro_f1 = f1.average;
  rep.per_class_f1 = f1.per_class;
  rep.auc = binary_auc(comparison, known);
  if (rep.n_known > 0) {
    rep.kkc_accuracy = static_cast<double>(open_correct) / static_cast<double>(rep.n_known);
    rep.closed_set_accuracy = static_cast<double>(closed_correct) / static_cast<double>(rep.n_known);
  }
  return rep;
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, const std::vector<bool>& is_known) {
  if (is_known.size() != scores.size()) throw DataError("roc: scores and labels differ in length");
  const auto n_known = static_cast<double>(std::count(is_known.begin(), is_known.end(), true));
  const auto n_unknown = static_cast<double>(scores.size()) - n_known;
  if (n_known == 0 || n_unknown == 0) throw DataError("roc: need at least one known and one unknown sample");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> out{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) (is_known[order[i]] ? tp : fp) += 1.0;
    out.push_back({s, fp / n_unknown, tp / n_known});
  }
  return out;
}

}  // namespace openset
