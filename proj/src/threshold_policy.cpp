#include "openset/threshold_policy.hpp"

#include <cmath>

#include "openset/error.hpp"

namespace openset {

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::kGlobalNormalized ? "global_normalized" : "per_class_raw";
}

ThresholdMode parse_threshold_mode(std::string_view name) {
  if (name == "global_normalized" || name == "global") return ThresholdMode::kGlobalNormalized;
  if (name == "per_class_raw" || name == "per-class") return ThresholdMode::kPerClassRaw;
  throw DataError("unknown threshold mode '" + std::string(name) + "'");
}

ThresholdPolicy ThresholdPolicy::global(double tau, std::string provenance) {
  return {ThresholdMode::kGlobalNormalized, {tau}, std::move(provenance)};
}

ThresholdPolicy ThresholdPolicy::per_class(std::vector<double> tau, std::string provenance) {
  return {ThresholdMode::kPerClassRaw, std::move(tau), std::move(provenance)};
}

void check(const ThresholdPolicy& p, int num_classes) {
  const std::size_t want = p.mode == ThresholdMode::kGlobalNormalized ? 1 : static_cast<std::size_t>(num_classes);
  if (p.tau.size() != want) {
    throw DataError("threshold policy (" + std::string(to_string(p.mode)) + ") needs " + std::to_string(want) +
                    " cutoffs, has " + std::to_string(p.tau.size()));
  }
  for (double t : p.tau) {
    if (std::isnan(t)) throw DataError("threshold policy contains NaN");
  }
}

double comparison_score(const ScoreRecord& r, const ThresholdPolicy& p) {
  if (p.mode == ThresholdMode::kGlobalNormalized) return r.norm_score;
  return r.raw_score - p.tau.at(r.predicted_label);
}

bool accepts(const ScoreRecord& r, const ThresholdPolicy& p) {
  if (p.mode == ThresholdMode::kGlobalNormalized) return r.norm_score >= p.tau.front();
  return r.raw_score >= p.tau.at(r.predicted_label);
}

std::vector<OpenSetLabel> classify_open_set(const std::vector<ScoreRecord>& records, const ThresholdPolicy& policy,
                                            int num_classes) {
  check(policy, num_classes);
  std::vector<OpenSetLabel> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back({r.sample_id, accepts(r, policy) ? r.predicted_label : num_classes});
  }
  return out;
}

ThresholdPolicy to_per_class_raw(const ThresholdPolicy& global, const ModelBank& bank) {
  if (global.mode != ThresholdMode::kGlobalNormalized) throw DataError("policy is already per-class");
  check(global, bank.num_classes);
  std::vector<double> tau(bank.num_classes);
  for (int c = 0; c < bank.num_classes; ++c) {
    tau[c] = bank.norm_stats[c].mean + global.tau.front() * bank.norm_stats[c].stddev;
  }
  return ThresholdPolicy::per_class(std::move(tau), global.provenance + "; rescaled per class");
}

}  // namespace openset
