#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "openset/metrics.hpp"
#include "openset/model_bank.hpp"
#include "openset/threshold_search.hpp"

namespace openset {

using Json = nlohmann::json;

/// printf("%.17g"): enough digits to round-trip any double.
std::string format_double(double v);

Json to_json(const ScorerConfig& cfg);
ScorerConfig config_from_json(const Json& j);

// Scorer JSON layouts (all arrays are row-major nested lists):
//   gmm:     {kind, weights[k], means[k][D], variances[k][D]}
//   pca:     {kind, mean[D], components[m][D], singular_values[m]}
//   iforest: {kind, dim, subsample_size, normalizer, trees[{root}]} where a
//            node is {size} for a leaf or {size, split_dim, split_value,
//            left, right} for an internal node
//   lof:     {kind, k_neighbors, points[n][D], k_distance[n],
//            neighbors[n][k], lrd[n]}
Json to_json(const ScorerModel& model);
ScorerModel scorer_from_json(const Json& j);

// Bank: {format: "openset-bank", version: 1, num_classes, dim, config,
//        min_class_samples, classes: [{train_count, norm_mean, norm_std,
//        scorer}]}
Json to_json(const ModelBank& bank);
ModelBank bank_from_json(const Json& j);

void write_bank(const ModelBank& bank, const std::filesystem::path& path);
ModelBank read_bank(const std::filesystem::path& path);

/// Header `sample_id,true_label,predicted_label,raw_score,norm_score`.
void write_scores_csv(const std::vector<ScoreRecord>& records, std::ostream& out);
void write_scores_csv(const std::vector<ScoreRecord>& records, const std::filesystem::path& path);
std::vector<ScoreRecord> read_scores_csv(const std::filesystem::path& path);

/// Infinite cutoffs are written as the strings "inf" / "-inf".
Json to_json(const ThresholdPolicy& policy);
ThresholdPolicy policy_from_json(const Json& j);

Json to_json(const ThresholdSearchReport& report);
Json to_json(const EvalReport& report);

void write_roc_csv(const std::vector<RocPoint>& points, const std::filesystem::path& path);

void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace openset
