#pragma once

#include <optional>
#include <string>
#include <vector>

#include "openset/feature_store.hpp"
#include "openset/scorer_config.hpp"

namespace openset {

struct AblationColumn {
  std::string name;  // GMM2 ... LOF
  ScorerConfig config;
  std::optional<double> f1;   // mean held-out CV F1
  std::optional<double> auc;  // binary AUC on the evaluation set
  std::string failure;        // set when the column could not be computed
};

struct AblationTable {
  std::vector<AblationColumn> columns;
  int folds = 0;
  int grid_size = 0;
  std::uint64_t seed = 0;
};

/// The sweep GMM{2,4,8,16}, PCA{2,4,8,16}, IF, LOF with `base` supplying
/// every hyperparameter the column does not override.
std::vector<AblationColumn> ablation_columns(const ScorerConfig& base);

/// Fits one bank per column on `train`, scores `eval`, and records binary
/// AUC plus cross-validated open-set F1. A failing column is kept with its
/// reason and the sweep continues.
AblationTable run_ablation(const FeatureDataset& train, const FeatureDataset& eval, const ScorerConfig& base,
                           int folds, int grid_size, std::uint64_t seed);

/// Rows F1 and AUC, one column per model; unavailable cells are "—".
std::string ablation_csv(const AblationTable& table);
std::string ablation_text(const AblationTable& table);

}  // namespace openset
