#pragma once

#include <variant>

#include "openset/gmm.hpp"
#include "openset/isolation_forest.hpp"
#include "openset/linalg.hpp"
#include "openset/lof.hpp"
#include "openset/pca.hpp"
#include "openset/scorer_config.hpp"

namespace openset {

/// A fitted single-class scorer. Every alternative follows the convention
/// that a higher score means more in-distribution.
using ScorerModel = std::variant<GmmModel, PcaModel, IsolationForestModel, LofModel>;

ScorerModel fit_scorer(const Matrix& X, const ScorerConfig& cfg);

double score(const ScorerModel& model, const VectorRef& x);

ScorerKind kind_of(const ScorerModel& model);

int dim_of(const ScorerModel& model);

}  // namespace openset
