#include "openset/scorer.hpp"

#include <algorithm>

#include "openset/error.hpp"

namespace openset {

std::string_view to_string(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::kGmm: return "gmm";
    case ScorerKind::kPca: return "pca";
    case ScorerKind::kIsolationForest: return "iforest";
    case ScorerKind::kLof: return "lof";
  }
  return "?";
}

ScorerKind parse_scorer_kind(std::string_view name) {
  if (name == "gmm") return ScorerKind::kGmm;
  if (name == "pca") return ScorerKind::kPca;
  if (name == "iforest") return ScorerKind::kIsolationForest;
  if (name == "lof") return ScorerKind::kLof;
  if (name == "ocsvm") {
    throw DataError("unsupported model kind 'ocsvm': one-class SVM needs a QP solver and is not provided");
  }
  throw DataError("unsupported model kind '" + std::string(name) + "' (expected gmm, pca, iforest or lof)");
}

void check(const ScorerConfig& cfg) {
  if (cfg.num_components < 1) throw DataError("num_components must be positive");
  if (cfg.num_trees < 1) throw DataError("num_trees must be positive");
  if (cfg.subsample_size < 2) throw DataError("subsample_size must be at least 2");
  if (cfg.k_neighbors < 1) throw DataError("k_neighbors must be positive");
  if (!(cfg.em_tolerance > 0.0)) throw DataError("em_tolerance must be positive");
  if (cfg.em_max_iters < 1) throw DataError("em_max_iters must be positive");
  if (cfg.em_restarts < 1) throw DataError("em_restarts must be positive");
}

std::size_t default_min_class_samples(const ScorerConfig& cfg) {
  std::size_t floor = 8;
  switch (cfg.kind) {
    case ScorerKind::kGmm:
    case ScorerKind::kPca: floor = std::max<std::size_t>(floor, 2 * static_cast<std::size_t>(cfg.num_components)); break;
    case ScorerKind::kLof: floor = std::max<std::size_t>(floor, static_cast<std::size_t>(cfg.k_neighbors) + 1); break;
    case ScorerKind::kIsolationForest: break;
  }
  return floor;
}

ScorerModel fit_scorer(const Matrix& X, const ScorerConfig& cfg) {
  check(cfg);
  switch (cfg.kind) {
    case ScorerKind::kGmm: return gmm_fit(X, cfg.num_components, cfg);
    case ScorerKind::kPca: return pca_fit(X, cfg.num_components);
    case ScorerKind::kIsolationForest: return iforest_fit(X, cfg);
    case ScorerKind::kLof: return lof_fit(X, cfg.k_neighbors);
  }
  throw DataError("unknown scorer kind");
}

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

double score(const ScorerModel& model, const VectorRef& x) {
  return std::visit(overloaded{
                        [&](const GmmModel& m) { return gmm_score(m, x); },
                        [&](const PcaModel& m) { return pca_score(m, x); },
                        [&](const IsolationForestModel& m) { return iforest_score(m, x); },
                        [&](const LofModel& m) { return lof_score(m, x); },
                    },
                    model);
}

ScorerKind kind_of(const ScorerModel& model) {
  return std::visit(overloaded{
                        [](const GmmModel&) { return ScorerKind::kGmm; },
                        [](const PcaModel&) { return ScorerKind::kPca; },
                        [](const IsolationForestModel&) { return ScorerKind::kIsolationForest; },
                        [](const LofModel&) { return ScorerKind::kLof; },
                    },
                    model);
}

int dim_of(const ScorerModel& model) {
  return std::visit(overloaded{
                        [](const GmmModel& m) { return m.dim(); },
                        [](const PcaModel& m) { return m.dim(); },
                        [](const IsolationForestModel& m) { return m.dim; },
                        [](const LofModel& m) { return m.dim(); },
                    },
                    model);
}

}  // namespace openset
