#include "openset/ablation.hpp"

#include <cstdio>
#include <sstream>

#include "openset/metrics.hpp"
#include "openset/model_bank.hpp"
#include "openset/threshold_search.hpp"

namespace openset {
namespace {

constexpr const char* kMissing = "—";
constexpr const char* kOcsvmNote = "OCSVM omitted: unsupported model kind (one-class SVM needs a QP solver)";

std::string cell(const std::optional<double>& v) {
  if (!v) return kMissing;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::vector<AblationColumn> ablation_columns(const ScorerConfig& base) {
  std::vector<AblationColumn> cols;
  for (auto [kind, prefix] : {std::pair{ScorerKind::kGmm, "GMM"}, std::pair{ScorerKind::kPca, "PCA"}}) {
    for (int m : {2, 4, 8, 16}) {
      ScorerConfig c = base;
      c.kind = kind;
      c.num_components = m;
      cols.push_back({prefix + std::to_string(m), c, {}, {}, {}});
    }
  }
  ScorerConfig f = base;
  f.kind = ScorerKind::kIsolationForest;
  cols.push_back({"IF", f, {}, {}, {}});
  ScorerConfig l = base;
  l.kind = ScorerKind::kLof;
  cols.push_back({"LOF", l, {}, {}, {}});
  return cols;
}

AblationTable run_ablation(const FeatureDataset& train, const FeatureDataset& eval, const ScorerConfig& base, int folds,
                           int grid_size, std::uint64_t seed) {
  AblationTable table{ablation_columns(base), folds, grid_size, seed};
  const int C = static_cast<int>(train.num_classes);
  for (auto& col : table.columns) {
    try {
      const auto bank = fit_bank(train, col.config);
      const auto records = score_dataset(bank, eval);
      std::vector<double> scores;
      std::vector<bool> known;
      for (const auto& r : records) {
        scores.push_back(r.norm_score);
        known.push_back(r.true_label >= 0);
      }
      col.auc = binary_auc(scores, known);
      col.f1 = cross_validate_threshold(records, C, folds, grid_size, seed).mean_f1;
    } catch (const std::exception& e) {
      col.f1.reset();
      col.auc.reset();
      col.failure = e.what();
    }
  }
  return table;
}

std::string ablation_csv(const AblationTable& t) {
  std::ostringstream out;
  out << "metric";
  for (const auto& c : t.columns) out << ',' << c.name;
  out << "\nF1";
  for (const auto& c : t.columns) out << ',' << cell(c.f1);
  out << "\nAUC";
  for (const auto& c : t.columns) out << ',' << cell(c.auc);
  out << '\n';
  for (const auto& c : t.columns) {
    if (!c.failure.empty()) out << "# " << c.name << ": " << c.failure << '\n';
  }
  out << "# " << kOcsvmNote << '\n';
  return out.str();
}

std::string ablation_text(const AblationTable& t) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-8s", "Metric");
  out << buf;
  for (const auto& c : t.columns) {
    std::snprintf(buf, sizeof buf, "%8s", c.name.c_str());
    out << buf;
  }
  out << '\n';
  for (const auto* metric : {"F1", "AUC"}) {
    std::snprintf(buf, sizeof buf, "%-8s", metric);
    out << buf;
    for (const auto& c : t.columns) {
      const auto& v = std::string(metric) == "F1" ? c.f1 : c.auc;
      // The em dash is 3 bytes but one column wide.
      std::snprintf(buf, sizeof buf, v ? "%8s" : "%10s", cell(v).c_str());
      out << buf;
    }
    out << '\n';
  }
  out << "F1: mean held-out " << t.folds << "-fold CV open-set macro-F1; AUC: known vs unknown, normalized scores\n";
  for (const auto& c : t.columns) {
    if (!c.failure.empty()) out << c.name << " failed: " << c.failure << '\n';
  }
  out << kOcsvmNote << '\n';
  return out.str();
}

}  // namespace openset
