#include "openset/model_bank.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "openset/error.hpp"
#include "openset/parallel.hpp"
#include "openset/rng.hpp"

namespace openset {

unsigned worker_count() {
  if (const char* env = std::getenv("GEMOS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Matrix to_matrix(const FeatureDataset& data) {
  Matrix X(static_cast<Eigen::Index>(data.records.size()), static_cast<Eigen::Index>(data.dim));
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto& f = data.records[i].features;
    for (std::size_t j = 0; j < f.size(); ++j) X(i, j) = static_cast<double>(f[j]);
  }
  return X;
}

ModelBank fit_bank(const FeatureDataset& train, const ScorerConfig& cfg, std::optional<std::size_t> min_class_samples) {
  check(cfg);
  if (auto v = validate(train); !v.empty()) throw DataError("training set: " + describe(v.front()));

  ModelBank bank;
  bank.num_classes = static_cast<int>(train.num_classes);
  bank.dim = static_cast<int>(train.dim);
  bank.config = cfg;
  bank.min_class_samples = min_class_samples.value_or(default_min_class_samples(cfg));

  std::vector<std::vector<std::size_t>> rows(bank.num_classes);
  for (std::size_t i = 0; i < train.records.size(); ++i) {
    const auto& r = train.records[i];
    if (r.true_label >= 0 && r.true_label == r.predicted_label) rows[r.true_label].push_back(i);
  }
  for (int c = 0; c < bank.num_classes; ++c) {
    if (rows[c].size() < bank.min_class_samples) {
      std::string name = "class " + std::to_string(c);
      if (train.manifest.class_names) name += " ('" + (*train.manifest.class_names)[c] + "')";
      throw DataError(name + " has " + std::to_string(rows[c].size()) +
                      " correctly predicted training rows; at least " + std::to_string(bank.min_class_samples) +
                      " are required");
    }
  }

  bank.scorers.resize(bank.num_classes);
  bank.norm_stats.resize(bank.num_classes);
  bank.train_counts.resize(bank.num_classes);
  parallel_for(bank.num_classes, worker_count(), [&](std::size_t c) {
    Matrix X(static_cast<Eigen::Index>(rows[c].size()), bank.dim);
    for (std::size_t i = 0; i < rows[c].size(); ++i) {
      const auto& f = train.records[rows[c][i]].features;
      for (int j = 0; j < bank.dim; ++j) X(i, j) = static_cast<double>(f[j]);
    }
    ScorerConfig class_cfg = cfg;
    class_cfg.rng_seed = mix_seed(cfg.rng_seed, c);
    bank.scorers[c] = fit_scorer(X, class_cfg);

    Vector raw(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) raw(i) = score(bank.scorers[c], X.row(i).transpose());
    const double mean = raw.mean();
    const double var = (raw.array() - mean).square().mean();
    bank.norm_stats[c] = {mean, std::max(std::sqrt(var), kNormStdFloor)};
    bank.train_counts[c] = rows[c].size();
  });
  return bank;
}

double normalize(const ModelBank& bank, int cls, double raw) {
  const auto& s = bank.norm_stats.at(cls);
  return (raw - s.mean) / s.stddev;
}

std::vector<ScoreRecord> score_dataset(const ModelBank& bank, const FeatureDataset& data) {
  if (static_cast<int>(data.dim) != bank.dim) {
    throw DataError("dimension mismatch: bank expects D=" + std::to_string(bank.dim) + ", features have D=" +
                    std::to_string(data.dim));
  }
  for (const auto& r : data.records) {
    if (r.predicted_label < 0 || r.predicted_label >= bank.num_classes) {
      throw DataError("sample " + std::to_string(r.sample_id) + ": predicted_label " +
                      std::to_string(r.predicted_label) + " outside [0, " + std::to_string(bank.num_classes) + ")");
    }
    if (r.features.size() != data.dim) {
      throw DataError("sample " + std::to_string(r.sample_id) + ": has " + std::to_string(r.features.size()) +
                      " features, header says " + std::to_string(data.dim));
    }
  }

  std::vector<ScoreRecord> out(data.records.size());
  parallel_for(data.records.size(), worker_count(), [&](std::size_t i) {
    const auto& r = data.records[i];
    Vector x(bank.dim);
    for (int j = 0; j < bank.dim; ++j) x(j) = static_cast<double>(r.features[j]);
    const double raw = score(bank.scorers[r.predicted_label], x);
    out[i] = {r.sample_id, r.true_label, r.predicted_label, raw, normalize(bank, r.predicted_label, raw)};
  });
  return out;
}

}  // namespace openset
