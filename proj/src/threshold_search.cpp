#include "openset/threshold_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "openset/error.hpp"
#include "openset/rng.hpp"

namespace openset {
namespace {

int truth_index(const ScoreRecord& r, int num_classes) {
  if (r.true_label >= num_classes || r.true_label < kUnknownLabel) {
    throw DataError("sample " + std::to_string(r.sample_id) + ": true_label " + std::to_string(r.true_label) +
                    " outside {-1} U [0, " + std::to_string(num_classes) + ")");
  }
  if (r.predicted_label < 0 || r.predicted_label >= num_classes) {
    throw DataError("sample " + std::to_string(r.sample_id) + ": predicted_label " +
                    std::to_string(r.predicted_label) + " outside [0, " + std::to_string(num_classes) + ")");
  }
  return r.true_label < 0 ? num_classes : r.true_label;
}

void require_both_groups(const std::vector<ScoreRecord>& records) {
  const bool any_known = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.true_label >= 0; });
  const bool any_unknown = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.true_label < 0; });
  if (!any_unknown) {
    throw DataError("threshold search needs unknown-class samples (true_label -1): F1 of the unknown class is undefined");
  }
  if (!any_known) throw DataError("threshold search needs known-class samples");
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double pop_std(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

GridSearchResult grid_search_threshold(const std::vector<ScoreRecord>& records, int num_classes, int grid_size,
                                       F1Averaging averaging) {
  if (grid_size < 2) throw DataError("grid_size must be at least 2");
  require_both_groups(records);
  const std::size_t n = records.size();

  std::vector<std::size_t> desc(n);
  std::iota(desc.begin(), desc.end(), std::size_t{0});
  std::sort(desc.begin(), desc.end(), [&](std::size_t a, std::size_t b) {
    return records[a].norm_score > records[b].norm_score;
  });

  // Candidates in descending order: above-max sentinel, quantiles, below-min.
  std::vector<double> grid;
  grid.reserve(grid_size + 2);
  const double top = records[desc.front()].norm_score;
  const double bottom = records[desc.back()].norm_score;
  grid.push_back(std::nextafter(top, std::numeric_limits<double>::infinity()));
  for (int i = grid_size - 1; i >= 0; --i) {
    // Ascending rank floor(i (n-1) / (g-1)) maps to descending position n-1-rank.
    const auto rank = static_cast<std::size_t>((static_cast<unsigned long long>(i) * (n - 1)) /
                                               static_cast<unsigned long long>(grid_size - 1));
    grid.push_back(records[desc[n - 1 - rank]].norm_score);
  }
  grid.push_back(std::nextafter(bottom, -std::numeric_limits<double>::infinity()));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  Confusion conf(num_classes);
  std::vector<int> truth(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = truth_index(records[i], num_classes);
    ++conf.counts[truth[i]][num_classes];
  }

  GridSearchResult best{grid.front(), -1.0, grid.size()};
  std::size_t next = 0;
  for (double tau : grid) {
    while (next < n && records[desc[next]].norm_score >= tau) {
      const std::size_t i = desc[next++];
      --conf.counts[truth[i]][num_classes];
      ++conf.counts[truth[i]][records[i].predicted_label];
    }
    const double f1 = f1_from_confusion(conf, averaging).average;
    if (f1 > best.f1) {
      best.f1 = f1;
      best.tau = tau;
    }
  }
  return best;
}

double f1_at(const std::vector<ScoreRecord>& records, double tau, int num_classes, F1Averaging averaging) {
  Confusion conf(num_classes);
  for (const auto& r : records) {
    ++conf.counts[truth_index(r, num_classes)][r.norm_score >= tau ? r.predicted_label : num_classes];
  }
  return f1_from_confusion(conf, averaging).average;
}

ThresholdPolicy ThresholdSearchReport::policy() const {
  return ThresholdPolicy::global(final_tau, std::to_string(folds) + "-fold stratified CV, quantile grid " +
                                                std::to_string(grid_size) + ", " +
                                                std::string(to_string(averaging)) + " F1, seed " +
                                                std::to_string(seed));
}

ThresholdSearchReport cross_validate_threshold(const std::vector<ScoreRecord>& input, int num_classes, int folds,
                                               int grid_size, std::uint64_t seed, F1Averaging averaging) {
  if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
  std::vector<ScoreRecord> records = input;
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });

  std::vector<std::size_t> known, unknown;
  for (std::size_t i = 0; i < records.size(); ++i) (records[i].true_label >= 0 ? known : unknown).push_back(i);
  if (known.size() < static_cast<std::size_t>(folds) || unknown.size() < static_cast<std::size_t>(folds)) {
    throw DataError("stratification infeasible: " + std::to_string(folds) + " folds need at least that many known (" +
                    std::to_string(known.size()) + ") and unknown (" + std::to_string(unknown.size()) + ") samples");
  }

  Rng rng(seed);
  std::vector<int> fold_of(records.size());
  for (auto* stratum : {&known, &unknown}) {
    std::shuffle(stratum->begin(), stratum->end(), rng);
    for (std::size_t j = 0; j < stratum->size(); ++j) fold_of[(*stratum)[j]] = static_cast<int>(j % folds);
  }

  ThresholdSearchReport rep;
  rep.folds = folds;
  rep.grid_size = grid_size;
  rep.seed = seed;
  rep.averaging = averaging;
  std::vector<double> taus, f1s;
  for (int f = 0; f < folds; ++f) {
    std::vector<ScoreRecord> train, test;
    for (std::size_t i = 0; i < records.size(); ++i) (fold_of[i] == f ? test : train).push_back(records[i]);
    const auto g = grid_search_threshold(train, num_classes, grid_size, averaging);
    FoldResult fr{g.tau, g.f1, f1_at(test, g.tau, num_classes, averaging), train.size(), test.size()};
    rep.per_fold.push_back(fr);
    taus.push_back(fr.tau);
    f1s.push_back(fr.heldout_f1);
  }
  rep.mean_tau = mean_of(taus);
  rep.std_tau = pop_std(taus);
  rep.mean_f1 = mean_of(f1s);
  rep.std_f1 = pop_std(f1s);
  rep.final_tau = rep.mean_tau;
  return rep;
}

ThresholdPolicy percentile_threshold(const std::vector<ScoreRecord>& train, double q, ThresholdMode mode,
                                     int num_classes) {
  if (!(q >= 0.0 && q <= 100.0)) throw DataError("percentile must lie in [0, 100]");
  const std::string prov = std::to_string(q) + "th percentile of correctly predicted training scores";
  auto fit_row = [](const ScoreRecord& r) { return r.true_label >= 0 && r.true_label == r.predicted_label; };

  if (mode == ThresholdMode::kGlobalNormalized) {
    std::vector<double> v;
    for (const auto& r : train) {
      if (fit_row(r)) v.push_back(r.norm_score);
    }
    if (v.empty()) throw DataError("percentile threshold: no correctly predicted training records");
    return ThresholdPolicy::global(percentile(std::move(v), q), prov);
  }

  std::vector<std::vector<double>> per(num_classes);
  for (const auto& r : train) {
    if (fit_row(r) && r.true_label < num_classes) per[r.true_label].push_back(r.raw_score);
  }
  std::vector<double> tau(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    if (per[c].empty()) throw DataError("percentile threshold: class " + std::to_string(c) + " has no training records");
    tau[c] = percentile(std::move(per[c]), q);
  }
  return ThresholdPolicy::per_class(std::move(tau), prov);
}

}  // namespace openset
