#include "openset/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "openset/ablation.hpp"
#include "openset/error.hpp"
#include "openset/io.hpp"
#include "openset/metrics.hpp"
#include "openset/model_bank.hpp"
#include "openset/threshold_search.hpp"

namespace openset {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string features, bank, scores, threshold, out, roc, text, train, eval;
  std::string model = "gmm";
  ScorerConfig scorer;
  std::optional<std::size_t> min_class_samples;
  std::optional<int> num_classes;
  std::optional<double> tau;
  int folds = kDefaultFolds;
  int grid_size = kDefaultGridSize;
  std::uint64_t seed = 42;
  std::string search = "cv";
  std::string threshold_mode = "global_normalized";
  std::string averaging = "macro";
  double percentile = 5.0;
};

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw DataError("no such file: " + path);
}

void add_scorer_flags(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--model", rc.model, "Scorer kind: gmm, pca, iforest, lof")->capture_default_str();
  cmd->add_option("--components", rc.scorer.num_components, "GMM components / PCA dimensions")->capture_default_str();
  cmd->add_option("--trees", rc.scorer.num_trees, "Isolation forest size")->capture_default_str();
  cmd->add_option("--subsample", rc.scorer.subsample_size, "Isolation forest subsample size")->capture_default_str();
  cmd->add_option("--neighbors", rc.scorer.k_neighbors, "LOF neighbor count")->capture_default_str();
  cmd->add_option("--em-tol", rc.scorer.em_tolerance, "EM tolerance on mean log-likelihood")->capture_default_str();
  cmd->add_option("--em-iters", rc.scorer.em_max_iters, "EM iteration cap")->capture_default_str();
  cmd->add_option("--em-restarts", rc.scorer.em_restarts, "EM restarts")->capture_default_str();
}

int num_classes_for(const RunConfig& rc) {
  if (rc.num_classes) return *rc.num_classes;
  if (!rc.bank.empty()) {
    require_file(rc.bank);
    return read_bank(rc.bank).num_classes;
  }
  throw DataError("pass --num-classes or --bank");
}

int cmd_fit(RunConfig rc, std::ostream& out) {
  require_file(rc.features);
  rc.scorer.kind = parse_scorer_kind(rc.model);
  rc.scorer.rng_seed = rc.seed;
  const auto train = read_dataset(rc.features);
  const auto bank = fit_bank(train, rc.scorer, rc.min_class_samples);
  write_bank(bank, rc.out);

  out << "fitted " << to_string(rc.scorer.kind) << " bank: C=" << bank.num_classes << " D=" << bank.dim << " -> "
      << rc.out << '\n';
  out << "class  train_rows  mean_raw_score  std_raw_score\n";
  for (int c = 0; c < bank.num_classes; ++c) {
    out << std::setw(5) << c << "  " << std::setw(10) << bank.train_counts[c] << "  " << std::setw(14)
        << format_double(bank.norm_stats[c].mean) << "  " << format_double(bank.norm_stats[c].stddev) << '\n';
  }
  if (rc.scorer.kind == ScorerKind::kGmm) out << "(gmm: mean_raw_score is the mean training log-likelihood)\n";
  return kExitOk;
}

int cmd_score(const RunConfig& rc, std::ostream& out) {
  require_file(rc.bank);
  require_file(rc.features);
  const auto bank = read_bank(rc.bank);
  const auto data = read_dataset(rc.features);
  const auto records = score_dataset(bank, data);
  write_scores_csv(records, fs::path(rc.out));
  out << "scored " << records.size() << " samples -> " << rc.out << '\n';
  return kExitOk;
}

int cmd_threshold(const RunConfig& rc, std::ostream& out) {
  require_file(rc.scores);
  const auto records = read_scores_csv(rc.scores);
  const int C = num_classes_for(rc);
  const auto averaging = parse_f1_averaging(rc.averaging);

  Json doc;
  if (rc.search == "cv") {
    const auto report = cross_validate_threshold(records, C, rc.folds, rc.grid_size, rc.seed, averaging);
    doc["policy"] = to_json(report.policy());
    doc["report"] = to_json(report);
    out << rc.folds << "-fold CV: tau=" << format_double(report.final_tau) << " held-out F1 "
        << format_double(report.mean_f1) << " +/- " << format_double(report.std_f1) << '\n';
  } else if (rc.search == "grid") {
    const auto g = grid_search_threshold(records, C, rc.grid_size, averaging);
    doc["policy"] = to_json(ThresholdPolicy::global(g.tau, "in-sample quantile grid " + std::to_string(rc.grid_size)));
    doc["report"] = {{"tau", g.tau}, {"f1", g.f1}, {"grid_points", g.grid_points}};
    out << "grid search: tau=" << format_double(g.tau) << " F1 " << format_double(g.f1) << '\n';
  } else if (rc.search == "percentile") {
    const auto policy = percentile_threshold(records, rc.percentile, parse_threshold_mode(rc.threshold_mode), C);
    doc["policy"] = to_json(policy);
    out << "percentile threshold (" << rc.percentile << "): " << to_json(policy)["tau"].dump() << '\n';
  } else {
    throw DataError("unknown --search '" + rc.search + "' (cv, grid or percentile)");
  }
  write_json(doc, rc.out);
  return kExitOk;
}

ThresholdPolicy load_policy(const RunConfig& rc) {
  if (rc.tau) return ThresholdPolicy::global(*rc.tau, "command line");
  if (rc.threshold.empty()) throw DataError("pass --threshold <file> or --tau <value>");
  require_file(rc.threshold);
  const auto j = read_json(rc.threshold);
  return policy_from_json(j.contains("policy") ? j.at("policy") : j);
}

int cmd_eval(const RunConfig& rc, std::ostream& out) {
  require_file(rc.scores);
  const auto records = read_scores_csv(rc.scores);
  const int C = num_classes_for(rc);
  const auto policy = load_policy(rc);
  const auto report = evaluate(records, policy, C, parse_f1_averaging(rc.averaging));
  write_json(to_json(report), rc.out);
  if (!rc.roc.empty()) {
    std::vector<double> s;
    std::vector<bool> known;
    for (const auto& r : records) {
      s.push_back(comparison_score(r, policy));
      known.push_back(r.true_label >= 0);
    }
    write_roc_csv(roc_curve(s, known), rc.roc);
  }
  out << "AUC " << format_double(report.auc) << "  " << to_string(report.averaging) << "-F1 "
      << format_double(report.macro_f1) << "  KKC accuracy " << format_double(report.kkc_accuracy) << '\n';
  return kExitOk;
}

int cmd_ablate(RunConfig rc, std::ostream& out) {
  require_file(rc.train);
  require_file(rc.eval);
  rc.scorer.rng_seed = rc.seed;
  const auto train = read_dataset(rc.train);
  const auto eval = read_dataset(rc.eval);
  const auto table = run_ablation(train, eval, rc.scorer, rc.folds, rc.grid_size, rc.seed);
  const auto text = ablation_text(table);
  {
    std::ofstream csv(rc.out, std::ios::trunc);
    if (!csv) throw DataError("cannot open '" + rc.out + "' for writing");
    csv << ablation_csv(table);
  }
  if (!rc.text.empty()) {
    std::ofstream txt(rc.text, std::ios::trunc);
    if (!txt) throw DataError("cannot open '" + rc.text + "' for writing");
    txt << text;
  }
  out << text;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Open-set recognition from per-class generative scorers on classifier activations", "openset"};
  app.require_subcommand(1);
  RunConfig rc;

  auto* fit = app.add_subcommand("fit", "Fit one scorer per known class");
  fit->add_option("--features", rc.features, "Training GMF file")->required();
  fit->add_option("--out", rc.out, "Bank JSON output")->required();
  add_scorer_flags(fit, rc);
  fit->add_option("--min-class-samples", rc.min_class_samples, "Override the per-class minimum");
  fit->add_option("--seed", rc.seed)->capture_default_str();

  auto* score = app.add_subcommand("score", "Score samples under their predicted class's scorer");
  score->add_option("--bank", rc.bank)->required();
  score->add_option("--features", rc.features)->required();
  score->add_option("--out", rc.out, "Scores CSV output")->required();

  auto* thr = app.add_subcommand("threshold", "Choose the rejection cutoff");
  thr->add_option("--scores", rc.scores)->required();
  thr->add_option("--out", rc.out, "Policy/report JSON output")->required();
  thr->add_option("--bank", rc.bank, "Bank file (for the class count)");
  thr->add_option("--num-classes", rc.num_classes);
  thr->add_option("--search", rc.search, "cv, grid or percentile")->capture_default_str();
  thr->add_option("--folds", rc.folds)->capture_default_str();
  thr->add_option("--grid-size", rc.grid_size)->capture_default_str();
  thr->add_option("--seed", rc.seed)->capture_default_str();
  thr->add_option("--averaging", rc.averaging, "macro or micro")->capture_default_str();
  thr->add_option("--percentile", rc.percentile, "q for --search percentile")->capture_default_str();
  thr->add_option("--threshold-mode", rc.threshold_mode, "global_normalized or per_class_raw")->capture_default_str();

  auto* ev = app.add_subcommand("eval", "Compute AUC and open-set F1");
  ev->add_option("--scores", rc.scores)->required();
  ev->add_option("--out", rc.out, "Report JSON output")->required();
  ev->add_option("--threshold", rc.threshold, "Policy JSON from `threshold`");
  ev->add_option("--tau", rc.tau, "Global normalized cutoff instead of --threshold");
  ev->add_option("--bank", rc.bank);
  ev->add_option("--num-classes", rc.num_classes);
  ev->add_option("--averaging", rc.averaging)->capture_default_str();
  ev->add_option("--roc", rc.roc, "Optional ROC points CSV");

  auto* abl = app.add_subcommand("ablate", "Compare scorer kinds and sizes");
  abl->add_option("--train", rc.train)->required();
  abl->add_option("--eval", rc.eval)->required();
  abl->add_option("--out", rc.out, "Table CSV output")->required();
  abl->add_option("--text", rc.text, "Also write the aligned table here");
  add_scorer_flags(abl, rc);
  abl->add_option("--folds", rc.folds)->capture_default_str();
  abl->add_option("--grid-size", rc.grid_size)->capture_default_str();
  abl->add_option("--seed", rc.seed)->capture_default_str();

  std::vector<std::string> storage(args);
  if (storage.empty()) storage.push_back("openset");
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*fit) return cmd_fit(rc, out);
    if (*score) return cmd_score(rc, out);
    if (*thr) return cmd_threshold(rc, out);
    if (*ev) return cmd_eval(rc, out);
    if (*abl) return cmd_ablate(rc, out);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace openset
