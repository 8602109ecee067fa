#include "openset/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "openset/error.hpp"

namespace openset {
namespace {

Json vec_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json mat_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(std::vector<double>(m.row(i).data(), m.row(i).data() + m.cols()));
  }
  return rows;
}

Vector vec_from(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// `cols` is used when there are no rows to infer it from.
Matrix mat_from(const Json& j, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(j.size()), j.empty() ? cols : static_cast<Eigen::Index>(j.at(0).size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = j.at(i).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) throw DataError("ragged matrix in model file");
    for (std::size_t c = 0; c < row.size(); ++c) m(i, c) = row[c];
  }
  return m;
}

Json node_json(const IsolationTree& t, int id) {
  const auto& n = t.nodes[id];
  Json j{{"size", n.size}};
  if (!n.is_leaf()) {
    j["split_dim"] = n.split_dim;
    j["split_value"] = n.split_value;
    j["left"] = node_json(t, n.left);
    j["right"] = node_json(t, n.right);
  }
  return j;
}

int node_from(const Json& j, IsolationTree& t) {
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.push_back({});
  t.nodes[id].size = j.at("size").get<std::uint32_t>();
  if (j.contains("split_dim")) {
    const int dim = j.at("split_dim").get<int>();
    const double value = j.at("split_value").get<double>();
    const int l = node_from(j.at("left"), t);
    const int r = node_from(j.at("right"), t);
    auto& n = t.nodes[id];
    n.split_dim = dim;
    n.split_value = value;
    n.left = l;
    n.right = r;
  }
  return id;
}

Json double_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double double_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw DataError("expected a number, got '" + s + "'");
}

Json optional_list(const std::vector<std::optional<double>>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(x ? Json(*x) : Json(nullptr));
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json to_json(const ScorerConfig& c) {
  return {{"kind", std::string(to_string(c.kind))},
          {"num_components", c.num_components},
          {"num_trees", c.num_trees},
          {"subsample_size", c.subsample_size},
          {"k_neighbors", c.k_neighbors},
          {"em_tolerance", c.em_tolerance},
          {"em_max_iters", c.em_max_iters},
          {"em_restarts", c.em_restarts},
          {"rng_seed", c.rng_seed}};
}

ScorerConfig config_from_json(const Json& j) {
  ScorerConfig c;
  c.kind = parse_scorer_kind(j.at("kind").get<std::string>());
  c.num_components = j.at("num_components").get<int>();
  c.num_trees = j.at("num_trees").get<int>();
  c.subsample_size = j.at("subsample_size").get<int>();
  c.k_neighbors = j.at("k_neighbors").get<int>();
  c.em_tolerance = j.at("em_tolerance").get<double>();
  c.em_max_iters = j.at("em_max_iters").get<int>();
  c.em_restarts = j.at("em_restarts").get<int>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return c;
}

Json to_json(const ScorerModel& model) {
  if (const auto* g = std::get_if<GmmModel>(&model)) {
    return {{"kind", "gmm"}, {"weights", vec_json(g->weights)}, {"means", mat_json(g->means)},
            {"variances", mat_json(g->variances)}};
  }
  if (const auto* p = std::get_if<PcaModel>(&model)) {
    return {{"kind", "pca"}, {"mean", vec_json(p->mean)}, {"components", mat_json(p->components)},
            {"singular_values", vec_json(p->singular_values)}};
  }
  if (const auto* f = std::get_if<IsolationForestModel>(&model)) {
    Json trees = Json::array();
    for (const auto& t : f->trees) trees.push_back(node_json(t, 0));
    return {{"kind", "iforest"}, {"dim", f->dim}, {"subsample_size", f->subsample_size},
            {"normalizer", f->normalizer}, {"trees", std::move(trees)}};
  }
  const auto& l = std::get<LofModel>(model);
  return {{"kind", "lof"},           {"k_neighbors", l.k_neighbors}, {"points", mat_json(l.points)},
          {"k_distance", vec_json(l.k_distance)}, {"neighbors", l.neighbors}, {"lrd", vec_json(l.lrd)}};
}

ScorerModel scorer_from_json(const Json& j) {
  try {
    switch (parse_scorer_kind(j.at("kind").get<std::string>())) {
      case ScorerKind::kGmm: {
        GmmModel g;
        g.weights = vec_from(j.at("weights"));
        g.means = mat_from(j.at("means"), 0);
        g.variances = mat_from(j.at("variances"), g.means.cols());
        if (g.means.rows() != g.weights.size() || g.variances.rows() != g.weights.size() ||
            g.variances.cols() != g.means.cols()) {
          throw DataError("gmm: inconsistent parameter shapes");
        }
        return g;
      }
      case ScorerKind::kPca: {
        PcaModel p;
        p.mean = vec_from(j.at("mean"));
        p.components = mat_from(j.at("components"), p.mean.size());
        p.singular_values = vec_from(j.at("singular_values"));
        if (p.components.cols() != p.mean.size()) throw DataError("pca: inconsistent parameter shapes");
        return p;
      }
      case ScorerKind::kIsolationForest: {
        IsolationForestModel f;
        f.dim = j.at("dim").get<int>();
        f.subsample_size = j.at("subsample_size").get<int>();
        f.normalizer = j.at("normalizer").get<double>();
        for (const auto& tj : j.at("trees")) {
          IsolationTree t;
          node_from(tj, t);
          f.trees.push_back(std::move(t));
        }
        return f;
      }
      case ScorerKind::kLof: {
        LofModel l;
        l.k_neighbors = j.at("k_neighbors").get<int>();
        l.points = mat_from(j.at("points"), 0);
        l.k_distance = vec_from(j.at("k_distance"));
        l.neighbors = j.at("neighbors").get<std::vector<std::vector<int>>>();
        l.lrd = vec_from(j.at("lrd"));
        if (l.k_distance.size() != l.points.rows() || l.lrd.size() != l.points.rows() ||
            l.neighbors.size() != static_cast<std::size_t>(l.points.rows())) {
          throw DataError("lof: inconsistent parameter shapes");
        }
        return l;
      }
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed scorer: ") + e.what());
  }
  throw DataError("malformed scorer");
}

Json to_json(const ModelBank& bank) {
  Json classes = Json::array();
  for (int c = 0; c < bank.num_classes; ++c) {
    classes.push_back({{"train_count", bank.train_counts[c]},
                       {"norm_mean", bank.norm_stats[c].mean},
                       {"norm_std", bank.norm_stats[c].stddev},
                       {"scorer", to_json(bank.scorers[c])}});
  }
  return {{"format", "openset-bank"},
          {"version", 1},
          {"num_classes", bank.num_classes},
          {"dim", bank.dim},
          {"config", to_json(bank.config)},
          {"min_class_samples", bank.min_class_samples},
          {"classes", std::move(classes)}};
}

ModelBank bank_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != "openset-bank") throw DataError("not a model bank file");
    if (j.at("version").get<int>() != 1) throw DataError("unsupported bank version");
    ModelBank b;
    b.num_classes = j.at("num_classes").get<int>();
    b.dim = j.at("dim").get<int>();
    b.config = config_from_json(j.at("config"));
    b.min_class_samples = j.at("min_class_samples").get<std::size_t>();
    const auto& classes = j.at("classes");
    if (classes.size() != static_cast<std::size_t>(b.num_classes)) throw DataError("bank: class count mismatch");
    for (const auto& cj : classes) {
      b.train_counts.push_back(cj.at("train_count").get<std::size_t>());
      b.norm_stats.push_back({cj.at("norm_mean").get<double>(), cj.at("norm_std").get<double>()});
      b.scorers.push_back(scorer_from_json(cj.at("scorer")));
      if (dim_of(b.scorers.back()) != b.dim) throw DataError("bank: scorer dimension mismatch");
    }
    return b;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed bank: ") + e.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << j.dump(1) << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_bank(const ModelBank& bank, const std::filesystem::path& path) { write_json(to_json(bank), path); }

ModelBank read_bank(const std::filesystem::path& path) { return bank_from_json(read_json(path)); }

void write_scores_csv(const std::vector<ScoreRecord>& records, std::ostream& out) {
  out << "sample_id,true_label,predicted_label,raw_score,norm_score\n";
  for (const auto& r : records) {
    out << r.sample_id << ',' << r.true_label << ',' << r.predicted_label << ',' << format_double(r.raw_score) << ','
        << format_double(r.norm_score) << '\n';
  }
}

void write_scores_csv(const std::vector<ScoreRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  write_scores_csv(records, out);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::vector<ScoreRecord> read_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "sample_id,true_label,predicted_label,raw_score,norm_score") {
    throw DataError(path.string() + ": missing or unexpected header");
  }
  std::vector<ScoreRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 5) throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 5 fields");
    try {
      ScoreRecord r;
      r.sample_id = static_cast<std::uint32_t>(std::stoul(cells[0]));
      r.true_label = std::stoi(cells[1]);
      r.predicted_label = std::stoi(cells[2]);
      r.raw_score = std::strtod(cells[3].c_str(), nullptr);
      r.norm_score = std::strtod(cells[4].c_str(), nullptr);
      if (!std::isfinite(r.norm_score)) throw DataError("non-finite norm_score");
      out.push_back(r);
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Json to_json(const ThresholdPolicy& p) {
  Json tau = Json::array();
  for (double t : p.tau) tau.push_back(double_or_string(t));
  return {{"mode", std::string(to_string(p.mode))}, {"tau", std::move(tau)}, {"provenance", p.provenance}};
}

ThresholdPolicy policy_from_json(const Json& j) {
  try {
    ThresholdPolicy p;
    p.mode = parse_threshold_mode(j.at("mode").get<std::string>());
    p.tau.clear();
    for (const auto& t : j.at("tau")) p.tau.push_back(double_from(t));
    p.provenance = j.value("provenance", std::string{});
    return p;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed threshold policy: ") + e.what());
  }
}

Json to_json(const ThresholdSearchReport& r) {
  Json folds = Json::array();
  for (const auto& f : r.per_fold) {
    folds.push_back({{"tau", double_or_string(f.tau)},
                     {"train_f1", f.train_f1},
                     {"heldout_f1", f.heldout_f1},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test}});
  }
  return {{"folds", r.folds},
          {"grid", "quantile grid of " + std::to_string(r.grid_size) + " points plus sentinels"},
          {"grid_size", r.grid_size},
          {"seed", r.seed},
          {"averaging", std::string(to_string(r.averaging))},
          {"per_fold", std::move(folds)},
          {"mean_tau", double_or_string(r.mean_tau)},
          {"std_tau", double_or_string(r.std_tau)},
          {"mean_f1", r.mean_f1},
          {"std_f1", r.std_f1},
          {"final_tau", double_or_string(r.final_tau)}};
}

Json to_json(const EvalReport& r) {
  Json support = Json::array(), predicted = Json::array();
  for (int c = 0; c <= r.confusion.num_classes; ++c) {
    support.push_back(r.confusion.support(c));
    predicted.push_back(r.confusion.predicted(c));
  }
  return {{"auc", r.auc},
          {"averaging", std::string(to_string(r.averaging))},
          {"macro_f1", r.macro_f1},
          {"per_class_f1", optional_list(r.per_class_f1)},
          {"kkc_accuracy", r.kkc_accuracy},
          {"closed_set_accuracy", r.closed_set_accuracy},
          {"n_known", r.n_known},
          {"n_unknown", r.n_unknown},
          {"unknown_label", r.confusion.num_classes},
          {"support", std::move(support)},
          {"predicted", std::move(predicted)},
          {"confusion", r.confusion.counts},
          {"threshold_used", to_json(r.threshold_used)}};
}

void write_roc_csv(const std::vector<RocPoint>& points, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << "threshold,fpr,tpr\n";
  for (const auto& p : points) {
    out << (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) << ','
        << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
  }
}

}  // namespace openset
