#include "openset/isolation_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "openset/error.hpp"
#include "openset/rng.hpp"

namespace openset {
namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, Rng& rng, int depth_limit) : X_(X), rng_(rng), depth_limit_(depth_limit) {}

  IsolationTree build(std::vector<Eigen::Index> rows) {
    IsolationTree tree;
    grow(tree, rows, 0);
    return tree;
  }

 private:
  int grow(IsolationTree& tree, std::vector<Eigen::Index>& rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[id].size = static_cast<std::uint32_t>(rows.size());
    if (rows.size() <= 1 || depth >= depth_limit_) return id;

    // Only dimensions with spread can separate the rows.
    std::vector<int> candidates;
    std::vector<std::pair<double, double>> ranges(X_.cols());
    for (Eigen::Index d = 0; d < X_.cols(); ++d) {
      double lo = X_(rows[0], d), hi = lo;
      for (auto r : rows) {
        lo = std::min(lo, X_(r, d));
        hi = std::max(hi, X_(r, d));
      }
      ranges[d] = {lo, hi};
      if (hi > lo) candidates.push_back(static_cast<int>(d));
    }
    if (candidates.empty()) return id;

    const int dim = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
    const auto [lo, hi] = ranges[dim];
    const double split = std::uniform_real_distribution<double>(lo, hi)(rng_);

    std::vector<Eigen::Index> left, right;
    for (auto r : rows) (X_(r, dim) < split ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(tree, left, depth + 1);
    const int rgt = grow(tree, right, depth + 1);
    auto& node = tree.nodes[id];
    node.split_dim = dim;
    node.split_value = split;
    node.left = l;
    node.right = rgt;
    return id;
  }

  const Matrix& X_;
  Rng& rng_;
  int depth_limit_;
};

int node_depth(const IsolationTree& t, int id) {
  const auto& n = t.nodes[id];
  if (n.is_leaf()) return 0;
  return 1 + std::max(node_depth(t, n.left), node_depth(t, n.right));
}

}  // namespace

int IsolationTree::depth() const { return nodes.empty() ? 0 : node_depth(*this, 0); }

double harmonic_number(std::uint64_t n) {
  double h = 0.0;
  // Summed smallest-first for accuracy.
  for (std::uint64_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

double average_path_length(std::uint64_t n) {
  if (n <= 1) return 0.0;
  const double nd = static_cast<double>(n);
  return 2.0 * harmonic_number(n - 1) - 2.0 * (nd - 1.0) / nd;
}

int isolation_depth_limit(int subsample_size) {
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(std::max(subsample_size, 1)))));
}

IsolationForestModel iforest_fit(const Matrix& X, const ScorerConfig& cfg) {
  const auto n = X.rows();
  if (n < 2) throw DataError("iforest: need at least 2 rows, got " + std::to_string(n));
  if (cfg.num_trees < 1 || cfg.subsample_size < 2) {
    throw DataError("iforest: need num_trees >= 1 and subsample_size >= 2");
  }
  if (!X.allFinite()) throw DataError("iforest: non-finite input");

  IsolationForestModel model;
  model.dim = static_cast<int>(X.cols());
  model.subsample_size = static_cast<int>(std::min<Eigen::Index>(cfg.subsample_size, n));
  model.normalizer = average_path_length(static_cast<std::uint64_t>(model.subsample_size));
  const int depth_limit = isolation_depth_limit(model.subsample_size);

  std::vector<Eigen::Index> all(n);
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  model.trees.reserve(cfg.num_trees);
  for (int t = 0; t < cfg.num_trees; ++t) {
    Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(t)));
    std::vector<Eigen::Index> sample;
    sample.reserve(model.subsample_size);
    std::sample(all.begin(), all.end(), std::back_inserter(sample), model.subsample_size, rng);
    std::sort(sample.begin(), sample.end());
    model.trees.push_back(TreeBuilder(X, rng, depth_limit).build(std::move(sample)));
  }
  return model;
}

double path_length(const IsolationTree& tree, const VectorRef& x) {
  int id = 0;
  int depth = 0;
  while (!tree.nodes[id].is_leaf()) {
    const auto& node = tree.nodes[id];
    id = x(node.split_dim) < node.split_value ? node.left : node.right;
    ++depth;
  }
  return depth + average_path_length(tree.nodes[id].size);
}

double iforest_score(const IsolationForestModel& model, const VectorRef& x) {
  if (x.size() != model.dim) {
    throw DataError("iforest: dimension mismatch (model " + std::to_string(model.dim) + ", input " +
                    std::to_string(x.size()) + ")");
  }
  if (model.trees.empty() || model.normalizer <= 0.0) throw DataError("iforest: empty model");
  double total = 0.0;
  for (const auto& t : model.trees) total += path_length(t, x);
  const double mean = total / static_cast<double>(model.trees.size());
  return -std::exp2(-mean / model.normalizer);
}

}  // namespace openset
