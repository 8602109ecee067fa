#pragma once

#include <cstdint>
#include <vector>

#include "openset/linalg.hpp"
#include "openset/scorer_config.hpp"

namespace openset {

/// One node of an isolation tree stored in a flat array. Internal nodes send
/// x[split_dim] < split_value to `left`, everything else to `right`.
struct IsolationNode {
  int split_dim = -1;  // -1 marks a leaf
  double split_value = 0.0;
  int left = -1;
  int right = -1;
  std::uint32_t size = 0;  // training rows that reached this node

  bool is_leaf() const { return split_dim < 0; }
};

struct IsolationTree {
  std::vector<IsolationNode> nodes;  // nodes[0] is the root

  int depth() const;
};

struct IsolationForestModel {
  std::vector<IsolationTree> trees;
  int subsample_size = 0;     // effective psi = min(requested, n)
  double normalizer = 0.0;    // average_path_length(psi)
  int dim = 0;
};

/// H(n) = 1 + 1/2 + ... + 1/n, H(0) = 0.
double harmonic_number(std::uint64_t n);

/// Expected path length of an unsuccessful BST search over n items:
/// 2 H(n-1) - 2 (n-1) / n, and 0 for n <= 1.
double average_path_length(std::uint64_t n);

int isolation_depth_limit(int subsample_size);

/// Builds cfg.num_trees trees on subsamples of size min(cfg.subsample_size, n).
/// Tree t draws from an RNG seeded with mix_seed(cfg.rng_seed, t).
IsolationForestModel iforest_fit(const Matrix& X, const ScorerConfig& cfg);

/// Path length of x through one tree, including the average_path_length
/// adjustment for the leaf's row count.
double path_length(const IsolationTree& tree, const VectorRef& x);

/// -2^(-E[h(x)] / c(psi)), in [-1, 0).
double iforest_score(const IsolationForestModel& model, const VectorRef& x);

}  // namespace openset
