#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gssl/matrix.hpp"

namespace gssl {

// Undirected attributed graph. Adjacency is binary, symmetric and stores no
// self-loops; these invariants are checked on construction.
struct Graph {
  int n = 0;
  SparseMatrix adjacency;  // n x n
  DenseMatrix features;    // n x d, d may be 0
  std::vector<int> labels;  // node labels, may be empty
  std::string name;

  int feature_dim() const { return features.cols; }
  // Count of undirected edges (half the stored nnz).
  int n_edges() const { return adjacency.nnz() / 2; }
  int degree(int v) const { return adjacency.row_ptr[v + 1] - adjacency.row_ptr[v]; }
  bool has_edge(int u, int v) const;

  // Canonical undirected edge list: pairs (u, v) with u < v, sorted.
  std::vector<std::pair<int, int>> undirected_edges() const;

  // Builds from an undirected edge list; edges are symmetrized and
  // deduplicated. Self-loops throw ShapeError.
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                          DenseMatrix features = {}, std::vector<int> labels = {},
                          std::string name = "");

  void check_valid() const;
};

// A set of graphs with one label per graph.
struct GraphSet {
  std::vector<Graph> graphs;
  std::vector<int> labels;
  int n_classes = 0;
  std::string name;

  size_t size() const { return graphs.size(); }
  int feature_dim() const { return graphs.empty() ? 0 : graphs.front().feature_dim(); }
  void check_valid() const;
};

struct Split {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
SparseMatrix sym_norm_adj(const Graph& g);

// Stochastic block model with noisy one-hot block features; labels are the
// block ids. feat_dim must be >= n_blocks.
Graph gen_sbm(int n_per_block, int n_blocks, double p_in, double p_out, int feat_dim,
              double feat_noise, uint64_t seed);

// Uniform random disjoint train/val/test partition; sizes are rounded
// fractions (test takes the remainder). Every part must end up non-empty.
Split split_nodes(int n, double train_frac, double val_frac, double test_frac, uint64_t seed);

// k folds with test-fold sizes differing by at most one; val folds are empty.
std::vector<Split> kfold_split(int n, int k, uint64_t seed);

// One-hot degree features for a featureless graph, dimension max_degree+1,
// degrees above the cap land in the last bucket.
Graph degree_features(const Graph& g, int max_degree);

// Largest degree across a graph set (used as the shared one-hot cap).
int max_degree(const GraphSet& gs);

}  // namespace gssl
