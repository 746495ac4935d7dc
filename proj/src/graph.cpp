#include "gssl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "gssl/errors.hpp"
#include "gssl/rng.hpp"

namespace gssl {

bool Graph::has_edge(int u, int v) const {
  const int lo = adjacency.row_ptr[u];
  const int hi = adjacency.row_ptr[u + 1];
  return std::binary_search(adjacency.col_idx.begin() + lo, adjacency.col_idx.begin() + hi, v);
}

std::vector<std::pair<int, int>> Graph::undirected_edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<size_t>(adjacency.nnz()) / 2);
  for (int u = 0; u < n; ++u)
    for (int k = adjacency.row_ptr[u]; k < adjacency.row_ptr[u + 1]; ++k) {
      const int v = adjacency.col_idx[k];
      if (u < v) out.emplace_back(u, v);
    }
  return out;
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                        DenseMatrix features, std::vector<int> labels, std::string name) {
  if (n < 0) throw ShapeError("negative node count");
  std::set<std::pair<int, int>> dedup;
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw ShapeError("edge endpoint out of range: (" + std::to_string(u) + "," +
                       std::to_string(v) + ") with n=" + std::to_string(n));
    if (u == v) throw ShapeError("self-loop at node " + std::to_string(u));
    dedup.insert({std::min(u, v), std::max(u, v)});
  }
  std::vector<std::tuple<int, int, float>> triplets;
  triplets.reserve(dedup.size() * 2);
  for (auto [u, v] : dedup) {
    triplets.emplace_back(u, v, 1.0f);
    triplets.emplace_back(v, u, 1.0f);
  }
  Graph g;
  g.n = n;
  g.adjacency = SparseMatrix::from_triplets(n, n, std::move(triplets));
  if (features.rows == 0 && features.cols == 0) features = DenseMatrix(n, 0);
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.name = std::move(name);
  g.check_valid();
  return g;
}

void Graph::check_valid() const {
  if (adjacency.n_rows != n || adjacency.n_cols != n) throw ShapeError("adjacency not n x n");
  adjacency.check_valid();
  if (features.rows != n) throw ShapeError("feature rows != n");
  if (!labels.empty() && labels.size() != static_cast<size_t>(n))
    throw ShapeError("label count != n");
  for (int u = 0; u < n; ++u)
    for (int k = adjacency.row_ptr[u]; k < adjacency.row_ptr[u + 1]; ++k) {
      const int v = adjacency.col_idx[k];
      if (v == u) throw ShapeError("self-loop stored at node " + std::to_string(u));
      if (adjacency.values[k] != 1.0f) throw ShapeError("adjacency value not 1.0");
      if (!has_edge(v, u)) throw ShapeError("asymmetric adjacency");
    }
}

void GraphSet::check_valid() const {
  if (labels.size() != graphs.size()) throw ShapeError("graph/label count mismatch");
  for (const Graph& g : graphs) g.check_valid();
  for (int l : labels)
    if (l < 0 || l >= n_classes) throw ShapeError("graph label out of range");
  for (const Graph& g : graphs)
    if (g.feature_dim() != feature_dim()) throw ShapeError("inconsistent feature dims in set");
}

SparseMatrix sym_norm_adj(const Graph& g) {
  std::vector<float> inv_sqrt_deg(static_cast<size_t>(g.n));
  for (int i = 0; i < g.n; ++i) {
    const int deg = g.degree(i) + 1;  // self-loop added
    inv_sqrt_deg[static_cast<size_t>(i)] = 1.0f / std::sqrt(static_cast<float>(deg));
  }
  std::vector<std::tuple<int, int, float>> triplets;
  triplets.reserve(static_cast<size_t>(g.adjacency.nnz()) + static_cast<size_t>(g.n));
  for (int i = 0; i < g.n; ++i) {
    triplets.emplace_back(i, i, inv_sqrt_deg[static_cast<size_t>(i)] * inv_sqrt_deg[static_cast<size_t>(i)]);
    for (int k = g.adjacency.row_ptr[i]; k < g.adjacency.row_ptr[i + 1]; ++k) {
      const int j = g.adjacency.col_idx[k];
      triplets.emplace_back(i, j, inv_sqrt_deg[static_cast<size_t>(i)] * inv_sqrt_deg[static_cast<size_t>(j)]);
    }
  }
  return SparseMatrix::from_triplets(g.n, g.n, std::move(triplets));
}

Graph gen_sbm(int n_per_block, int n_blocks, double p_in, double p_out, int feat_dim,
              double feat_noise, uint64_t seed) {
  if (n_blocks < 1) throw ConfigError("gen_sbm: n_blocks must be >= 1");
  if (n_per_block < 1) throw ConfigError("gen_sbm: n_per_block must be >= 1");
  if (p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1)
    throw ConfigError("gen_sbm: probabilities must be in [0,1]");
  if (feat_dim < n_blocks) throw ConfigError("gen_sbm: feat_dim must be >= n_blocks");

  const int n = n_per_block * n_blocks;
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const bool same = (u / n_per_block) == (v / n_per_block);
      if (rng.bernoulli(same ? p_in : p_out)) edges.emplace_back(u, v);
    }

  DenseMatrix feats(n, feat_dim);
  std::vector<int> labels(static_cast<size_t>(n));
  for (int u = 0; u < n; ++u) {
    const int block = u / n_per_block;
    labels[static_cast<size_t>(u)] = block;
    for (int j = 0; j < feat_dim; ++j)
      feats.at(u, j) = static_cast<float>((j == block ? 1.0 : 0.0) + feat_noise * rng.normal());
  }
  return Graph::from_edges(n, edges, std::move(feats), std::move(labels), "sbm");
}

Split split_nodes(int n, double train_frac, double val_frac, double test_frac, uint64_t seed) {
  const double sum = train_frac + val_frac + test_frac;
  if (std::fabs(sum - 1.0) > 1e-6) throw ConfigError("split ratios must sum to 1");
  const int n_train = static_cast<int>(std::lround(train_frac * n));
  const int n_val = static_cast<int>(std::lround(val_frac * n));
  const int n_test = n - n_train - n_val;
  if (n_train < 1 || n_val < 1 || n_test < 1)
    throw ConfigError("split produces an empty partition (n=" + std::to_string(n) + ")");

  Rng rng(seed);
  auto perm = rng.permutation(static_cast<size_t>(n));
  Split s;
  for (int i = 0; i < n_train; ++i) s.train.push_back(static_cast<int>(perm[static_cast<size_t>(i)]));
  for (int i = n_train; i < n_train + n_val; ++i) s.val.push_back(static_cast<int>(perm[static_cast<size_t>(i)]));
  for (int i = n_train + n_val; i < n; ++i) s.test.push_back(static_cast<int>(perm[static_cast<size_t>(i)]));
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<Split> kfold_split(int n, int k, uint64_t seed) {
  if (k < 2) throw ConfigError("kfold: k must be >= 2");
  if (k > n) throw ConfigError("kfold: k > n");
  Rng rng(seed);
  auto perm = rng.permutation(static_cast<size_t>(n));
  std::vector<Split> folds(static_cast<size_t>(k));
  // First (n % k) folds take the extra element.
  const int base = n / k;
  const int extra = n % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int sz = base + (f < extra ? 1 : 0);
    Split& s = folds[static_cast<size_t>(f)];
    for (int i = 0; i < sz; ++i) s.test.push_back(static_cast<int>(perm[static_cast<size_t>(pos + i)]));
    pos += sz;
    std::sort(s.test.begin(), s.test.end());
  }
  for (int f = 0; f < k; ++f) {
    std::vector<bool> in_test(static_cast<size_t>(n), false);
    for (int i : folds[static_cast<size_t>(f)].test) in_test[static_cast<size_t>(i)] = true;
    for (int i = 0; i < n; ++i)
      if (!in_test[static_cast<size_t>(i)]) folds[static_cast<size_t>(f)].train.push_back(i);
  }
  return folds;
}

Graph degree_features(const Graph& g, int max_degree) {
  if (g.feature_dim() != 0)
    throw ContractError("degree_features: graph already has features");
  if (max_degree < 0) throw ContractError("degree_features: negative cap");
  Graph out = g;
  out.features = DenseMatrix(g.n, max_degree + 1);
  for (int v = 0; v < g.n; ++v) {
    const int d = std::min(g.degree(v), max_degree);
    out.features.at(v, d) = 1.0f;
  }
  return out;
}

int max_degree(const GraphSet& gs) {
  int best = 0;
  for (const Graph& g : gs.graphs)
    for (int v = 0; v < g.n; ++v) best = std::max(best, g.degree(v));
  return best;
}

}  // namespace gssl
