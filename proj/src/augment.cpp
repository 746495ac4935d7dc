#include "gssl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gssl/errors.hpp"
#include "gssl/rng.hpp"

namespace gssl {

AugmentSpec AugmentSpec::drop_edges_spec(double p) {
  AugmentSpec s;
  s.kind = AugmentKind::drop_edges;
  s.p = p;
  return s;
}

AugmentSpec AugmentSpec::mask_features_spec(double p) {
  AugmentSpec s;
  s.kind = AugmentKind::mask_features;
  s.p = p;
  return s;
}

AugmentSpec AugmentSpec::compose_spec(std::vector<AugmentSpec> children) {
  AugmentSpec s;
  s.kind = AugmentKind::compose;
  s.children = std::move(children);
  return s;
}

void AugmentSpec::validate() const {
  if (p < 0.0 || p > 1.0) throw ConfigError("augment: p must be in [0,1]");
  if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("augment: alpha must be in (0,1]");
  if (top_k < 1) throw ConfigError("augment: top_k must be >= 1");
  for (const auto& c : children) c.validate();
}

Graph drop_edges(const Graph& g, double p, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> kept;
  for (auto e : g.undirected_edges())
    if (!rng.bernoulli(p)) kept.push_back(e);
  return Graph::from_edges(g.n, kept, g.features, g.labels, g.name);
}

Graph drop_edges_weighted(const Graph& g, const std::vector<double>& probs, uint64_t seed) {
  const auto edges = g.undirected_edges();
  if (probs.size() != edges.size())
    throw ContractError("drop_edges_weighted: probability count != edge count");
  Rng rng(seed);
  std::vector<std::pair<int, int>> kept;
  for (size_t i = 0; i < edges.size(); ++i)
    if (!rng.bernoulli(probs[i])) kept.push_back(edges[i]);
  return Graph::from_edges(g.n, kept, g.features, g.labels, g.name);
}

Graph mask_features(const Graph& g, double p, uint64_t seed) {
  const int d = g.feature_dim();
  if (d == 0) throw ContractError("mask_features: graph has no features");
  const int n_mask = static_cast<int>(std::lround(p * d));
  Rng rng(seed);
  const auto cols = rng.sample_without_replacement(static_cast<size_t>(d), static_cast<size_t>(n_mask));
  Graph out = g;
  for (size_t c : cols)
    for (int i = 0; i < g.n; ++i) out.features.at(i, static_cast<int>(c)) = 0.0f;
  return out;
}

Graph drop_nodes(const Graph& g, double p, uint64_t seed) {
  if (p >= 1.0) throw ContractError("drop_nodes: p must be < 1");
  const int n_drop = static_cast<int>(std::lround(p * g.n));
  if (n_drop >= g.n) throw Error("augmentation error: drop_nodes would remove all nodes");
  Rng rng(seed);
  const auto dropped = rng.sample_without_replacement(static_cast<size_t>(g.n), static_cast<size_t>(n_drop));
  std::vector<bool> gone(static_cast<size_t>(g.n), false);
  for (size_t v : dropped) gone[v] = true;

  std::vector<int> new_id(static_cast<size_t>(g.n), -1);
  std::vector<int> survivors;
  for (int v = 0; v < g.n; ++v)
    if (!gone[static_cast<size_t>(v)]) {
      new_id[static_cast<size_t>(v)] = static_cast<int>(survivors.size());
      survivors.push_back(v);
    }

  std::vector<std::pair<int, int>> edges;
  for (auto [u, v] : g.undirected_edges())
    if (!gone[static_cast<size_t>(u)] && !gone[static_cast<size_t>(v)])
      edges.emplace_back(new_id[static_cast<size_t>(u)], new_id[static_cast<size_t>(v)]);

  DenseMatrix feats(static_cast<int>(survivors.size()), g.feature_dim());
  for (size_t i = 0; i < survivors.size(); ++i)
    for (int j = 0; j < g.feature_dim(); ++j)
      feats.at(static_cast<int>(i), j) = g.features.at(survivors[i], j);
  std::vector<int> labels;
  if (!g.labels.empty())
    for (int v : survivors) labels.push_back(g.labels[static_cast<size_t>(v)]);
  return Graph::from_edges(static_cast<int>(survivors.size()), edges, std::move(feats),
                           std::move(labels), g.name);
}

Graph shuffle_features(const Graph& g, uint64_t seed) {
  if (g.feature_dim() == 0) throw ContractError("shuffle_features: graph has no features");
  Rng rng(seed);
  const auto perm = rng.permutation(static_cast<size_t>(g.n));
  Graph out = g;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.feature_dim(); ++j)
      out.features.at(i, j) = g.features.at(static_cast<int>(perm[static_cast<size_t>(i)]), j);
  return out;
}

namespace {

// Per-row top-k sparsification preserving the pre-sparsification row sum.
SparseMatrix sparsify_rows(const DenseMatrix& s, int top_k) {
  std::vector<std::tuple<int, int, float>> triplets;
  std::vector<int> order(static_cast<size_t>(s.cols));
  for (int i = 0; i < s.rows; ++i) {
    double full_sum = 0.0;
    for (int j = 0; j < s.cols; ++j) full_sum += s.at(i, j);
    std::iota(order.begin(), order.end(), 0);
    const int k = std::min(top_k, s.cols);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
      const float va = s.at(i, a), vb = s.at(i, b);
      return va != vb ? va > vb : a < b;
    });
    double kept_sum = 0.0;
    for (int t = 0; t < k; ++t) kept_sum += s.at(i, order[static_cast<size_t>(t)]);
    const float renorm = kept_sum > 0.0 ? static_cast<float>(full_sum / kept_sum) : 1.0f;
    for (int t = 0; t < k; ++t) {
      const int j = order[static_cast<size_t>(t)];
      const float v = s.at(i, j) * renorm;
      if (v != 0.0f) triplets.emplace_back(i, j, v);
    }
  }
  return SparseMatrix::from_triplets(s.rows, s.cols, std::move(triplets));
}

}  // namespace

SparseMatrix ppr_diffusion(const Graph& g, double alpha, int top_k) {
  if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("ppr_diffusion: alpha must be in (0,1]");
  if (top_k < 1) throw ConfigError("ppr_diffusion: top_k must be >= 1");
  const SparseMatrix a_hat = sym_norm_adj(g);
  const int n = g.n;

  DenseMatrix s;
  if (n <= 4000) {
    // Dense solve of (I - (1-alpha) A_hat) S = alpha I.
    DenseMatrix m = a_hat.to_dense();
    for (float& v : m.data) v *= -static_cast<float>(1.0 - alpha);
    for (int i = 0; i < n; ++i) m.at(i, i) += 1.0f;
    DenseMatrix rhs(n, n);
    for (int i = 0; i < n; ++i) rhs.at(i, i) = static_cast<float>(alpha);
    solve_inplace(m, rhs);
    s = std::move(rhs);
  } else {
    // Truncated Neumann series: S = alpha * sum_k ((1-alpha) A_hat)^k.
    // The spectral radius of (1-alpha) A_hat is < 1, so the tail after K
    // terms is bounded by (1-alpha)^{K+1} / alpha.
    s = DenseMatrix(n, n);
    DenseMatrix x(n, n);
    for (int i = 0; i < n; ++i) {
      x.at(i, i) = 1.0f;
      s.at(i, i) = static_cast<float>(alpha);
    }
    double tail = (1.0 - alpha) / alpha;
    while (tail > 1e-6) {
      DenseMatrix next = spmm(a_hat, x);
      for (float& v : next.data) v *= static_cast<float>(1.0 - alpha);
      x = std::move(next);
      axpy(s, static_cast<float>(alpha), x);
      tail *= (1.0 - alpha);
    }
  }
  return sparsify_rows(s, top_k);
}

std::pair<Graph, std::vector<int>> sample_subgraph(const Graph& g, int size, uint64_t seed) {
  if (size < 1 || size > g.n) throw ContractError("sample_subgraph: size out of range");
  Rng rng(seed);
  const int start = static_cast<int>(rng.below(static_cast<uint64_t>(g.n)));

  std::vector<int> picked;
  std::vector<bool> in_set(static_cast<size_t>(g.n), false);
  picked.push_back(start);
  in_set[static_cast<size_t>(start)] = true;

  constexpr double kRestart = 0.2;
  int cur = start;
  // The walk can stall on a component smaller than `size`; cap total steps.
  long budget = 200L * g.n + 1000;
  while (static_cast<int>(picked.size()) < size && budget-- > 0) {
    if (rng.bernoulli(kRestart)) cur = start;
    const int deg = g.degree(cur);
    if (deg == 0) {
      if (cur == start) break;  // isolated start, nothing reachable
      cur = start;
      continue;
    }
    const int k = g.adjacency.row_ptr[cur] + static_cast<int>(rng.below(static_cast<uint64_t>(deg)));
    cur = g.adjacency.col_idx[k];
    if (!in_set[static_cast<size_t>(cur)]) {
      in_set[static_cast<size_t>(cur)] = true;
      picked.push_back(cur);
    }
  }
  std::sort(picked.begin(), picked.end());

  std::vector<int> new_id(static_cast<size_t>(g.n), -1);
  for (size_t i = 0; i < picked.size(); ++i) new_id[static_cast<size_t>(picked[i])] = static_cast<int>(i);
  std::vector<std::pair<int, int>> edges;
  for (auto [u, v] : g.undirected_edges())
    if (new_id[static_cast<size_t>(u)] >= 0 && new_id[static_cast<size_t>(v)] >= 0)
      edges.emplace_back(new_id[static_cast<size_t>(u)], new_id[static_cast<size_t>(v)]);
  DenseMatrix feats(static_cast<int>(picked.size()), g.feature_dim());
  for (size_t i = 0; i < picked.size(); ++i)
    for (int j = 0; j < g.feature_dim(); ++j)
      feats.at(static_cast<int>(i), j) = g.features.at(picked[i], j);
  std::vector<int> labels;
  if (!g.labels.empty())
    for (int v : picked) labels.push_back(g.labels[static_cast<size_t>(v)]);
  Graph sub = Graph::from_edges(static_cast<int>(picked.size()), edges, std::move(feats),
                                std::move(labels), g.name);
  return {std::move(sub), std::move(picked)};
}

GraphView apply_spec(const Graph& g, const AugmentSpec& spec, uint64_t seed) {
  spec.validate();
  GraphView view;
  switch (spec.kind) {
    case AugmentKind::identity:
      view.graph = g;
      break;
    case AugmentKind::drop_edges:
      view.graph = drop_edges(g, spec.p, seed);
      break;
    case AugmentKind::mask_features:
      view.graph = mask_features(g, spec.p, seed);
      break;
    case AugmentKind::drop_nodes:
      view.graph = drop_nodes(g, spec.p, seed);
      break;
    case AugmentKind::shuffle_features:
      view.graph = shuffle_features(g, seed);
      break;
    case AugmentKind::ppr_diffusion:
      view.graph = g;
      view.propagation = ppr_diffusion(g, spec.alpha, spec.top_k);
      break;
    case AugmentKind::subgraph: {
      auto [sub, map] = sample_subgraph(g, spec.size > 0 ? std::min(spec.size, g.n) : g.n, seed);
      view.graph = std::move(sub);
      view.node_map = std::move(map);
      break;
    }
    case AugmentKind::compose: {
      view.graph = g;
      for (size_t i = 0; i < spec.children.size(); ++i) {
        GraphView child = apply_spec(view.graph, spec.children[i], mix_seed(seed, i));
        if (child.propagation) view.propagation = std::move(child.propagation);
        if (!child.node_map.empty()) {
          if (view.node_map.empty()) {
            view.node_map = child.node_map;
          } else {
            std::vector<int> composed;
            for (int id : child.node_map) composed.push_back(view.node_map[static_cast<size_t>(id)]);
            view.node_map = std::move(composed);
          }
        }
        view.graph = std::move(child.graph);
      }
      break;
    }
  }
  return view;
}

}  // namespace gssl
