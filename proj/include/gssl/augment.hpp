#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "gssl/graph.hpp"

namespace gssl {

enum class AugmentKind {
  identity,
  drop_edges,
  mask_features,
  drop_nodes,
  shuffle_features,
  ppr_diffusion,
  subgraph,
  compose,
};

// Declarative view recipe; expressible in config files.
struct AugmentSpec {
  AugmentKind kind = AugmentKind::identity;
  double p = 0.0;       // drop / mask rate
  double alpha = 0.2;   // diffusion teleport
  int top_k = 64;       // diffusion sparsification
  int size = 0;         // subgraph node budget
  std::vector<AugmentSpec> children;  // compose

  static AugmentSpec identity_spec() { return {}; }
  static AugmentSpec drop_edges_spec(double p);
  static AugmentSpec mask_features_spec(double p);
  static AugmentSpec compose_spec(std::vector<AugmentSpec> children);
  void validate() const;
};

// Each undirected edge removed independently with probability p.
Graph drop_edges(const Graph& g, double p, uint64_t seed);

// Edge e removed with its own probability probs[e]; probs aligned with
// g.undirected_edges() order. Used by the adaptive (GCA) view.
Graph drop_edges_weighted(const Graph& g, const std::vector<double>& probs, uint64_t seed);

// Zeroes round(p*d) feature columns chosen without replacement.
Graph mask_features(const Graph& g, double p, uint64_t seed);

// Removes round(p*n) nodes; survivors keep their relative order.
Graph drop_nodes(const Graph& g, double p, uint64_t seed);

// Permutes feature rows uniformly; the structure is untouched. This is the
// corruption used for mutual-information negatives.
Graph shuffle_features(const Graph& g, uint64_t seed);

// S = alpha (I - (1-alpha) A_hat)^{-1}, dense solve for n <= 4000 and a
// truncated series otherwise (residual tolerance 1e-6), then per-row top_k
// sparsification with row-sum-preserving renormalization.
SparseMatrix ppr_diffusion(const Graph& g, double alpha, int top_k);

// Random walk with restart (restart 0.2) until `size` distinct nodes are
// collected or the frontier is exhausted; returns the induced subgraph and
// the map from new ids to original ids.
std::pair<Graph, std::vector<int>> sample_subgraph(const Graph& g, int size, uint64_t seed);

// A generated view: a graph (possibly with a replacement adjacency used for
// propagation, as diffusion produces).
struct GraphView {
  Graph graph;
  // Set when the view replaces the propagation matrix rather than the graph.
  std::optional<SparseMatrix> propagation;
  std::vector<int> node_map;  // new id -> original id; empty means identity
};

GraphView apply_spec(const Graph& g, const AugmentSpec& spec, uint64_t seed);

}  // namespace gssl
