#include "gssl/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gssl/errors.hpp"
#include "gssl/rng.hpp"

namespace gssl {

namespace {

int sample_categorical(Rng& rng, const std::vector<double>& probs) {
  double r = rng.uniform();
  for (size_t i = 0; i < probs.size(); ++i) {
    r -= probs[i];
    if (r < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int flip_label(Rng& rng, int label, int n_classes, double noise) {
  if (!rng.bernoulli(noise)) return label;
  const int shift = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n_classes - 1)));
  return (label + shift) % n_classes;
}

// Ring of length `ring` plus a random attachment tree over the rest.
std::vector<std::pair<int, int>> ring_with_tree(Rng& rng, int n, int ring) {
  std::vector<std::pair<int, int>> edges;
  ring = std::min(ring, n);
  for (int i = 0; i < ring; ++i) edges.emplace_back(i, (i + 1) % ring);
  for (int v = ring; v < n; ++v)
    edges.emplace_back(v, static_cast<int>(rng.below(static_cast<uint64_t>(v))));
  return edges;
}

// Connected G(n, p): uniform spanning-path backbone plus Bernoulli extras.
std::vector<std::pair<int, int>> dense_connected(Rng& rng, int n, double p) {
  std::set<std::pair<int, int>> edges;
  auto perm = rng.permutation(static_cast<size_t>(n));
  for (int i = 0; i + 1 < n; ++i) {
    int u = static_cast<int>(perm[static_cast<size_t>(i)]);
    int v = static_cast<int>(perm[static_cast<size_t>(i) + 1]);
    edges.insert({std::min(u, v), std::max(u, v)});
  }
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.insert({u, v});
  return {edges.begin(), edges.end()};
}

}  // namespace

GraphSet make_molecule_bench(uint64_t seed) {
  constexpr int kGraphs = 188;
  constexpr int kFeatures = 7;
  constexpr double kLabelNoise = 0.115;
  // Class-conditional atom-type mixtures; class 1 is ring-6 heavy with more
  // hetero atoms, class 0 is ring-5 with a carbon-dominated mixture.
  const std::vector<double> mix1 = {0.45, 0.25, 0.15, 0.05, 0.04, 0.03, 0.03};
  const std::vector<double> mix0 = {0.70, 0.10, 0.05, 0.05, 0.04, 0.03, 0.03};

  Rng rng(seed);
  GraphSet gs;
  gs.n_classes = 2;
  gs.name = "mutag-synth";
  for (int g = 0; g < kGraphs; ++g) {
    const int concept_label = g < 125 ? 1 : 0;  // roughly the real 125/63 imbalance
    const int n = 10 + static_cast<int>(rng.below(17));  // 10..26 nodes
    auto edges = ring_with_tree(rng, n, concept_label == 1 ? 6 : 5);
    DenseMatrix feats(n, kFeatures);
    for (int v = 0; v < n; ++v)
      feats.at(v, sample_categorical(rng, concept_label == 1 ? mix1 : mix0)) = 1.0f;
    gs.graphs.push_back(Graph::from_edges(n, edges, std::move(feats), {},
                                          gs.name + "#" + std::to_string(g)));
    gs.labels.push_back(flip_label(rng, concept_label, 2, kLabelNoise));
  }
  gs.check_valid();
  return gs;
}

GraphSet make_social_bench(int n_graphs, int n_classes, int min_nodes, int max_nodes,
                           double label_noise, uint64_t seed) {
  if (n_classes < 2 || n_classes > 4) throw ConfigError("social bench: 2..4 classes");
  // Edge densities far enough apart that degree histograms separate classes.
  const std::vector<double> densities = {0.15, 0.45, 0.80, 0.95};

  Rng rng(seed);
  GraphSet gs;
  gs.n_classes = n_classes;
  gs.name = "social-synth";
  for (int g = 0; g < n_graphs; ++g) {
    const int concept_label = g % n_classes;
    const int n = min_nodes + static_cast<int>(rng.below(
                                  static_cast<uint64_t>(max_nodes - min_nodes + 1)));
    auto edges = dense_connected(rng, n, densities[static_cast<size_t>(concept_label)]);
    gs.graphs.push_back(Graph::from_edges(n, edges, DenseMatrix(n, 0), {},
                                          gs.name + "#" + std::to_string(g)));
    gs.labels.push_back(flip_label(rng, concept_label, n_classes, label_noise));
  }
  gs.check_valid();
  return gs;
}

Dataset make_cs_network_bench(uint64_t seed) {
  constexpr int kNodes = 11701;
  constexpr int kClasses = 10;
  constexpr int kFeatures = 300;
  constexpr double kLabelNoise = 0.20;
  const double p_in = 0.0200;
  const double p_out = 0.0011;

  Rng rng(seed);
  std::vector<int> block(static_cast<size_t>(kNodes));
  for (int v = 0; v < kNodes; ++v) block[static_cast<size_t>(v)] = v % kClasses;

  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < kNodes; ++u)
    for (int v = u + 1; v < kNodes; ++v) {
      const bool same = block[static_cast<size_t>(u)] == block[static_cast<size_t>(v)];
      if (rng.bernoulli(same ? p_in : p_out)) edges.emplace_back(u, v);
    }

  DenseMatrix feats(kNodes, kFeatures);
  std::vector<int> labels(static_cast<size_t>(kNodes));
  for (int v = 0; v < kNodes; ++v) {
    for (int j = 0; j < kFeatures; ++j)
      feats.at(v, j) = static_cast<float>(
          (j == block[static_cast<size_t>(v)] ? 1.0 : 0.0) + 0.8 * rng.normal());
    labels[static_cast<size_t>(v)] = flip_label(rng, block[static_cast<size_t>(v)], kClasses, kLabelNoise);
  }
  Graph g = Graph::from_edges(kNodes, edges, std::move(feats), std::move(labels), "wikics-synth");
  return make_node_dataset(std::move(g), kClasses);
}

bool is_generatable_dataset(const std::string& name) {
  return name == "sbm-demo" || name == "mutag" || name == "imdb-b" || name == "imdb-m" ||
         name == "wikics";
}

Dataset generate_bench_dataset(const std::string& name, uint64_t seed) {
  if (name == "sbm-demo") {
    Graph g = gen_sbm(50, 4, 0.3, 0.02, 8, 1.0, seed);
    g.name = "sbm-demo";
    const int n_classes = 4;
    return make_node_dataset(std::move(g), n_classes);
  }
  if (name == "mutag") return make_graphset_dataset(make_molecule_bench(seed));
  if (name == "imdb-b") {
    GraphSet gs = make_social_bench(1000, 2, 12, 26, 0.27, seed);
    gs.name = "imdb-b-synth";
    for (size_t i = 0; i < gs.graphs.size(); ++i)
      gs.graphs[i].name = gs.name + "#" + std::to_string(i);
    return make_graphset_dataset(std::move(gs));
  }
  if (name == "imdb-m") {
    GraphSet gs = make_social_bench(1500, 3, 8, 18, 0.50, seed);
    gs.name = "imdb-m-synth";
    for (size_t i = 0; i < gs.graphs.size(); ++i)
      gs.graphs[i].name = gs.name + "#" + std::to_string(i);
    return make_graphset_dataset(std::move(gs));
  }
  if (name == "wikics") return make_cs_network_bench(seed);
  throw ConfigError("no generator for dataset '" + name + "'");
}

}  // namespace gssl
