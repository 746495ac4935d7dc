#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gssl/graph.hpp"
#include "gssl/matrix.hpp"

namespace gssl {

// Frozen representations handed to the evaluator.
struct EmbeddingTable {
  int n = 0;
  int d = 0;
  DenseMatrix data;       // n x d
  std::vector<int> ids;   // original indices, length n

  void check_valid() const;
  static EmbeddingTable from_matrix(DenseMatrix m);
};

// One evaluation outcome: a primary metric with per-fold (or per-repeat)
// values plus any extra scalar metrics. std is the population convention.
struct EvalResult {
  std::string metric;
  double mean = 0.0;
  double std_dev = 0.0;
  std::vector<double> per_fold;
  std::map<std::string, double> extras;

  static EvalResult from_folds(std::string metric, std::vector<double> per_fold);
};

std::string eval_result_to_json(const EvalResult& r);

// Multinomial logistic regression (softmax cross-entropy + L2) trained
// full-batch with Adam on train-standardized embeddings; reports test
// accuracy with macro-F1 as an extra.
EvalResult logistic_probe(const EmbeddingTable& emb, const std::vector<int>& labels,
                          const Split& split, float l2, int epochs, float lr, uint64_t seed);

// Node-classification protocol: `repeats` random splits (or the fixed split
// for every repeat when provided), probe retrained per repeat.
EvalResult logistic_probe_repeats(const EmbeddingTable& emb, const std::vector<int>& labels,
                                  int repeats, double train_frac, double val_frac,
                                  double test_frac, float l2, int epochs, float lr, uint64_t seed,
                                  const Split* fixed_split = nullptr);

// One-vs-rest linear SVM (squared hinge + L2 of strength 1/c) trained with
// Adam, evaluated over k folds; reports mean/std accuracy across folds.
EvalResult linear_svm_cv(const EmbeddingTable& emb, const std::vector<int>& labels, int k, float c,
                         int epochs, uint64_t seed);

// Lloyd's k-means with k-means++ seeding, best of n_init inits by inertia;
// reports NMI (sqrt normalization, natural logs) against the labels.
EvalResult kmeans_nmi(const EmbeddingTable& emb, const std::vector<int>& labels, int k, int n_init,
                      int max_iter, uint64_t seed);

// Mean fraction of each node's top-k cosine neighbors (self excluded, ties
// to the lower index) sharing the query's label.
EvalResult similarity_search(const EmbeddingTable& emb, const std::vector<int>& labels, int k);

// (accuracy, macro-F1); classes absent from gold are excluded from the macro
// average, classes with an empty denominator score 0.
std::pair<double, double> classification_metrics(const std::vector<int>& pred,
                                                 const std::vector<int>& gold);

// Mean-centered PCA to 2 components via power iteration with deflation
// (tol 1e-7, max 1000 iterations); sign fixed so the largest-magnitude
// loading of each component is positive.
DenseMatrix project_2d(const EmbeddingTable& emb);

}  // namespace gssl
