#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "gssl/bundle.hpp"
#include "gssl/evaluator.hpp"
#include "gssl/method.hpp"

namespace gssl {

struct TrainConfig {
  int max_epochs = 500;
  int patience = 20;
  float min_delta = 1e-4f;
  float lr = 1e-3f;
  float weight_decay = 0.0f;
  int batch_size = 128;  // graph-set tasks only
  uint64_t seed = 0;
  std::string checkpoint_path;  // empty = no checkpoint
  std::ostream* log = nullptr;  // receives "epoch <i> loss <float>" lines

  void validate() const;
};

struct TrainReport {
  int epochs_run = 0;
  std::vector<float> loss_history;
  bool stopped_early = false;
  double wall_time_sec = 0.0;
};

// True iff the count of consecutive trailing epochs that failed to improve
// the running best by more than min_delta exceeds patience.
bool should_stop(const std::vector<float>& loss_history, int patience, float min_delta);

struct PretrainResult {
  std::unique_ptr<Method> method;
  TrainReport report;
};

// Trains the configured method on the dataset: full-graph steps for node
// data, shuffled minibatches for graph sets. Early stopping monitors the
// training loss; the best-loss parameters are restored at the end and
// written to tc.checkpoint_path when set.
PretrainResult pretrain(const Dataset& data, const MethodConfig& mc, const EncoderConfig& ec,
                        const TrainConfig& tc);

// Frozen representations for downstream evaluation: one row per node (node
// data) or one row per graph (graph sets).
EmbeddingTable extract_embeddings(Method& method, const Dataset& data);

}  // namespace gssl
