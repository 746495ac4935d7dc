#pragma once

#include <string>

#include "gssl/bundle.hpp"
#include "gssl/config.hpp"
#include "gssl/evaluator.hpp"
#include "gssl/trainer.hpp"

namespace gssl {

// Bundle directory for a config: ($GSSL_DATA_ROOT or dataset.root)/name.
std::string dataset_dir(const RunConfig& cfg);

// Loads the configured bundle, generating a deterministic synthetic stand-in
// (seeded by the dataset name, not the run seed) when the directory is
// missing and the name is generatable. Featureless graphs receive degree
// one-hot features with a shared cap.
Dataset load_dataset_for(const RunConfig& cfg);

// The downstream task implied by the data when none is forced.
std::string default_task(const Dataset& ds);

// Runs the configured evaluation protocol for `task` (node-clf, graph-clf,
// cluster, search) on frozen embeddings.
EvalResult evaluate_embeddings(const RunConfig& cfg, const Dataset& ds, const EmbeddingTable& emb,
                               const std::string& task);

struct ReproduceOutcome {
  EvalResult result;
  TrainReport report;
  std::string result_json;  // contents written to <out>/result.json
};

// pretrain -> embed -> evaluate; writes checkpoint.bin, embeddings.bin,
// train.log and result.json under out_dir.
ReproduceOutcome run_reproduce(const RunConfig& cfg, const std::string& out_dir);

}  // namespace gssl
