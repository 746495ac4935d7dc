#include "gssl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "gssl/errors.hpp"
#include "gssl/io.hpp"
#include "gssl/rng.hpp"

namespace gssl {

void TrainConfig::validate() const {
  if (max_epochs < 1) throw ConfigError("trainer: max_epochs must be >= 1");
  if (patience < 0) throw ConfigError("trainer: patience must be >= 0");
  if (min_delta < 0.0f) throw ConfigError("trainer: min_delta must be >= 0");
  if (batch_size < 1) throw ConfigError("trainer: batch_size must be >= 1");
}

bool should_stop(const std::vector<float>& loss_history, int patience, float min_delta) {
  if (loss_history.empty()) throw ContractError("should_stop: empty history");
  float best = std::numeric_limits<float>::infinity();
  int stale = 0;
  for (float loss : loss_history) {
    if (loss < best - min_delta) {
      best = loss;
      stale = 0;
    } else {
      ++stale;
    }
  }
  return stale > patience;
}

namespace {

std::vector<DenseMatrix> snapshot_values(const std::vector<Parameter*>& params) {
  std::vector<DenseMatrix> out;
  out.reserve(params.size());
  for (const Parameter* p : params) out.push_back(p->value);
  return out;
}

void restore_values(const std::vector<Parameter*>& params, const std::vector<DenseMatrix>& snap) {
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = snap[i];
}

}  // namespace

PretrainResult pretrain(const Dataset& data, const MethodConfig& mc, const EncoderConfig& ec,
                        const TrainConfig& tc) {
  tc.validate();
  const auto t_start = std::chrono::steady_clock::now();

  const bool graph_task = !data.is_node();
  const int in_dim = graph_task ? data.set.feature_dim() : data.graph.feature_dim();
  if (in_dim < 1)
    throw TrainError("dataset has no node features; synthesize degree features first");

  auto method = make_method(mc, ec, in_dim, graph_task, tc.seed);
  if (graph_task && !method->supports_graphset())
    throw TrainError(std::string(method_name_str(mc.name)) + " cannot train on a graph set");
  if (!graph_task && !method->supports_node())
    throw TrainError(std::string(method_name_str(mc.name)) + " cannot train on a single graph");
  if (graph_task && static_cast<int>(data.set.size()) < method->min_batch())
    throw TrainError("graph set smaller than the method's minimum batch");

  AdamConfig adam;
  adam.lr = tc.lr;
  adam.weight_decay = tc.weight_decay;

  TrainReport report;
  float best_loss = std::numeric_limits<float>::infinity();
  auto trainable = method->trainable_params();
  std::vector<DenseMatrix> best_values = snapshot_values(trainable);

  for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    const uint64_t epoch_seed = mix_seed(tc.seed, 0x45504F43ULL + static_cast<uint64_t>(epoch));
    double epoch_loss = 0.0;
    // The epoch loss is measured against the parameters at epoch start, so
    // best-loss restoration must snapshot before any step of the epoch.
    std::vector<DenseMatrix> pre_epoch = snapshot_values(trainable);

    if (!graph_task) {
      Tape t;
      Value loss = method->loss(t, data.graph, epoch_seed);
      epoch_loss = static_cast<double>(t.value(loss).data[0]);
      if (!std::isfinite(epoch_loss))
        throw TrainError("non-finite loss at epoch " + std::to_string(epoch));
      t.backward(loss);
      adam_step(trainable, adam);
      method->after_step();
    } else {
      Rng shuffle_rng(epoch_seed);
      auto perm = shuffle_rng.permutation(data.set.size());
      std::vector<std::vector<int>> batches;
      for (size_t i = 0; i < perm.size(); i += static_cast<size_t>(tc.batch_size)) {
        std::vector<int> batch;
        for (size_t j = i; j < std::min(perm.size(), i + static_cast<size_t>(tc.batch_size)); ++j)
          batch.push_back(static_cast<int>(perm[j]));
        batches.push_back(std::move(batch));
      }
      // A trailing batch below the method's minimum folds into the previous one.
      if (batches.size() > 1 &&
          static_cast<int>(batches.back().size()) < method->min_batch()) {
        auto tail = std::move(batches.back());
        batches.pop_back();
        for (int idx : tail) batches.back().push_back(idx);
      }

      double sum = 0.0;
      for (size_t b = 0; b < batches.size(); ++b) {
        Tape t;
        Value loss = method->loss_batch(t, data.set, batches[b], mix_seed(epoch_seed, b));
        const double lv = static_cast<double>(t.value(loss).data[0]);
        if (!std::isfinite(lv))
          throw TrainError("non-finite loss at epoch " + std::to_string(epoch));
        sum += lv;
        t.backward(loss);
        adam_step(trainable, adam);
        method->after_step();
      }
      epoch_loss = sum / static_cast<double>(batches.size());
    }

    report.loss_history.push_back(static_cast<float>(epoch_loss));
    report.epochs_run = epoch;
    if (tc.log) (*tc.log) << "epoch " << epoch << " loss " << epoch_loss << "\n";

    if (static_cast<float>(epoch_loss) < best_loss) {
      best_loss = static_cast<float>(epoch_loss);
      best_values = std::move(pre_epoch);
    }
    if (should_stop(report.loss_history, tc.patience, tc.min_delta)) {
      report.stopped_early = true;
      break;
    }
  }

  restore_values(trainable, best_values);
  if (!tc.checkpoint_path.empty()) save_checkpoint(method->params(), tc.checkpoint_path);

  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {std::move(method), std::move(report)};
}

EmbeddingTable extract_embeddings(Method& method, const Dataset& data) {
  DenseMatrix m = data.is_node() ? method.embed_nodes(data.graph) : method.embed_graphs(data.set);
  EmbeddingTable table = EmbeddingTable::from_matrix(std::move(m));
  table.check_valid();
  return table;
}

}  // namespace gssl
