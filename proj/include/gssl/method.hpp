#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gssl/augment.hpp"
#include "gssl/encoder.hpp"
#include "gssl/graph.hpp"
#include "gssl/optim.hpp"
#include "gssl/tape.hpp"

namespace gssl {

enum class MethodName { dgi, graphcl, mvgrl, gca, bgrl, infograph, graphmae };

const char* method_name_str(MethodName m);
MethodName method_name_from(const std::string& s);

struct MethodConfig {
  MethodName name = MethodName::dgi;
  float tau = 0.5f;          // NT-Xent temperature (graphcl, gca)
  double alpha = 0.2;        // diffusion teleport (mvgrl)
  int top_k = 64;            // diffusion sparsification (mvgrl)
  float gamma = 2.0f;        // scaled-cosine-error exponent (graphmae)
  double mask_rate = 0.5;    // node mask fraction (graphmae)
  float ema_decay = 0.99f;   // target decay (bgrl)
  double drop_edge_p = 0.3;  // per-view edge drop (graphcl/gca/bgrl)
  double mask_feat_p = 0.3;  // per-view feature mask (graphcl/gca/bgrl)
  double p_tau = 0.7;        // adaptive drop-probability ceiling (gca)
  std::vector<AugmentSpec> aug_specs;  // the two graphcl views; defaulted when empty

  void validate() const;
};

// NT-Xent over two aligned embedding sets: positives are matching rows, the
// negatives for each anchor are all other 2n-2 embeddings. Cosine
// similarities, log-sum-exp stabilized, mean over all 2n anchors.
Value nt_xent(Tape& t, Value z1, Value z2, float tau);

// Per-edge drop probabilities for the degree-centrality adaptive view,
// aligned with g.undirected_edges(). Regular graphs (s_max == s_mean) fall
// back to min(p_e, p_tau) everywhere.
std::vector<double> gca_edge_weights(const Graph& g, double p_e, double p_tau);

// target <- decay*target + (1-decay)*online, elementwise, outside any tape.
void ema_update(const std::vector<Parameter*>& online, const std::vector<Parameter*>& target,
                float decay);

// One self-supervised objective: view construction plus a differentiable
// loss, with method-specific inference embeddings.
class Method {
 public:
  virtual ~Method() = default;
  virtual MethodName name() const = 0;

  virtual bool supports_node() const = 0;
  virtual bool supports_graphset() const = 0;
  // Smallest usable batch on graph tasks (2 where in-batch negatives exist).
  virtual int min_batch() const { return 1; }

  virtual Value loss(Tape& t, const Graph& g, uint64_t seed);
  virtual Value loss_batch(Tape& t, const GraphSet& gs, const std::vector<int>& batch,
                           uint64_t seed);
  // Hook run after each optimizer step (BGRL's EMA update).
  virtual void after_step() {}

  virtual DenseMatrix embed_nodes(const Graph& g);
  virtual DenseMatrix embed_graphs(const GraphSet& gs);

  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  // Parameters the optimizer may touch (excludes EMA targets).
  virtual std::vector<Parameter*> trainable_params() { return store_.all(); }

  // Count of feature rows skipped by losses that cannot score them
  // (graphmae's zero-norm originals).
  int skipped_row_warnings() const { return skipped_row_warnings_; }

 protected:
  ParamStore store_;
  int skipped_row_warnings_ = 0;
};

// Builds the method named in mc. graph_task selects graph-level wiring
// (readout embeddings and head dimensions).
std::unique_ptr<Method> make_method(const MethodConfig& mc, const EncoderConfig& ec, int in_dim,
                                    bool graph_task, uint64_t seed);

}  // namespace gssl
