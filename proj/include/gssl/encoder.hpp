#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gssl/graph.hpp"
#include "gssl/optim.hpp"
#include "gssl/tape.hpp"

namespace gssl {

enum class EncoderKind { gcn, gin };
enum class Activation { relu, prelu };
enum class Readout { mean, sum, max };

struct EncoderConfig {
  EncoderKind kind = EncoderKind::gcn;
  int layers = 2;
  int hidden_dim = 256;
  Activation activation = Activation::relu;
  Readout readout = Readout::mean;

  void validate() const;
};

// Graph encoder (GCN or GIN) whose parameters live in a ParamStore under a
// name prefix. GCN layers compute act(P H W + b) with P the supplied
// propagation matrix (normalized adjacency or a diffusion matrix); GIN
// layers compute MLP((1+eps) H + A H) with A the raw adjacency and MLP a
// two-layer perceptron with a ReLU between.
class Encoder {
 public:
  Encoder(const EncoderConfig& cfg, int in_dim, ParamStore& store, const std::string& prefix,
          uint64_t seed);

  // Returns every layer's output (size cfg.layers); callers pick the last or
  // concatenate. With frozen=true parameters enter the tape as constants.
  std::vector<Value> forward(Tape& t, const SparseMatrix& prop, Value x, bool frozen = false) const;

  int in_dim() const { return in_dim_; }
  int out_dim() const { return cfg_.hidden_dim; }
  int layer_concat_dim() const { return cfg_.layers * cfg_.hidden_dim; }
  const EncoderConfig& config() const { return cfg_; }
  std::vector<Parameter*> params() const;

 private:
  struct Layer {
    // GCN
    Parameter* w = nullptr;
    Parameter* b = nullptr;
    Parameter* prelu_slope = nullptr;
    // GIN
    Parameter* eps = nullptr;
    Parameter* w1 = nullptr;
    Parameter* b1 = nullptr;
    Parameter* w2 = nullptr;
    Parameter* b2 = nullptr;
  };
  EncoderConfig cfg_;
  int in_dim_;
  std::vector<Layer> layers_;
};

// Two-layer perceptron head (ReLU hidden, linear output).
class MlpHead {
 public:
  MlpHead(int in_dim, int hidden_dim, int out_dim, ParamStore& store, const std::string& prefix,
          uint64_t seed);
  Value forward(Tape& t, Value x, bool frozen = false) const;
  int out_dim() const { return out_dim_; }
  std::vector<Parameter*> params() const { return {w1_, b1_, w2_, b2_}; }

 private:
  Parameter* w1_;
  Parameter* b1_;
  Parameter* w2_;
  Parameter* b2_;
  int out_dim_;
};

// Column-wise pooling of node embeddings into a 1 x d graph embedding.
Value readout(Tape& t, Value h, Readout kind);
DenseMatrix readout(const DenseMatrix& h, Readout kind);

// logits_i = h_i . (W s^T); no sigmoid applied.
Value bilinear_score(Tape& t, Value h, Value summary, Value w);

// Helper to bind a parameter either trainably or as a constant.
Value bind_param(Tape& t, Parameter& p, bool frozen);

}  // namespace gssl
