#include "gssl/encoder.hpp"

#include <algorithm>

#include "gssl/errors.hpp"
#include "gssl/rng.hpp"

namespace gssl {

void EncoderConfig::validate() const {
  if (layers < 1) throw ConfigError("encoder: layers must be >= 1");
  if (hidden_dim < 1) throw ConfigError("encoder: hidden_dim must be >= 1");
}

Value bind_param(Tape& t, Parameter& p, bool frozen) {
  return frozen ? t.constant(p.value) : t.param(p);
}

Encoder::Encoder(const EncoderConfig& cfg, int in_dim, ParamStore& store,
                 const std::string& prefix, uint64_t seed)
    : cfg_(cfg), in_dim_(in_dim) {
  cfg_.validate();
  if (in_dim < 1) throw ShapeError("encoder: input dim must be >= 1");
  for (int l = 0; l < cfg_.layers; ++l) {
    const int d_in = l == 0 ? in_dim : cfg_.hidden_dim;
    const int d_out = cfg_.hidden_dim;
    const std::string base = prefix + ".l" + std::to_string(l);
    Layer layer;
    if (cfg_.kind == EncoderKind::gcn) {
      layer.w = &store.create(base + ".W", xavier_init(d_in, d_out, mix_seed(seed, 2 * l)));
      layer.b = &store.create(base + ".b", DenseMatrix(1, d_out));
      if (cfg_.activation == Activation::prelu)
        layer.prelu_slope = &store.create(base + ".prelu", DenseMatrix(1, 1, 0.25f));
    } else {
      layer.eps = &store.create(base + ".eps", DenseMatrix(1, 1, 0.0f));
      layer.w1 = &store.create(base + ".W1", xavier_init(d_in, d_out, mix_seed(seed, 4 * l)));
      layer.b1 = &store.create(base + ".b1", DenseMatrix(1, d_out));
      layer.w2 = &store.create(base + ".W2", xavier_init(d_out, d_out, mix_seed(seed, 4 * l + 1)));
      layer.b2 = &store.create(base + ".b2", DenseMatrix(1, d_out));
    }
    layers_.push_back(layer);
  }
}

std::vector<Value> Encoder::forward(Tape& t, const SparseMatrix& prop, Value x,
                                    bool frozen) const {
  std::vector<Value> outs;
  Value h = x;
  for (const Layer& layer : layers_) {
    if (cfg_.kind == EncoderKind::gcn) {
      Value agg = t.spmm(prop, h);
      Value z = t.add_row_bias(t.matmul(agg, bind_param(t, *layer.w, frozen)),
                               bind_param(t, *layer.b, frozen));
      if (cfg_.activation == Activation::prelu)
        h = t.prelu(z, bind_param(t, *layer.prelu_slope, frozen));
      else
        h = t.relu(z);
    } else {
      // (1 + eps) H + A H, then the per-layer MLP. eps is a learnable 1x1,
      // broadcast to H's shape via rank-1 matmuls.
      Value eps_v = bind_param(t, *layer.eps, frozen);
      Value eps_col = t.matmul(t.constant(DenseMatrix(h.rows, 1, 1.0f)), eps_v);
      Value eps_full = t.matmul(eps_col, t.constant(DenseMatrix(1, h.cols, 1.0f)));
      Value scaled_self = t.add(h, t.mul(h, eps_full));
      Value agg = t.add(scaled_self, t.spmm(prop, h));
      Value z1 = t.relu(t.add_row_bias(t.matmul(agg, bind_param(t, *layer.w1, frozen)),
                                       bind_param(t, *layer.b1, frozen)));
      h = t.add_row_bias(t.matmul(z1, bind_param(t, *layer.w2, frozen)),
                         bind_param(t, *layer.b2, frozen));
    }
    outs.push_back(h);
  }
  return outs;
}

std::vector<Parameter*> Encoder::params() const {
  std::vector<Parameter*> out;
  for (const Layer& l : layers_)
    for (Parameter* p : {l.w, l.b, l.prelu_slope, l.eps, l.w1, l.b1, l.w2, l.b2})
      if (p) out.push_back(p);
  return out;
}

MlpHead::MlpHead(int in_dim, int hidden_dim, int out_dim, ParamStore& store,
                 const std::string& prefix, uint64_t seed)
    : out_dim_(out_dim) {
  w1_ = &store.create(prefix + ".W1", xavier_init(in_dim, hidden_dim, mix_seed(seed, 0)));
  b1_ = &store.create(prefix + ".b1", DenseMatrix(1, hidden_dim));
  w2_ = &store.create(prefix + ".W2", xavier_init(hidden_dim, out_dim, mix_seed(seed, 1)));
  b2_ = &store.create(prefix + ".b2", DenseMatrix(1, out_dim));
}

Value MlpHead::forward(Tape& t, Value x, bool frozen) const {
  Value z = t.relu(t.add_row_bias(t.matmul(x, bind_param(t, *w1_, frozen)),
                                  bind_param(t, *b1_, frozen)));
  return t.add_row_bias(t.matmul(z, bind_param(t, *w2_, frozen)), bind_param(t, *b2_, frozen));
}

Value readout(Tape& t, Value h, Readout kind) {
  if (h.rows < 1) throw ContractError("readout: empty input");
  switch (kind) {
    case Readout::mean: return t.col_mean(h);
    case Readout::sum: return t.col_sum(h);
    case Readout::max: return t.col_max(h);
  }
  throw ContractError("readout: unknown kind");
}

DenseMatrix readout(const DenseMatrix& h, Readout kind) {
  if (h.rows < 1) throw ContractError("readout: empty input");
  DenseMatrix out(1, h.cols);
  for (int j = 0; j < h.cols; ++j) {
    if (kind == Readout::max) {
      float best = h.at(0, j);
      for (int i = 1; i < h.rows; ++i) best = std::max(best, h.at(i, j));
      out.data[static_cast<size_t>(j)] = best;
    } else {
      double acc = 0.0;
      for (int i = 0; i < h.rows; ++i) acc += h.at(i, j);
      if (kind == Readout::mean) acc /= h.rows;
      out.data[static_cast<size_t>(j)] = static_cast<float>(acc);
    }
  }
  return out;
}

Value bilinear_score(Tape& t, Value h, Value summary, Value w) {
  // W s^T is d x 1; h (n x d) times it gives the per-node logits.
  return t.matmul(h, t.matmul_nt(w, summary));
}

}  // namespace gssl
