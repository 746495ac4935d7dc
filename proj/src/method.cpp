#include "gssl/method.hpp"

#include <algorithm>
#include <cmath>

#include "gssl/errors.hpp"
#include "gssl/rng.hpp"

namespace gssl {

const char* method_name_str(MethodName m) {
  switch (m) {
    case MethodName::dgi: return "dgi";
    case MethodName::graphcl: return "graphcl";
    case MethodName::mvgrl: return "mvgrl";
    case MethodName::gca: return "gca";
    case MethodName::bgrl: return "bgrl";
    case MethodName::infograph: return "infograph";
    case MethodName::graphmae: return "graphmae";
  }
  return "?";
}

MethodName method_name_from(const std::string& s) {
  for (MethodName m : {MethodName::dgi, MethodName::graphcl, MethodName::mvgrl, MethodName::gca,
                       MethodName::bgrl, MethodName::infograph, MethodName::graphmae})
    if (s == method_name_str(m)) return m;
  throw ConfigError("unknown method '" + s + "'");
}

void MethodConfig::validate() const {
  if (tau <= 0.0f) throw ConfigError("method: tau must be > 0");
  if (gamma < 1.0f) throw ConfigError("method: gamma must be >= 1");
  if (mask_rate <= 0.0 || mask_rate > 1.0) throw ConfigError("method: mask_rate must be in (0,1]");
  if (ema_decay < 0.0f || ema_decay > 1.0f) throw ConfigError("method: ema_decay must be in [0,1]");
  if (p_tau < 0.0 || p_tau > 1.0) throw ConfigError("method: p_tau must be in [0,1]");
  if (drop_edge_p < 0.0 || drop_edge_p > 1.0) throw ConfigError("method: drop_edge_p in [0,1]");
  if (mask_feat_p < 0.0 || mask_feat_p > 1.0) throw ConfigError("method: mask_feat_p in [0,1]");
  if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("method: alpha must be in (0,1]");
  if (top_k < 1) throw ConfigError("method: top_k must be >= 1");
  if (!aug_specs.empty() && aug_specs.size() != 2)
    throw ConfigError("method: aug_specs must hold exactly two views");
  for (const auto& s : aug_specs) s.validate();
}

Value nt_xent(Tape& t, Value z1, Value z2, float tau) {
  if (z1.rows != z2.rows || z1.cols != z2.cols)
    throw ShapeError("nt_xent: embedding shapes differ");
  const int n = z1.rows;
  Value z = t.concat_rows(t.row_l2_normalize(z1), t.row_l2_normalize(z2));
  Value sims = t.scale(t.matmul_nt(z, z), 1.0f / tau);

  DenseMatrix keep(2 * n, 2 * n, 1.0f);
  for (int i = 0; i < 2 * n; ++i) keep.at(i, i) = 0.0f;
  Value lse = t.masked_row_lse(sims, std::move(keep));

  std::vector<std::pair<int, int>> pos;
  pos.reserve(static_cast<size_t>(2 * n));
  for (int i = 0; i < n; ++i) pos.emplace_back(i, n + i);
  for (int i = 0; i < n; ++i) pos.emplace_back(n + i, i);
  Value positives = t.gather_entries(sims, std::move(pos));

  return t.mean_all(t.add(lse, t.scale(positives, -1.0f)));
}

std::vector<double> gca_edge_weights(const Graph& g, double p_e, double p_tau) {
  const auto edges = g.undirected_edges();
  std::vector<double> cent(edges.size());
  for (size_t i = 0; i < edges.size(); ++i) {
    const auto [u, v] = edges[i];
    cent[i] = 0.5 * (std::log(static_cast<double>(g.degree(u) + 1)) +
                     std::log(static_cast<double>(g.degree(v) + 1)));
  }
  if (edges.empty()) return {};
  double s_max = cent[0], s_sum = 0.0;
  for (double c : cent) {
    s_max = std::max(s_max, c);
    s_sum += c;
  }
  const double s_mean = s_sum / static_cast<double>(cent.size());
  std::vector<double> probs(edges.size());
  if (s_max == s_mean) {
    std::fill(probs.begin(), probs.end(), std::min(p_e, p_tau));
  } else {
    for (size_t i = 0; i < edges.size(); ++i)
      probs[i] = std::min((s_max - cent[i]) / (s_max - s_mean) * p_e, p_tau);
  }
  return probs;
}

void ema_update(const std::vector<Parameter*>& online, const std::vector<Parameter*>& target,
                float decay) {
  if (online.size() != target.size()) throw ShapeError("ema_update: parameter count mismatch");
  for (size_t i = 0; i < online.size(); ++i) {
    if (!online[i]->value.same_shape(target[i]->value))
      throw ShapeError("ema_update: shape mismatch at " + online[i]->name);
    for (size_t e = 0; e < target[i]->value.size(); ++e)
      target[i]->value.data[e] =
          decay * target[i]->value.data[e] + (1.0f - decay) * online[i]->value.data[e];
  }
}

Value Method::loss(Tape&, const Graph&, uint64_t) {
  throw MethodError(std::string(method_name_str(name())) + " does not support node-level data");
}

Value Method::loss_batch(Tape&, const GraphSet&, const std::vector<int>&, uint64_t) {
  throw MethodError(std::string(method_name_str(name())) + " does not support graph-set data");
}

DenseMatrix Method::embed_nodes(const Graph&) {
  throw MethodError(std::string(method_name_str(name())) + " has no node embeddings");
}

DenseMatrix Method::embed_graphs(const GraphSet&) {
  throw MethodError(std::string(method_name_str(name())) + " has no graph embeddings");
}

namespace {

// mean over entries of softplus(sign * x); the logits-form BCE building block.
Value mean_softplus(Tape& t, Value x, float sign) {
  return t.mean_all(t.softplus(sign > 0 ? x : t.scale(x, -1.0f)));
}

Value last_layer(Tape& t, const Encoder& enc, const SparseMatrix& prop, Value x,
                 bool frozen = false) {
  return enc.forward(t, prop, x, frozen).back();
}

// Layer-concatenated node representations (n x layers*hidden).
Value layer_concat(Tape& t, const std::vector<Value>& layers) {
  Value out = layers.front();
  for (size_t i = 1; i < layers.size(); ++i) out = t.concat_cols(out, layers[i]);
  return out;
}

// Layer-concatenated graph readout (1 x layers*hidden).
Value graph_embedding(Tape& t, const std::vector<Value>& layers, Readout kind) {
  Value out = readout(t, layers.front(), kind);
  for (size_t i = 1; i < layers.size(); ++i)
    out = t.concat_cols(out, readout(t, layers[i], kind));
  return out;
}

struct Linear {
  Parameter* w = nullptr;
  Parameter* b = nullptr;
  Linear() = default;
  Linear(int in, int out, ParamStore& store, const std::string& prefix, uint64_t seed) {
    w = &store.create(prefix + ".W", xavier_init(in, out, seed));
    b = &store.create(prefix + ".b", DenseMatrix(1, out));
  }
  Value forward(Tape& t, Value x, bool frozen = false) const {
    return t.add_row_bias(t.matmul(x, bind_param(t, *w, frozen)), bind_param(t, *b, frozen));
  }
};

void require_features(const Graph& g, const char* method) {
  if (g.feature_dim() == 0)
    throw MethodError(std::string(method) + " requires node features (d >= 1)");
}

// ---------------------------------------------------------------------------

class DgiMethod final : public Method {
 public:
  DgiMethod(const MethodConfig& mc, const EncoderConfig& ec, int in_dim, uint64_t seed)
      : mc_(mc), ec_(ec) {
    enc_ = std::make_unique<Encoder>(ec_, in_dim, store_, "enc", mix_seed(seed, 1));
    disc_w_ = &store_.create("disc.W",
                             xavier_init(ec_.hidden_dim, ec_.hidden_dim, mix_seed(seed, 2)));
  }
  MethodName name() const override { return MethodName::dgi; }
  bool supports_node() const override { return true; }
  bool supports_graphset() const override { return false; }

  Value loss(Tape& t, const Graph& g, uint64_t seed) override {
    require_features(g, "dgi");
    const SparseMatrix adj = sym_norm_adj(g);
    Value h = last_layer(t, *enc_, adj, t.constant(g.features));
    Value summary = t.sigmoid(t.col_mean(h));
    const Graph corrupted = shuffle_features(g, seed);
    Value h_neg = last_layer(t, *enc_, adj, t.constant(corrupted.features));
    Value w = t.param(*disc_w_);
    Value pos_logits = bilinear_score(t, h, summary, w);
    Value neg_logits = bilinear_score(t, h_neg, summary, w);
    return t.scale(t.add(mean_softplus(t, pos_logits, -1.0f), mean_softplus(t, neg_logits, 1.0f)),
                   0.5f);
  }

  DenseMatrix embed_nodes(const Graph& g) override {
    Tape t;
    return t.value(last_layer(t, *enc_, sym_norm_adj(g), t.constant(g.features), true));
  }

 private:
  MethodConfig mc_;
  EncoderConfig ec_;
  std::unique_ptr<Encoder> enc_;
  Parameter* disc_w_;
};

// ---------------------------------------------------------------------------

class GraphClMethod final : public Method {
 public:
  GraphClMethod(const MethodConfig& mc, const EncoderConfig& ec, int in_dim, bool graph_task,
                uint64_t seed)
      : mc_(mc), ec_(ec), graph_task_(graph_task) {
    enc_ = std::make_unique<Encoder>(ec_, in_dim, store_, "enc", mix_seed(seed, 1));
    const int embed_dim = graph_task_ ? enc_->layer_concat_dim() : enc_->out_dim();
    head_ = std::make_unique<MlpHead>(embed_dim, embed_dim, embed_dim, store_, "head",
                                      mix_seed(seed, 2));
    if (mc_.aug_specs.size() == 2) {
      specs_ = {mc_.aug_specs[0], mc_.aug_specs[1]};
    } else if (graph_task_) {
      AugmentSpec de = AugmentSpec::drop_edges_spec(mc_.drop_edge_p);
      AugmentSpec dn;
      dn.kind = AugmentKind::drop_nodes;
      dn.p = 0.2;
      specs_ = {de, dn};
    } else {
      AugmentSpec v = AugmentSpec::compose_spec({AugmentSpec::drop_edges_spec(mc_.drop_edge_p),
                                                 AugmentSpec::mask_features_spec(mc_.mask_feat_p)});
      specs_ = {v, v};
    }
  }
  MethodName name() const override { return MethodName::graphcl; }
  bool supports_node() const override { return true; }
  bool supports_graphset() const override { return true; }
  int min_batch() const override { return 2; }

  Value loss(Tape& t, const Graph& g, uint64_t seed) override {
    require_features(g, "graphcl");
    Value z1 = node_view_embedding(t, g, specs_[0], mix_seed(seed, 1));
    Value z2 = node_view_embedding(t, g, specs_[1], mix_seed(seed, 2));
    return nt_xent(t, z1, z2, mc_.tau);
  }

  Value loss_batch(Tape& t, const GraphSet& gs, const std::vector<int>& batch,
                   uint64_t seed) override {
    if (batch.size() < 2) throw MethodError("graphcl: batch of size 1 has no negatives");
    Value z1 = batch_view_embeddings(t, gs, batch, specs_[0], mix_seed(seed, 1));
    Value z2 = batch_view_embeddings(t, gs, batch, specs_[1], mix_seed(seed, 2));
    return nt_xent(t, z1, z2, mc_.tau);
  }

  DenseMatrix embed_nodes(const Graph& g) override {
    Tape t;
    return t.value(last_layer(t, *enc_, sym_norm_adj(g), t.constant(g.features), true));
  }

  DenseMatrix embed_graphs(const GraphSet& gs) override {
    Tape t;
    Value rows = frozen_graph_rows(t, gs);
    return t.value(rows);
  }

 private:
  Value node_view_embedding(Tape& t, const Graph& g, const AugmentSpec& spec, uint64_t seed) {
    GraphView view = apply_spec(g, spec, seed);
    if (view.graph.n != g.n)
      throw MethodError("graphcl: node-level views must preserve the node set");
    const SparseMatrix prop =
        view.propagation ? *view.propagation : sym_norm_adj(view.graph);
    Value h = last_layer(t, *enc_, prop, t.constant(view.graph.features));
    return head_->forward(t, h);
  }

  Value batch_view_embeddings(Tape& t, const GraphSet& gs, const std::vector<int>& batch,
                              const AugmentSpec& spec, uint64_t seed) {
    Value stacked;
    for (size_t bi = 0; bi < batch.size(); ++bi) {
      const Graph& g = gs.graphs[static_cast<size_t>(batch[bi])];
      GraphView view = apply_spec(g, spec, mix_seed(seed, bi));
      const SparseMatrix prop =
          view.propagation ? *view.propagation
                           : (ec_.kind == EncoderKind::gin ? view.graph.adjacency
                                                           : sym_norm_adj(view.graph));
      auto layers = enc_->forward(t, prop, t.constant(view.graph.features));
      Value emb = graph_embedding(t, layers, ec_.readout);
      stacked = bi == 0 ? emb : t.concat_rows(stacked, emb);
    }
    return head_->forward(t, stacked);
  }

  Value frozen_graph_rows(Tape& t, const GraphSet& gs) {
    Value stacked;
    for (size_t i = 0; i < gs.size(); ++i) {
      const Graph& g = gs.graphs[i];
      const SparseMatrix prop =
          ec_.kind == EncoderKind::gin ? g.adjacency : sym_norm_adj(g);
      auto layers = enc_->forward(t, prop, t.constant(g.features), true);
      Value emb = graph_embedding(t, layers, ec_.readout);
      stacked = i == 0 ? emb : t.concat_rows(stacked, emb);
    }
    return stacked;
  }

  MethodConfig mc_;
  EncoderConfig ec_;
  bool graph_task_;
  std::unique_ptr<Encoder> enc_;
  std::unique_ptr<MlpHead> head_;
  std::vector<AugmentSpec> specs_;
};

// ---------------------------------------------------------------------------

class MvgrlMethod final : public Method {
 public:
  MvgrlMethod(const MethodConfig& mc, const EncoderConfig& ec, int in_dim, uint64_t seed)
      : mc_(mc), ec_(ec) {
    enc_a_ = std::make_unique<Encoder>(ec_, in_dim, store_, "encA", mix_seed(seed, 1));
    enc_b_ = std::make_unique<Encoder>(ec_, in_dim, store_, "encB", mix_seed(seed, 2));
    disc_w_ = &store_.create("disc.W",
                             xavier_init(ec_.hidden_dim, ec_.hidden_dim, mix_seed(seed, 3)));
  }
  MethodName name() const override { return MethodName::mvgrl; }
  bool supports_node() const override { return true; }
  bool supports_graphset() const override { return false; }

  Value loss(Tape& t, const Graph& g, uint64_t seed) override {
    require_features(g, "mvgrl");
    ensure_views(g);
    Value x = t.constant(g.features);
    Value h_a = last_layer(t, *enc_a_, *adj_, x);
    Value h_b = last_layer(t, *enc_b_, *diff_, x);
    Value s_a = t.sigmoid(t.col_mean(h_a));
    Value s_b = t.sigmoid(t.col_mean(h_b));

    const Graph corrupted = shuffle_features(g, seed);
    Value xc = t.constant(corrupted.features);
    Value hn_a = last_layer(t, *enc_a_, *adj_, xc);
    Value hn_b = last_layer(t, *enc_b_, *diff_, xc);

    Value w = t.param(*disc_w_);
    // Cross-view pairs: node reps of one view against the summary of the other.
    Value pos_a = bilinear_score(t, h_a, s_b, w);
    Value pos_b = bilinear_score(t, h_b, s_a, w);
    Value neg_a = bilinear_score(t, hn_a, s_b, w);
    Value neg_b = bilinear_score(t, hn_b, s_a, w);
    Value sum = t.add(t.add(mean_softplus(t, pos_a, -1.0f), mean_softplus(t, pos_b, -1.0f)),
                      t.add(mean_softplus(t, neg_a, 1.0f), mean_softplus(t, neg_b, 1.0f)));
    return t.scale(sum, 0.25f);
  }

  DenseMatrix embed_nodes(const Graph& g) override {
    ensure_views(g);
    Tape t;
    Value x = t.constant(g.features);
    Value h = t.add(last_layer(t, *enc_a_, *adj_, x, true), last_layer(t, *enc_b_, *diff_, x, true));
    return t.value(h);
  }

 private:
  void ensure_views(const Graph& g) {
    if (adj_ && cached_n_ == g.n && cached_nnz_ == g.adjacency.nnz()) return;
    adj_ = sym_norm_adj(g);
    diff_ = ppr_diffusion(g, mc_.alpha, mc_.top_k);
    cached_n_ = g.n;
    cached_nnz_ = g.adjacency.nnz();
  }

  MethodConfig mc_;
  EncoderConfig ec_;
  std::unique_ptr<Encoder> enc_a_;
  std::unique_ptr<Encoder> enc_b_;
  Parameter* disc_w_;
  std::optional<SparseMatrix> adj_;
  std::optional<SparseMatrix> diff_;
  int cached_n_ = -1;
  int cached_nnz_ = -1;
};

// ---------------------------------------------------------------------------

class GcaMethod final : public Method {
 public:
  GcaMethod(const MethodConfig& mc, const EncoderConfig& ec, int in_dim, uint64_t seed)
      : mc_(mc), ec_(ec) {
    enc_ = std::make_unique<Encoder>(ec_, in_dim, store_, "enc", mix_seed(seed, 1));
  }
  MethodName name() const override { return MethodName::gca; }
  bool supports_node() const override { return true; }
  bool supports_graphset() const override { return false; }

  Value loss(Tape& t, const Graph& g, uint64_t seed) override {
    require_features(g, "gca");
    const auto probs = gca_edge_weights(g, mc_.drop_edge_p, mc_.p_tau);
    Value z1 = view_embedding(t, g, probs, mix_seed(seed, 1));
    Value z2 = view_embedding(t, g, probs, mix_seed(seed, 2));
    return nt_xent(t, z1, z2, mc_.tau);
  }

  DenseMatrix embed_nodes(const Graph& g) override {
    Tape t;
    return t.value(last_layer(t, *enc_, sym_norm_adj(g), t.constant(g.features), true));
  }

 private:
  Value view_embedding(Tape& t, const Graph& g, const std::vector<double>& probs, uint64_t seed) {
    Graph view = drop_edges_weighted(g, probs, mix_seed(seed, 1));
    view = mask_features(view, mc_.mask_feat_p, mix_seed(seed, 2));
    return last_layer(t, *enc_, sym_norm_adj(view), t.constant(view.features));
  }

  MethodConfig mc_;
  EncoderConfig ec_;
  std::unique_ptr<Encoder> enc_;
};

// ---------------------------------------------------------------------------

class BgrlMethod final : public Method {
 public:
  BgrlMethod(const MethodConfig& mc, const EncoderConfig& ec, int in_dim, uint64_t seed)
      : mc_(mc), ec_(ec) {
    // Same seed for both encoders: the target starts as an exact copy.
    enc_ = std::make_unique<Encoder>(ec_, in_dim, store_, "enc", mix_seed(seed, 1));
    target_enc_ = std::make_unique<Encoder>(ec_, in_dim, target_store_, "target", mix_seed(seed, 1));
    pred_ = std::make_unique<MlpHead>(ec_.hidden_dim, ec_.hidden_dim, ec_.hidden_dim, store_,
                                      "pred", mix_seed(seed, 2));
  }
  MethodName name() const override { return MethodName::bgrl; }
  bool supports_node() const override { return true; }
  bool supports_graphset() const override { return false; }

  Value loss(Tape& t, const Graph& g, uint64_t seed) override {
    require_features(g, "bgrl");
    const Graph v1 = make_view(g, mix_seed(seed, 1));
    const Graph v2 = make_view(g, mix_seed(seed, 2));
    Value term1 = predict_term(t, v1, v2);
    Value term2 = predict_term(t, v2, v1);
    return t.scale(t.add(term1, term2), 0.5f);
  }

  void after_step() override { ema_update(enc_->params(), target_enc_->params(), mc_.ema_decay); }

  DenseMatrix embed_nodes(const Graph& g) override {
    Tape t;
    return t.value(last_layer(t, *enc_, sym_norm_adj(g), t.constant(g.features), true));
  }

  std::vector<Parameter*> target_params() { return target_enc_->params(); }
  std::vector<Parameter*> online_encoder_params() { return enc_->params(); }

 private:
  Graph make_view(const Graph& g, uint64_t seed) const {
    Graph v = drop_edges(g, mc_.drop_edge_p, mix_seed(seed, 1));
    return mask_features(v, mc_.mask_feat_p, mix_seed(seed, 2));
  }

  // mean_i (2 - 2 cos(q_i, y_i)) with q from the online path on view_q and
  // y from the frozen target path on view_y.
  Value predict_term(Tape& t, const Graph& view_q, const Graph& view_y) {
    Value h = last_layer(t, *enc_, sym_norm_adj(view_q), t.constant(view_q.features));
    Value q = t.row_l2_normalize(pred_->forward(t, h));
    Value y = t.row_l2_normalize(
        last_layer(t, *target_enc_, sym_norm_adj(view_y), t.constant(view_y.features), true));
    Value cos = t.row_sum(t.mul(q, y));
    return t.add_scalar(t.scale(t.mean_all(cos), -2.0f), 2.0f);
  }

  MethodConfig mc_;
  EncoderConfig ec_;
  ParamStore target_store_;
  std::unique_ptr<Encoder> enc_;
  std::unique_ptr<Encoder> target_enc_;
  std::unique_ptr<MlpHead> pred_;
};

// ---------------------------------------------------------------------------

class InfoGraphMethod final : public Method {
 public:
  InfoGraphMethod(const MethodConfig& mc, const EncoderConfig& ec, int in_dim, uint64_t seed)
      : mc_(mc), ec_(ec) {
    enc_ = std::make_unique<Encoder>(ec_, in_dim, store_, "enc", mix_seed(seed, 1));
    const int d = enc_->layer_concat_dim();
    proj_node_ = Linear(d, d, store_, "proj_node", mix_seed(seed, 2));
    proj_graph_ = Linear(d, d, store_, "proj_graph", mix_seed(seed, 3));
  }
  MethodName name() const override { return MethodName::infograph; }
  bool supports_node() const override { return false; }
  bool supports_graphset() const override { return true; }
  int min_batch() const override { return 2; }

  Value loss_batch(Tape& t, const GraphSet& gs, const std::vector<int>& batch,
                   uint64_t /*seed*/) override {
    if (batch.size() < 2) throw MethodError("infograph: batch of size 1 has no negative graphs");
    const int b = static_cast<int>(batch.size());

    // Graph summaries, stacked then projected once: b x d.
    std::vector<std::vector<Value>> per_graph_layers;
    per_graph_layers.reserve(batch.size());
    Value summaries;
    for (size_t bi = 0; bi < batch.size(); ++bi) {
      const Graph& g = gs.graphs[static_cast<size_t>(batch[bi])];
      auto layers = enc_->forward(t, prop_for(g), t.constant(g.features));
      Value emb = graph_embedding(t, layers, ec_.readout);
      summaries = bi == 0 ? emb : t.concat_rows(summaries, emb);
      per_graph_layers.push_back(std::move(layers));
    }
    Value s_proj = proj_graph_.forward(t, summaries);

    // Patch scores graph by graph against every summary.
    Value pos_sum, neg_sum;
    long n_total = 0;
    for (size_t bi = 0; bi < batch.size(); ++bi) {
      Value patches = layer_concat(t, per_graph_layers[bi]);
      Value scores = t.matmul_nt(proj_node_.forward(t, patches), s_proj);  // n_g x b
      DenseMatrix pos_mask(scores.rows, b, 0.0f);
      DenseMatrix neg_mask(scores.rows, b, 1.0f);
      for (int i = 0; i < scores.rows; ++i) {
        pos_mask.at(i, static_cast<int>(bi)) = 1.0f;
        neg_mask.at(i, static_cast<int>(bi)) = 0.0f;
      }
      Value sp_neg = t.sum_all(t.mul(t.softplus(t.scale(scores, -1.0f)), t.constant(pos_mask)));
      Value sp_pos = t.sum_all(t.mul(t.softplus(scores), t.constant(neg_mask)));
      pos_sum = bi == 0 ? sp_neg : t.add(pos_sum, sp_neg);
      neg_sum = bi == 0 ? sp_pos : t.add(neg_sum, sp_pos);
      n_total += scores.rows;
    }
    const float inv_pos = 1.0f / static_cast<float>(n_total);
    const float inv_neg = 1.0f / (static_cast<float>(n_total) * static_cast<float>(b - 1));
    return t.add(t.scale(pos_sum, inv_pos), t.scale(neg_sum, inv_neg));
  }

  DenseMatrix embed_graphs(const GraphSet& gs) override {
    Tape t;
    Value stacked;
    for (size_t i = 0; i < gs.size(); ++i) {
      const Graph& g = gs.graphs[i];
      auto layers = enc_->forward(t, prop_for(g), t.constant(g.features), true);
      Value emb = graph_embedding(t, layers, ec_.readout);
      stacked = i == 0 ? emb : t.concat_rows(stacked, emb);
    }
    return t.value(stacked);
  }

 private:
  SparseMatrix prop_for(const Graph& g) const {
    return ec_.kind == EncoderKind::gin ? g.adjacency : sym_norm_adj(g);
  }

  MethodConfig mc_;
  EncoderConfig ec_;
  std::unique_ptr<Encoder> enc_;
  Linear proj_node_;
  Linear proj_graph_;
};

// ---------------------------------------------------------------------------

class GraphMaeMethod final : public Method {
 public:
  GraphMaeMethod(const MethodConfig& mc, const EncoderConfig& ec, int in_dim, bool graph_task,
                 uint64_t seed)
      : mc_(mc), ec_(ec), graph_task_(graph_task), in_dim_(in_dim) {
    enc_ = std::make_unique<Encoder>(ec_, in_dim, store_, "enc", mix_seed(seed, 1));
    enc_token_ = &store_.create("enc_token", DenseMatrix(1, in_dim));
    dec_token_ = &store_.create("dec_token", DenseMatrix(1, ec_.hidden_dim));
    dec_ = Linear(ec_.hidden_dim, in_dim, store_, "dec", mix_seed(seed, 2));
  }
  MethodName name() const override { return MethodName::graphmae; }
  bool supports_node() const override { return true; }
  bool supports_graphset() const override { return true; }

  Value loss(Tape& t, const Graph& g, uint64_t seed) override {
    require_features(g, "graphmae");
    return reconstruction_loss(t, g, seed);
  }

  Value loss_batch(Tape& t, const GraphSet& gs, const std::vector<int>& batch,
                   uint64_t seed) override {
    Value total;
    int used = 0;
    for (size_t bi = 0; bi < batch.size(); ++bi) {
      const Graph& g = gs.graphs[static_cast<size_t>(batch[bi])];
      Value l = reconstruction_loss(t, g, mix_seed(seed, bi));
      total = used == 0 ? l : t.add(total, l);
      ++used;
    }
    if (used == 0) throw MethodError("graphmae: empty batch");
    return t.scale(total, 1.0f / static_cast<float>(used));
  }

  DenseMatrix embed_nodes(const Graph& g) override {
    Tape t;
    return t.value(
        last_layer(t, *enc_, propagation(g), t.constant(g.features), true));
  }

  DenseMatrix embed_graphs(const GraphSet& gs) override {
    Tape t;
    Value stacked;
    for (size_t i = 0; i < gs.size(); ++i) {
      const Graph& g = gs.graphs[i];
      auto layers = enc_->forward(t, propagation(g), t.constant(g.features), true);
      Value emb = graph_embedding(t, layers, ec_.readout);
      stacked = i == 0 ? emb : t.concat_rows(stacked, emb);
    }
    return t.value(stacked);
  }

 private:
  SparseMatrix propagation(const Graph& g) const {
    return ec_.kind == EncoderKind::gin ? g.adjacency : sym_norm_adj(g);
  }

  Value reconstruction_loss(Tape& t, const Graph& g, uint64_t seed) {
    const int m = static_cast<int>(std::lround(mc_.mask_rate * g.n));
    if (m < 1) throw MethodError("graphmae: mask set is empty");
    Rng rng(mix_seed(seed, 7));
    const auto sampled = rng.sample_without_replacement(static_cast<size_t>(g.n),
                                                        static_cast<size_t>(m));
    // Rows whose original features have exact zero norm cannot be scored by
    // a cosine error; skip them and keep count.
    std::vector<int> mask;
    for (size_t v : sampled) {
      double norm = 0.0;
      for (int j = 0; j < g.feature_dim(); ++j) {
        const float x = g.features.at(static_cast<int>(v), j);
        norm += static_cast<double>(x) * x;
      }
      if (norm == 0.0) {
        ++skipped_row_warnings_;
        continue;
      }
      mask.push_back(static_cast<int>(v));
    }
    if (mask.empty()) throw MethodError("graphmae: every masked row has zero-norm features");

    const SparseMatrix prop = propagation(g);
    Value x_masked = t.replace_rows(t.constant(g.features), mask, t.param(*enc_token_));
    Value h = last_layer(t, *enc_, prop, x_masked);
    Value h_re = t.replace_rows(h, mask, t.param(*dec_token_));
    Value x_hat = dec_.forward(t, t.spmm(prop, h_re));

    // Normalized originals as constants.
    DenseMatrix x_ref(static_cast<int>(mask.size()), g.feature_dim());
    for (size_t i = 0; i < mask.size(); ++i) {
      double norm = 0.0;
      for (int j = 0; j < g.feature_dim(); ++j) {
        const float x = g.features.at(mask[i], j);
        norm += static_cast<double>(x) * x;
      }
      const float inv = static_cast<float>(1.0 / std::sqrt(norm));
      for (int j = 0; j < g.feature_dim(); ++j)
        x_ref.at(static_cast<int>(i), j) = g.features.at(mask[i], j) * inv;
    }
    Value recon = t.row_l2_normalize(t.gather_rows(x_hat, mask));
    Value cos = t.row_sum(t.mul(recon, t.constant(std::move(x_ref))));
    // (1 - cos)^gamma; the relu clamps float jitter at perfect reconstruction.
    Value err = t.pow_scalar(t.relu(t.add_scalar(t.scale(cos, -1.0f), 1.0f)), mc_.gamma);
    return t.mean_all(err);
  }

  MethodConfig mc_;
  EncoderConfig ec_;
  bool graph_task_;
  int in_dim_;
  std::unique_ptr<Encoder> enc_;
  Parameter* enc_token_;
  Parameter* dec_token_;
  Linear dec_;
};

}  // namespace

std::unique_ptr<Method> make_method(const MethodConfig& mc, const EncoderConfig& ec, int in_dim,
                                    bool graph_task, uint64_t seed) {
  mc.validate();
  ec.validate();
  switch (mc.name) {
    case MethodName::dgi: return std::make_unique<DgiMethod>(mc, ec, in_dim, seed);
    case MethodName::graphcl:
      return std::make_unique<GraphClMethod>(mc, ec, in_dim, graph_task, seed);
    case MethodName::mvgrl: return std::make_unique<MvgrlMethod>(mc, ec, in_dim, seed);
    case MethodName::gca: return std::make_unique<GcaMethod>(mc, ec, in_dim, seed);
    case MethodName::bgrl: return std::make_unique<BgrlMethod>(mc, ec, in_dim, seed);
    case MethodName::infograph: return std::make_unique<InfoGraphMethod>(mc, ec, in_dim, seed);
    case MethodName::graphmae:
      return std::make_unique<GraphMaeMethod>(mc, ec, in_dim, graph_task, seed);
  }
  throw ConfigError("unknown method");
}

}  // namespace gssl
