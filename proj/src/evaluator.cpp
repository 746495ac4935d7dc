#include "gssl/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "gssl/errors.hpp"
#include "gssl/optim.hpp"
#include "gssl/rng.hpp"
#include "gssl/tape.hpp"

namespace gssl {

void EmbeddingTable::check_valid() const {
  if (data.rows != n || data.cols != d) throw ShapeError("embedding table shape mismatch");
  if (ids.size() != static_cast<size_t>(n)) throw ShapeError("embedding id count mismatch");
  if (!data.all_finite()) throw ContractError("embedding table contains non-finite values");
}

EmbeddingTable EmbeddingTable::from_matrix(DenseMatrix m) {
  EmbeddingTable t;
  t.n = m.rows;
  t.d = m.cols;
  t.data = std::move(m);
  t.ids.resize(static_cast<size_t>(t.n));
  std::iota(t.ids.begin(), t.ids.end(), 0);
  return t;
}

EvalResult EvalResult::from_folds(std::string metric, std::vector<double> folds) {
  EvalResult r;
  r.metric = std::move(metric);
  r.per_fold = std::move(folds);
  double sum = 0.0;
  for (double v : r.per_fold) sum += v;
  r.mean = r.per_fold.empty() ? 0.0 : sum / static_cast<double>(r.per_fold.size());
  double var = 0.0;
  for (double v : r.per_fold) var += (v - r.mean) * (v - r.mean);
  r.std_dev = r.per_fold.empty() ? 0.0 : std::sqrt(var / static_cast<double>(r.per_fold.size()));
  return r;
}

std::string eval_result_to_json(const EvalResult& r) {
  nlohmann::json j;
  j["metric"] = r.metric;
  j["mean"] = r.mean;
  j["std"] = r.std_dev;
  j["std_convention"] = "population";
  j["per_fold"] = r.per_fold;
  for (const auto& [k, v] : r.extras) j[k] = v;
  return j.dump();
}

namespace {

int n_classes_of(const std::vector<int>& labels) {
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw ContractError("negative label");
    k = std::max(k, l + 1);
  }
  return k;
}

// Per-dimension z-score fitted on the rows listed in fit_idx.
DenseMatrix standardize(const DenseMatrix& x, const std::vector<int>& fit_idx) {
  std::vector<double> mean(static_cast<size_t>(x.cols), 0.0);
  std::vector<double> var(static_cast<size_t>(x.cols), 0.0);
  for (int i : fit_idx)
    for (int j = 0; j < x.cols; ++j) mean[static_cast<size_t>(j)] += x.at(i, j);
  for (double& m : mean) m /= static_cast<double>(fit_idx.size());
  for (int i : fit_idx)
    for (int j = 0; j < x.cols; ++j) {
      const double dv = x.at(i, j) - mean[static_cast<size_t>(j)];
      var[static_cast<size_t>(j)] += dv * dv;
    }
  DenseMatrix out(x.rows, x.cols);
  for (int j = 0; j < x.cols; ++j) {
    double sd = std::sqrt(var[static_cast<size_t>(j)] / static_cast<double>(fit_idx.size()));
    if (sd < 1e-12) sd = 1.0;
    for (int i = 0; i < x.rows; ++i)
      out.at(i, j) = static_cast<float>((x.at(i, j) - mean[static_cast<size_t>(j)]) / sd);
  }
  return out;
}

DenseMatrix take_rows(const DenseMatrix& x, const std::vector<int>& idx) {
  DenseMatrix out(static_cast<int>(idx.size()), x.cols);
  for (size_t i = 0; i < idx.size(); ++i)
    std::copy(x.row(idx[i]), x.row(idx[i]) + x.cols, out.row(static_cast<int>(i)));
  return out;
}

std::vector<int> argmax_rows(const DenseMatrix& logits) {
  std::vector<int> out(static_cast<size_t>(logits.rows));
  for (int i = 0; i < logits.rows; ++i) {
    int best = 0;
    for (int j = 1; j < logits.cols; ++j)
      if (logits.at(i, j) > logits.at(i, best)) best = j;
    out[static_cast<size_t>(i)] = best;
  }
  return out;
}

}  // namespace

EvalResult logistic_probe(const EmbeddingTable& emb, const std::vector<int>& labels,
                          const Split& split, float l2, int epochs, float lr, uint64_t seed) {
  emb.check_valid();
  if (labels.size() != static_cast<size_t>(emb.n)) throw ContractError("probe: label count");
  for (int i : split.train)
    if (i < 0 || i >= emb.n) throw ContractError("probe: split index out of range");
  const int k = n_classes_of(labels);
  {
    std::vector<bool> seen(static_cast<size_t>(k), false);
    int distinct = 0;
    for (int i : split.train)
      if (!seen[static_cast<size_t>(labels[static_cast<size_t>(i)])]) {
        seen[static_cast<size_t>(labels[static_cast<size_t>(i)])] = true;
        ++distinct;
      }
    if (distinct < 2) throw ContractError("probe: single-class training set");
  }

  const DenseMatrix z = standardize(emb.data, split.train);
  const DenseMatrix x_train = take_rows(z, split.train);
  const int n_tr = x_train.rows;

  ParamStore store;
  Parameter& w = store.create("W", xavier_init(emb.d, k, mix_seed(seed, 11)));
  Parameter& b = store.create("b", DenseMatrix(1, k));

  std::vector<std::pair<int, int>> gold;
  gold.reserve(static_cast<size_t>(n_tr));
  for (int i = 0; i < n_tr; ++i)
    gold.emplace_back(i, labels[static_cast<size_t>(split.train[static_cast<size_t>(i)])]);

  AdamConfig adam;
  adam.lr = lr;
  for (int e = 0; e < epochs; ++e) {
    Tape t;
    Value logits = t.add_row_bias(t.matmul(t.constant(x_train), t.param(w)), t.param(b));
    Value lse = t.masked_row_lse(logits, DenseMatrix(n_tr, k, 1.0f));
    Value gold_logits = t.gather_entries(logits, gold);
    Value ce = t.mean_all(t.add(lse, t.scale(gold_logits, -1.0f)));
    Value wv = t.param(w);
    Value loss = t.add(ce, t.scale(t.sum_all(t.mul(wv, wv)), l2));
    t.backward(loss);
    adam_step(store.all(), adam);
  }

  const DenseMatrix x_test = take_rows(z, split.test);
  DenseMatrix logits = matmul(x_test, w.value);
  for (int i = 0; i < logits.rows; ++i)
    for (int j = 0; j < logits.cols; ++j) logits.at(i, j) += b.value.data[static_cast<size_t>(j)];
  const std::vector<int> pred = argmax_rows(logits);
  std::vector<int> gold_test;
  gold_test.reserve(split.test.size());
  for (int i : split.test) gold_test.push_back(labels[static_cast<size_t>(i)]);

  const auto [acc, f1] = classification_metrics(pred, gold_test);
  EvalResult r = EvalResult::from_folds("accuracy", {acc});
  r.extras["macro_f1"] = f1;
  return r;
}

EvalResult logistic_probe_repeats(const EmbeddingTable& emb, const std::vector<int>& labels,
                                  int repeats, double train_frac, double val_frac,
                                  double test_frac, float l2, int epochs, float lr, uint64_t seed,
                                  const Split* fixed_split) {
  if (repeats < 1) throw ConfigError("probe repeats must be >= 1");
  std::vector<double> accs;
  std::vector<double> f1s;
  for (int rep = 0; rep < repeats; ++rep) {
    const uint64_t rep_seed = mix_seed(seed, 0x52455000ULL + static_cast<uint64_t>(rep));
    Split split = fixed_split
                      ? *fixed_split
                      : split_nodes(emb.n, train_frac, val_frac, test_frac, rep_seed);
    EvalResult one = logistic_probe(emb, labels, split, l2, epochs, lr, rep_seed);
    accs.push_back(one.mean);
    f1s.push_back(one.extras.at("macro_f1"));
  }
  EvalResult r = EvalResult::from_folds("accuracy", std::move(accs));
  double f1_sum = 0.0;
  for (double v : f1s) f1_sum += v;
  r.extras["macro_f1"] = f1_sum / static_cast<double>(f1s.size());
  return r;
}

EvalResult linear_svm_cv(const EmbeddingTable& emb, const std::vector<int>& labels, int k, float c,
                         int epochs, uint64_t seed) {
  emb.check_valid();
  if (k < 2) throw ContractError("svm: k must be >= 2");
  if (k > emb.n) throw ContractError("svm: k > n");
  const int n_cls = n_classes_of(labels);
  {
    std::vector<int> counts(static_cast<size_t>(n_cls), 0);
    for (int l : labels) ++counts[static_cast<size_t>(l)];
    for (int cls = 0; cls < n_cls; ++cls)
      if (counts[static_cast<size_t>(cls)] < k)
        std::cerr << "warning: class " << cls << " has fewer than " << k << " samples\n";
  }

  const auto folds = kfold_split(emb.n, k, mix_seed(seed, 0x464f4c44ULL));
  std::vector<double> accs;
  for (size_t f = 0; f < folds.size(); ++f) {
    const Split& split = folds[f];
    const DenseMatrix z = standardize(emb.data, split.train);
    const DenseMatrix x_train = take_rows(z, split.train);
    const int n_tr = x_train.rows;

    DenseMatrix y(n_tr, n_cls, -1.0f);
    for (int i = 0; i < n_tr; ++i)
      y.at(i, labels[static_cast<size_t>(split.train[static_cast<size_t>(i)])]) = 1.0f;

    ParamStore store;
    Parameter& w = store.create("W", xavier_init(emb.d, n_cls, mix_seed(seed, 100 + f)));
    Parameter& b = store.create("b", DenseMatrix(1, n_cls));

    AdamConfig adam;
    adam.lr = 0.05f;
    for (int e = 0; e < epochs; ++e) {
      Tape t;
      Value scores = t.add_row_bias(t.matmul(t.constant(x_train), t.param(w)), t.param(b));
      Value margin = t.add_scalar(t.scale(t.mul(t.constant(y), scores), -1.0f), 1.0f);
      Value hinge = t.relu(margin);
      Value data_term = t.scale(t.sum_all(t.mul(hinge, hinge)), 1.0f / static_cast<float>(n_tr));
      Value wv = t.param(w);
      Value reg = t.scale(t.sum_all(t.mul(wv, wv)), 1.0f / (2.0f * c));
      Value loss = t.add(data_term, reg);
      t.backward(loss);
      adam_step(store.all(), adam);
    }

    const DenseMatrix x_test = take_rows(z, split.test);
    DenseMatrix scores = matmul(x_test, w.value);
    for (int i = 0; i < scores.rows; ++i)
      for (int j = 0; j < scores.cols; ++j) scores.at(i, j) += b.value.data[static_cast<size_t>(j)];
    const std::vector<int> pred = argmax_rows(scores);
    std::vector<int> gold;
    for (int i : split.test) gold.push_back(labels[static_cast<size_t>(i)]);
    accs.push_back(classification_metrics(pred, gold).first);
  }
  return EvalResult::from_folds("accuracy", std::move(accs));
}

namespace {

struct KmeansRun {
  std::vector<int> assign;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const DenseMatrix& x, int k, int max_iter, uint64_t seed) {
  const int n = x.rows, d = x.cols;
  Rng rng(seed);

  // k-means++ seeding.
  std::vector<std::vector<double>> centers;
  centers.reserve(static_cast<size_t>(k));
  auto push_center = [&](int idx) {
    std::vector<double> c(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) c[static_cast<size_t>(j)] = x.at(idx, j);
    centers.push_back(std::move(c));
  };
  push_center(static_cast<int>(rng.below(static_cast<uint64_t>(n))));
  std::vector<double> min_d2(static_cast<size_t>(n), 0.0);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
          const double dv = x.at(i, j) - c[static_cast<size_t>(j)];
          s += dv * dv;
        }
        best = std::min(best, s);
      }
      min_d2[static_cast<size_t>(i)] = best;
      total += best;
    }
    int pick = 0;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += min_d2[static_cast<size_t>(i)];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
    }
    push_center(pick);
  }

  std::vector<int> assign(static_cast<size_t>(n), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
          const double dv = x.at(i, j) - centers[static_cast<size_t>(c)][static_cast<size_t>(j)];
          s += dv * dv;
        }
        if (s < best_d) {
          best_d = s;
          best = c;
        }
      }
      if (assign[static_cast<size_t>(i)] != best) {
        assign[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;

    std::vector<std::vector<double>> sums(static_cast<size_t>(k),
                                          std::vector<double>(static_cast<size_t>(d), 0.0));
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      ++counts[static_cast<size_t>(assign[static_cast<size_t>(i)])];
      for (int j = 0; j < d; ++j)
        sums[static_cast<size_t>(assign[static_cast<size_t>(i)])][static_cast<size_t>(j)] += x.at(i, j);
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) {
        // Re-seed an empty cluster to the point farthest from its center.
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const auto& ci = centers[static_cast<size_t>(assign[static_cast<size_t>(i)])];
          double s = 0.0;
          for (int j = 0; j < d; ++j) {
            const double dv = x.at(i, j) - ci[static_cast<size_t>(j)];
            s += dv * dv;
          }
          if (s > far_d) {
            far_d = s;
            far = i;
          }
        }
        for (int j = 0; j < d; ++j) centers[static_cast<size_t>(c)][static_cast<size_t>(j)] = x.at(far, j);
      } else {
        for (int j = 0; j < d; ++j)
          centers[static_cast<size_t>(c)][static_cast<size_t>(j)] =
              sums[static_cast<size_t>(c)][static_cast<size_t>(j)] / counts[static_cast<size_t>(c)];
      }
    }
  }

  KmeansRun run;
  run.assign = std::move(assign);
  run.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& c = centers[static_cast<size_t>(run.assign[static_cast<size_t>(i)])];
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      const double dv = x.at(i, j) - c[static_cast<size_t>(j)];
      s += dv * dv;
    }
    run.inertia += s;
  }
  return run;
}

double nmi_score(const std::vector<int>& a, const std::vector<int>& b) {
  const int n = static_cast<int>(a.size());
  const int ka = n_classes_of(a), kb = n_classes_of(b);
  std::vector<std::vector<int>> cont(static_cast<size_t>(ka),
                                     std::vector<int>(static_cast<size_t>(kb), 0));
  std::vector<int> ca(static_cast<size_t>(ka), 0), cb(static_cast<size_t>(kb), 0);
  for (int i = 0; i < n; ++i) {
    ++cont[static_cast<size_t>(a[static_cast<size_t>(i)])][static_cast<size_t>(b[static_cast<size_t>(i)])];
    ++ca[static_cast<size_t>(a[static_cast<size_t>(i)])];
    ++cb[static_cast<size_t>(b[static_cast<size_t>(i)])];
  }
  double mi = 0.0, ha = 0.0, hb = 0.0;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      const int nij = cont[static_cast<size_t>(i)][static_cast<size_t>(j)];
      if (nij == 0) continue;
      mi += (static_cast<double>(nij) / n) *
            std::log(static_cast<double>(nij) * n /
                     (static_cast<double>(ca[static_cast<size_t>(i)]) * cb[static_cast<size_t>(j)]));
    }
  for (int i = 0; i < ka; ++i)
    if (ca[static_cast<size_t>(i)] > 0) {
      const double p = static_cast<double>(ca[static_cast<size_t>(i)]) / n;
      ha -= p * std::log(p);
    }
  for (int j = 0; j < kb; ++j)
    if (cb[static_cast<size_t>(j)] > 0) {
      const double p = static_cast<double>(cb[static_cast<size_t>(j)]) / n;
      hb -= p * std::log(p);
    }
  const double denom = std::sqrt(ha * hb);
  return denom > 0.0 ? mi / denom : 0.0;
}

}  // namespace

EvalResult kmeans_nmi(const EmbeddingTable& emb, const std::vector<int>& labels, int k, int n_init,
                      int max_iter, uint64_t seed) {
  emb.check_valid();
  if (k < 2) throw ContractError("kmeans: k must be >= 2");
  if (k > emb.n) throw ContractError("kmeans: k > n");
  if (n_init < 1) throw ContractError("kmeans: n_init must be >= 1");

  KmeansRun best;
  for (int init = 0; init < n_init; ++init) {
    KmeansRun run = kmeans_once(emb.data, k, max_iter, mix_seed(seed, static_cast<uint64_t>(init)));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  const double nmi = nmi_score(best.assign, labels);
  EvalResult r = EvalResult::from_folds("nmi", {nmi});
  r.extras["inertia"] = best.inertia;
  return r;
}

EvalResult similarity_search(const EmbeddingTable& emb, const std::vector<int>& labels, int k) {
  emb.check_valid();
  if (k < 1 || k >= emb.n) throw ContractError("similarity_search: need 1 <= k <= n-1");
  if (labels.size() != static_cast<size_t>(emb.n)) throw ContractError("similarity_search: labels");

  // Row-normalized copy; exact-zero rows stay zero (cosine 0 against all).
  DenseMatrix z = emb.data;
  for (int i = 0; i < z.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < z.cols; ++j) s += static_cast<double>(z.at(i, j)) * z.at(i, j);
    if (s > 0.0) {
      const float inv = static_cast<float>(1.0 / std::sqrt(s));
      for (int j = 0; j < z.cols; ++j) z.at(i, j) *= inv;
    }
  }

  double total = 0.0;
  std::vector<std::pair<float, int>> sims(static_cast<size_t>(emb.n));
  for (int q = 0; q < emb.n; ++q) {
    for (int i = 0; i < emb.n; ++i) {
      double dot = 0.0;
      for (int j = 0; j < z.cols; ++j) dot += static_cast<double>(z.at(q, j)) * z.at(i, j);
      // Negated similarity so ascending sort puts best first; ties resolve
      // to the lower index.
      sims[static_cast<size_t>(i)] = {static_cast<float>(-dot), i};
    }
    sims[static_cast<size_t>(q)] = {std::numeric_limits<float>::infinity(), q};  // exclude self
    std::partial_sort(sims.begin(), sims.begin() + k, sims.end());
    int hits = 0;
    for (int t = 0; t < k; ++t)
      if (labels[static_cast<size_t>(sims[static_cast<size_t>(t)].second)] ==
          labels[static_cast<size_t>(q)])
        ++hits;
    total += static_cast<double>(hits) / k;
  }
  return EvalResult::from_folds("precision_at_k", {total / emb.n});
}

std::pair<double, double> classification_metrics(const std::vector<int>& pred,
                                                 const std::vector<int>& gold) {
  if (pred.size() != gold.size() || pred.empty())
    throw ContractError("classification_metrics: length mismatch or empty");
  const int k = std::max(n_classes_of(pred), n_classes_of(gold));
  std::vector<long> tp(static_cast<size_t>(k), 0), fp(static_cast<size_t>(k), 0),
      fn(static_cast<size_t>(k), 0), gold_count(static_cast<size_t>(k), 0);
  long correct = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == gold[i]) {
      ++correct;
      ++tp[static_cast<size_t>(pred[i])];
    } else {
      ++fp[static_cast<size_t>(pred[i])];
      ++fn[static_cast<size_t>(gold[i])];
    }
    ++gold_count[static_cast<size_t>(gold[i])];
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(pred.size());

  double f1_sum = 0.0;
  int f1_classes = 0;
  for (int c = 0; c < k; ++c) {
    if (gold_count[static_cast<size_t>(c)] == 0) continue;  // absent from gold: excluded
    const long denom = 2 * tp[static_cast<size_t>(c)] + fp[static_cast<size_t>(c)] + fn[static_cast<size_t>(c)];
    f1_sum += denom > 0 ? 2.0 * static_cast<double>(tp[static_cast<size_t>(c)]) / static_cast<double>(denom) : 0.0;
    ++f1_classes;
  }
  return {acc, f1_classes > 0 ? f1_sum / f1_classes : 0.0};
}

DenseMatrix project_2d(const EmbeddingTable& emb) {
  emb.check_valid();
  if (emb.d < 2) throw ContractError("project_2d: need d >= 2");
  const int n = emb.n, d = emb.d;

  std::vector<double> mean(static_cast<size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) mean[static_cast<size_t>(j)] += emb.data.at(i, j);
  for (double& m : mean) m /= n;

  std::vector<std::vector<double>> cov(static_cast<size_t>(d),
                                       std::vector<double>(static_cast<size_t>(d), 0.0));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) {
      const double xa = emb.data.at(i, a) - mean[static_cast<size_t>(a)];
      for (int b = a; b < d; ++b)
        cov[static_cast<size_t>(a)][static_cast<size_t>(b)] +=
            xa * (emb.data.at(i, b) - mean[static_cast<size_t>(b)]);
    }
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      cov[static_cast<size_t>(a)][static_cast<size_t>(b)] /= n;
      cov[static_cast<size_t>(b)][static_cast<size_t>(a)] = cov[static_cast<size_t>(a)][static_cast<size_t>(b)];
    }

  auto power_component = [&](std::vector<double>& v) {
    for (int iter = 0; iter < 1000; ++iter) {
      std::vector<double> next(static_cast<size_t>(d), 0.0);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          next[static_cast<size_t>(a)] += cov[static_cast<size_t>(a)][static_cast<size_t>(b)] * v[static_cast<size_t>(b)];
      double norm = 0.0;
      for (double x : next) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-30) return;  // deflated matrix is (numerically) zero
      double diff = 0.0;
      for (int a = 0; a < d; ++a) {
        next[static_cast<size_t>(a)] /= norm;
        diff += std::fabs(next[static_cast<size_t>(a)] - v[static_cast<size_t>(a)]);
      }
      const bool done = diff < 1e-7;
      v = std::move(next);
      if (done) return;
    }
  };

  DenseMatrix coords(n, 2);
  std::vector<std::vector<double>> comps;
  for (int comp = 0; comp < 2; ++comp) {
    // Deterministic start with a mild asymmetry so the iteration cannot sit
    // on a symmetry axis.
    std::vector<double> v(static_cast<size_t>(d));
    double norm = 0.0;
    for (int a = 0; a < d; ++a) {
      v[static_cast<size_t>(a)] = 1.0 + 1e-3 * a;
      norm += v[static_cast<size_t>(a)] * v[static_cast<size_t>(a)];
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;

    power_component(v);

    // Sign convention: the largest-magnitude loading is positive.
    int arg = 0;
    for (int a = 1; a < d; ++a)
      if (std::fabs(v[static_cast<size_t>(a)]) > std::fabs(v[static_cast<size_t>(arg)])) arg = a;
    if (v[static_cast<size_t>(arg)] < 0.0)
      for (double& x : v) x = -x;

    for (int i = 0; i < n; ++i) {
      double proj = 0.0;
      for (int a = 0; a < d; ++a)
        proj += (emb.data.at(i, a) - mean[static_cast<size_t>(a)]) * v[static_cast<size_t>(a)];
      coords.at(i, comp) = static_cast<float>(proj);
    }

    // Deflate: C <- C - lambda v v^T.
    std::vector<double> cv(static_cast<size_t>(d), 0.0);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        cv[static_cast<size_t>(a)] += cov[static_cast<size_t>(a)][static_cast<size_t>(b)] * v[static_cast<size_t>(b)];
    double lambda = 0.0;
    for (int a = 0; a < d; ++a) lambda += v[static_cast<size_t>(a)] * cv[static_cast<size_t>(a)];
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        cov[static_cast<size_t>(a)][static_cast<size_t>(b)] -= lambda * v[static_cast<size_t>(a)] * v[static_cast<size_t>(b)];
    comps.push_back(std::move(v));
  }
  return coords;
}

}  // namespace gssl
