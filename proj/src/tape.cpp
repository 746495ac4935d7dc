#include "gssl/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gssl/errors.hpp"
#include "gssl/optim.hpp"

namespace gssl {

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::leaf: return "leaf";
    case OpKind::matmul: return "matmul";
    case OpKind::matmul_nt: return "matmul_nt";
    case OpKind::spmm: return "spmm";
    case OpKind::add: return "add";
    case OpKind::add_row_bias: return "add_row_bias";
    case OpKind::add_scalar: return "add_scalar";
    case OpKind::mul: return "mul";
    case OpKind::scale: return "scale";
    case OpKind::relu: return "relu";
    case OpKind::prelu: return "prelu";
    case OpKind::sigmoid: return "sigmoid";
    case OpKind::tanh_fn: return "tanh";
    case OpKind::exp_fn: return "exp";
    case OpKind::log_fn: return "log";
    case OpKind::softplus: return "softplus";
    case OpKind::pow_scalar: return "pow_scalar";
    case OpKind::row_l2_normalize: return "row_l2_normalize";
    case OpKind::sum_all: return "sum_all";
    case OpKind::mean_all: return "mean_all";
    case OpKind::col_sum: return "col_sum";
    case OpKind::col_mean: return "col_mean";
    case OpKind::row_sum: return "row_sum";
    case OpKind::row_mean: return "row_mean";
    case OpKind::col_max: return "col_max";
    case OpKind::gather_rows: return "gather_rows";
    case OpKind::replace_rows: return "replace_rows";
    case OpKind::concat_cols: return "concat_cols";
    case OpKind::concat_rows: return "concat_rows";
    case OpKind::gather_entries: return "gather_entries";
    case OpKind::masked_row_lse: return "masked_row_lse";
  }
  return "?";
}

std::vector<OpKind> all_op_kinds() {
  return {OpKind::matmul,       OpKind::matmul_nt,   OpKind::spmm,        OpKind::add,
          OpKind::add_row_bias, OpKind::add_scalar,  OpKind::mul,         OpKind::scale,
          OpKind::relu,         OpKind::prelu,       OpKind::sigmoid,     OpKind::tanh_fn,
          OpKind::exp_fn,       OpKind::log_fn,      OpKind::softplus,    OpKind::pow_scalar,
          OpKind::row_l2_normalize, OpKind::sum_all, OpKind::mean_all,    OpKind::col_sum,
          OpKind::col_mean,     OpKind::row_sum,     OpKind::row_mean,    OpKind::col_max,
          OpKind::gather_rows,  OpKind::replace_rows, OpKind::concat_cols, OpKind::concat_rows,
          OpKind::gather_entries, OpKind::masked_row_lse};
}

Value Tape::push(Node n) {
  const int id = static_cast<int>(nodes_.size());
  Value v{id, n.value.rows, n.value.cols};
  nodes_.push_back(std::move(n));
  return v;
}

Tape::Node& Tape::node(Value v) {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw ContractError("value does not belong to this tape");
  return nodes_[static_cast<size_t>(v.id)];
}

const Tape::Node& Tape::node(Value v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw ContractError("value does not belong to this tape");
  return nodes_[static_cast<size_t>(v.id)];
}

const DenseMatrix& Tape::value(Value v) const { return node(v).value; }

Value Tape::constant(DenseMatrix v) {
  Node n;
  n.kind = OpKind::leaf;
  n.value = std::move(v);
  n.requires_grad = false;
  return push(std::move(n));
}

Value Tape::param(Parameter& p) {
  for (const auto& [bound, id] : param_nodes_)
    if (bound == &p) return Value{id, p.value.rows, p.value.cols};
  Node n;
  n.kind = OpKind::leaf;
  n.value = p.value;
  n.requires_grad = true;
  n.bound = &p;
  Value v = push(std::move(n));
  param_nodes_.emplace_back(&p, v.id);
  return v;
}

#define GSSL_UNARY_PROLOGUE(xval)                 \
  Node n;                                         \
  n.inputs = {xval.id};                           \
  n.requires_grad = node(xval).requires_grad;     \
  const DenseMatrix& xm = node(xval).value;

Value Tape::matmul(Value a, Value b) {
  Node n;
  n.kind = OpKind::matmul;
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = gssl::matmul(node(a).value, node(b).value);
  return push(std::move(n));
}

Value Tape::matmul_nt(Value a, Value b) {
  Node n;
  n.kind = OpKind::matmul_nt;
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = gssl::matmul_nt(node(a).value, node(b).value);
  return push(std::move(n));
}

Value Tape::spmm(const SparseMatrix& a, Value x) {
  Node n;
  n.kind = OpKind::spmm;
  n.inputs = {x.id};
  n.requires_grad = node(x).requires_grad;
  n.value = gssl::spmm(a, node(x).value);
  n.sparse = a;
  return push(std::move(n));
}

Value Tape::add(Value a, Value b) {
  Node n;
  n.kind = OpKind::add;
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = gssl::add(node(a).value, node(b).value);
  return push(std::move(n));
}

Value Tape::add_row_bias(Value x, Value bias) {
  const DenseMatrix& xm = node(x).value;
  const DenseMatrix& bm = node(bias).value;
  if (bm.rows != 1 || bm.cols != xm.cols)
    throw ShapeError("add_row_bias: bias " + bm.shape_str() + " vs x " + xm.shape_str());
  Node n;
  n.kind = OpKind::add_row_bias;
  n.inputs = {x.id, bias.id};
  n.requires_grad = node(x).requires_grad || node(bias).requires_grad;
  n.value = xm;
  for (int i = 0; i < xm.rows; ++i) {
    float* r = n.value.row(i);
    for (int j = 0; j < xm.cols; ++j) r[j] += bm.data[static_cast<size_t>(j)];
  }
  return push(std::move(n));
}

Value Tape::add_scalar(Value x, float c) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::add_scalar;
  n.scalar = c;
  n.value = xm;
  for (float& v : n.value.data) v += c;
  return push(std::move(n));
}

Value Tape::mul(Value a, Value b) {
  Node n;
  n.kind = OpKind::mul;
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = gssl::mul(node(a).value, node(b).value);
  return push(std::move(n));
}

Value Tape::scale(Value x, float s) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::scale;
  n.scalar = s;
  n.value = gssl::scale(xm, s);
  return push(std::move(n));
}

Value Tape::relu(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::relu;
  n.value = xm;
  for (float& v : n.value.data) v = v > 0.0f ? v : 0.0f;
  return push(std::move(n));
}

Value Tape::prelu(Value x, Value slope) {
  const DenseMatrix& sm = node(slope).value;
  if (sm.rows != 1 || sm.cols != 1) throw ShapeError("prelu: slope must be 1x1");
  const float a = sm.data[0];
  Node n;
  n.kind = OpKind::prelu;
  n.inputs = {x.id, slope.id};
  n.requires_grad = node(x).requires_grad || node(slope).requires_grad;
  n.value = node(x).value;
  for (float& v : n.value.data) v = v > 0.0f ? v : a * v;
  return push(std::move(n));
}

Value Tape::sigmoid(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::sigmoid;
  n.value = xm;
  for (float& v : n.value.data) {
    if (v >= 0.0f) {
      v = 1.0f / (1.0f + std::exp(-v));
    } else {
      const float e = std::exp(v);
      v = e / (1.0f + e);
    }
  }
  return push(std::move(n));
}

Value Tape::tanh(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::tanh_fn;
  n.value = xm;
  for (float& v : n.value.data) v = std::tanh(v);
  return push(std::move(n));
}

Value Tape::exp(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::exp_fn;
  n.value = xm;
  for (float& v : n.value.data) v = std::exp(v);
  return push(std::move(n));
}

Value Tape::log(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::log_fn;
  n.value = xm;
  for (float& v : n.value.data) v = std::log(v);
  return push(std::move(n));
}

static float softplus_stable(float x) {
  if (x > 20.0f) return x;
  if (x < -20.0f) return std::exp(x);
  return std::log1p(std::exp(x));
}

Value Tape::softplus(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::softplus;
  n.value = xm;
  for (float& v : n.value.data) v = softplus_stable(v);
  return push(std::move(n));
}

Value Tape::pow_scalar(Value x, float p) {
  if (p < 1.0f) throw ContractError("pow_scalar: exponent must be >= 1");
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::pow_scalar;
  n.scalar = p;
  n.value = xm;
  for (float& v : n.value.data) {
    if (v < 0.0f) throw ContractError("pow_scalar: negative base");
    v = std::pow(v, p);
  }
  return push(std::move(n));
}

static constexpr float kNormEps = 1e-8f;

Value Tape::row_l2_normalize(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::row_l2_normalize;
  n.value = xm;
  n.aux = DenseMatrix(xm.rows, 1);  // saved row norms (pre-guard)
  for (int i = 0; i < xm.rows; ++i) {
    double s = 0.0;
    const float* r = xm.row(i);
    for (int j = 0; j < xm.cols; ++j) s += static_cast<double>(r[j]) * r[j];
    const float norm = static_cast<float>(std::sqrt(s));
    if (norm == 0.0f) throw ContractError("row_l2_normalize: zero-norm row " + std::to_string(i));
    n.aux.data[static_cast<size_t>(i)] = norm;
    const float inv = 1.0f / std::max(norm, kNormEps);
    float* o = n.value.row(i);
    for (int j = 0; j < xm.cols; ++j) o[j] *= inv;
  }
  return push(std::move(n));
}

Value Tape::sum_all(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::sum_all;
  double s = 0.0;
  for (float v : xm.data) s += v;
  n.value = DenseMatrix(1, 1, {static_cast<float>(s)});
  return push(std::move(n));
}

Value Tape::mean_all(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::mean_all;
  double s = 0.0;
  for (float v : xm.data) s += v;
  n.value = DenseMatrix(1, 1, {static_cast<float>(s / static_cast<double>(xm.size()))});
  return push(std::move(n));
}

Value Tape::col_sum(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::col_sum;
  n.value = DenseMatrix(1, xm.cols);
  std::vector<double> acc(static_cast<size_t>(xm.cols), 0.0);
  for (int i = 0; i < xm.rows; ++i) {
    const float* r = xm.row(i);
    for (int j = 0; j < xm.cols; ++j) acc[static_cast<size_t>(j)] += r[j];
  }
  for (int j = 0; j < xm.cols; ++j) n.value.data[static_cast<size_t>(j)] = static_cast<float>(acc[static_cast<size_t>(j)]);
  return push(std::move(n));
}

Value Tape::col_mean(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::col_mean;
  n.value = DenseMatrix(1, xm.cols);
  std::vector<double> acc(static_cast<size_t>(xm.cols), 0.0);
  for (int i = 0; i < xm.rows; ++i) {
    const float* r = xm.row(i);
    for (int j = 0; j < xm.cols; ++j) acc[static_cast<size_t>(j)] += r[j];
  }
  for (int j = 0; j < xm.cols; ++j)
    n.value.data[static_cast<size_t>(j)] = static_cast<float>(acc[static_cast<size_t>(j)] / xm.rows);
  return push(std::move(n));
}

Value Tape::row_sum(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::row_sum;
  n.value = DenseMatrix(xm.rows, 1);
  for (int i = 0; i < xm.rows; ++i) {
    double s = 0.0;
    const float* r = xm.row(i);
    for (int j = 0; j < xm.cols; ++j) s += r[j];
    n.value.data[static_cast<size_t>(i)] = static_cast<float>(s);
  }
  return push(std::move(n));
}

Value Tape::row_mean(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::row_mean;
  n.value = DenseMatrix(xm.rows, 1);
  for (int i = 0; i < xm.rows; ++i) {
    double s = 0.0;
    const float* r = xm.row(i);
    for (int j = 0; j < xm.cols; ++j) s += r[j];
    n.value.data[static_cast<size_t>(i)] = static_cast<float>(s / xm.cols);
  }
  return push(std::move(n));
}

Value Tape::col_max(Value x) {
  GSSL_UNARY_PROLOGUE(x)
  if (xm.rows < 1) throw ShapeError("col_max: empty input");
  n.kind = OpKind::col_max;
  n.value = DenseMatrix(1, xm.cols);
  n.idx.assign(static_cast<size_t>(xm.cols), 0);
  for (int j = 0; j < xm.cols; ++j) {
    float best = xm.at(0, j);
    int arg = 0;
    for (int i = 1; i < xm.rows; ++i) {
      if (xm.at(i, j) > best) {
        best = xm.at(i, j);
        arg = i;
      }
    }
    n.value.data[static_cast<size_t>(j)] = best;
    n.idx[static_cast<size_t>(j)] = arg;
  }
  return push(std::move(n));
}

Value Tape::gather_rows(Value x, std::vector<int> idx) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::gather_rows;
  n.value = DenseMatrix(static_cast<int>(idx.size()), xm.cols);
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= xm.rows) throw ShapeError("gather_rows: index out of range");
    std::copy(xm.row(idx[i]), xm.row(idx[i]) + xm.cols, n.value.row(static_cast<int>(i)));
  }
  n.idx = std::move(idx);
  return push(std::move(n));
}

Value Tape::replace_rows(Value x, std::vector<int> idx, Value row) {
  const DenseMatrix& xm = node(x).value;
  const DenseMatrix& rm = node(row).value;
  if (rm.rows != 1 || rm.cols != xm.cols)
    throw ShapeError("replace_rows: row " + rm.shape_str() + " vs x " + xm.shape_str());
  Node n;
  n.kind = OpKind::replace_rows;
  n.inputs = {x.id, row.id};
  n.requires_grad = node(x).requires_grad || node(row).requires_grad;
  n.value = xm;
  for (int i : idx) {
    if (i < 0 || i >= xm.rows) throw ShapeError("replace_rows: index out of range");
    std::copy(rm.data.begin(), rm.data.end(), n.value.row(i));
  }
  n.idx = std::move(idx);
  return push(std::move(n));
}

Value Tape::concat_cols(Value a, Value b) {
  const DenseMatrix& am = node(a).value;
  const DenseMatrix& bm = node(b).value;
  if (am.rows != bm.rows)
    throw ShapeError("concat_cols " + am.shape_str() + " | " + bm.shape_str());
  Node n;
  n.kind = OpKind::concat_cols;
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = DenseMatrix(am.rows, am.cols + bm.cols);
  for (int i = 0; i < am.rows; ++i) {
    std::copy(am.row(i), am.row(i) + am.cols, n.value.row(i));
    std::copy(bm.row(i), bm.row(i) + bm.cols, n.value.row(i) + am.cols);
  }
  n.scalar = static_cast<float>(am.cols);  // split point
  return push(std::move(n));
}

Value Tape::concat_rows(Value a, Value b) {
  const DenseMatrix& am = node(a).value;
  const DenseMatrix& bm = node(b).value;
  if (am.cols != bm.cols)
    throw ShapeError("concat_rows " + am.shape_str() + " / " + bm.shape_str());
  Node n;
  n.kind = OpKind::concat_rows;
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = DenseMatrix(am.rows + bm.rows, am.cols);
  std::copy(am.data.begin(), am.data.end(), n.value.data.begin());
  std::copy(bm.data.begin(), bm.data.end(), n.value.data.begin() + am.data.size());
  n.scalar = static_cast<float>(am.rows);  // split point
  return push(std::move(n));
}

Value Tape::gather_entries(Value x, std::vector<std::pair<int, int>> coords) {
  GSSL_UNARY_PROLOGUE(x)
  n.kind = OpKind::gather_entries;
  n.value = DenseMatrix(static_cast<int>(coords.size()), 1);
  for (size_t i = 0; i < coords.size(); ++i) {
    const auto [r, c] = coords[i];
    if (r < 0 || r >= xm.rows || c < 0 || c >= xm.cols)
      throw ShapeError("gather_entries: coordinate out of range");
    n.value.data[i] = xm.at(r, c);
  }
  n.coords = std::move(coords);
  return push(std::move(n));
}

Value Tape::masked_row_lse(Value x, DenseMatrix keep_mask) {
  GSSL_UNARY_PROLOGUE(x)
  if (!keep_mask.same_shape(xm)) throw ShapeError("masked_row_lse: mask shape mismatch");
  n.kind = OpKind::masked_row_lse;
  n.value = DenseMatrix(xm.rows, 1);
  for (int i = 0; i < xm.rows; ++i) {
    float m = -std::numeric_limits<float>::infinity();
    for (int j = 0; j < xm.cols; ++j)
      if (keep_mask.at(i, j) != 0.0f) m = std::max(m, xm.at(i, j));
    if (!std::isfinite(m)) throw ContractError("masked_row_lse: row " + std::to_string(i) + " keeps nothing");
    double s = 0.0;
    for (int j = 0; j < xm.cols; ++j)
      if (keep_mask.at(i, j) != 0.0f) s += std::exp(static_cast<double>(xm.at(i, j)) - m);
    n.value.data[static_cast<size_t>(i)] = m + static_cast<float>(std::log(s));
  }
  n.aux = std::move(keep_mask);
  return push(std::move(n));
}

void Tape::accumulate(int id, const DenseMatrix& g) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (!n.requires_grad) return;
  if (n.grad.data.empty()) n.grad = DenseMatrix(n.value.rows, n.value.cols);
  axpy(n.grad, 1.0f, g);
}

// Dispatches one node's backward rule, pushing grads to its inputs.
void Tape::backward_node(int id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  const DenseMatrix& g = n.grad;
  auto in = [&](int k) -> Node& { return nodes_[static_cast<size_t>(n.inputs[static_cast<size_t>(k)])]; };
  auto in_id = [&](int k) { return n.inputs[static_cast<size_t>(k)]; };

  switch (n.kind) {
    case OpKind::leaf:
      break;
    case OpKind::matmul: {
      if (in(0).requires_grad) accumulate(in_id(0), gssl::matmul_nt(g, in(1).value));
      if (in(1).requires_grad) accumulate(in_id(1), gssl::matmul_tn(in(0).value, g));
      break;
    }
    case OpKind::matmul_nt: {
      if (in(0).requires_grad) accumulate(in_id(0), gssl::matmul(g, in(1).value));
      if (in(1).requires_grad) accumulate(in_id(1), gssl::matmul_tn(g, in(0).value));
      break;
    }
    case OpKind::spmm: {
      if (in(0).requires_grad) accumulate(in_id(0), gssl::spmm_transpose(n.sparse, g));
      break;
    }
    case OpKind::add: {
      if (in(0).requires_grad) accumulate(in_id(0), g);
      if (in(1).requires_grad) accumulate(in_id(1), g);
      break;
    }
    case OpKind::add_row_bias: {
      if (in(0).requires_grad) accumulate(in_id(0), g);
      if (in(1).requires_grad) {
        DenseMatrix gb(1, g.cols);
        std::vector<double> acc(static_cast<size_t>(g.cols), 0.0);
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < g.cols; ++j) acc[static_cast<size_t>(j)] += g.at(i, j);
        for (int j = 0; j < g.cols; ++j) gb.data[static_cast<size_t>(j)] = static_cast<float>(acc[static_cast<size_t>(j)]);
        accumulate(in_id(1), gb);
      }
      break;
    }
    case OpKind::add_scalar: {
      if (in(0).requires_grad) accumulate(in_id(0), g);
      break;
    }
    case OpKind::mul: {
      if (in(0).requires_grad) accumulate(in_id(0), gssl::mul(g, in(1).value));
      if (in(1).requires_grad) accumulate(in_id(1), gssl::mul(g, in(0).value));
      break;
    }
    case OpKind::scale: {
      if (in(0).requires_grad) accumulate(in_id(0), gssl::scale(g, n.scalar));
      break;
    }
    case OpKind::relu: {
      if (in(0).requires_grad) {
        DenseMatrix gx = g;
        const DenseMatrix& x = in(0).value;
        for (size_t i = 0; i < gx.size(); ++i)
          if (x.data[i] <= 0.0f) gx.data[i] = 0.0f;
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::prelu: {
      const DenseMatrix& x = in(0).value;
      const float a = in(1).value.data[0];
      if (in(0).requires_grad) {
        DenseMatrix gx = g;
        for (size_t i = 0; i < gx.size(); ++i)
          if (x.data[i] <= 0.0f) gx.data[i] *= a;
        accumulate(in_id(0), gx);
      }
      if (in(1).requires_grad) {
        double s = 0.0;
        for (size_t i = 0; i < x.size(); ++i)
          if (x.data[i] <= 0.0f) s += static_cast<double>(g.data[i]) * x.data[i];
        accumulate(in_id(1), DenseMatrix(1, 1, {static_cast<float>(s)}));
      }
      break;
    }
    case OpKind::sigmoid: {
      if (in(0).requires_grad) {
        DenseMatrix gx = g;
        for (size_t i = 0; i < gx.size(); ++i) {
          const float y = n.value.data[i];
          gx.data[i] *= y * (1.0f - y);
        }
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::tanh_fn: {
      if (in(0).requires_grad) {
        DenseMatrix gx = g;
        for (size_t i = 0; i < gx.size(); ++i) {
          const float y = n.value.data[i];
          gx.data[i] *= 1.0f - y * y;
        }
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::exp_fn: {
      if (in(0).requires_grad) accumulate(in_id(0), gssl::mul(g, n.value));
      break;
    }
    case OpKind::log_fn: {
      if (in(0).requires_grad) {
        DenseMatrix gx = g;
        const DenseMatrix& x = in(0).value;
        for (size_t i = 0; i < gx.size(); ++i) gx.data[i] /= x.data[i];
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::softplus: {
      if (in(0).requires_grad) {
        DenseMatrix gx = g;
        const DenseMatrix& x = in(0).value;
        for (size_t i = 0; i < gx.size(); ++i) {
          const float xv = x.data[i];
          float s;
          if (xv >= 0.0f) {
            s = 1.0f / (1.0f + std::exp(-xv));
          } else {
            const float e = std::exp(xv);
            s = e / (1.0f + e);
          }
          gx.data[i] *= s;
        }
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::pow_scalar: {
      if (in(0).requires_grad) {
        DenseMatrix gx = g;
        const DenseMatrix& x = in(0).value;
        const float p = n.scalar;
        for (size_t i = 0; i < gx.size(); ++i) {
          const float xv = x.data[i];
          const float f = (xv == 0.0f) ? (p == 1.0f ? 1.0f : 0.0f) : p * std::pow(xv, p - 1.0f);
          gx.data[i] *= f;
        }
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::row_l2_normalize: {
      if (in(0).requires_grad) {
        const DenseMatrix& y = n.value;  // normalized rows
        DenseMatrix gx(y.rows, y.cols);
        for (int i = 0; i < y.rows; ++i) {
          const float norm = n.aux.data[static_cast<size_t>(i)];
          const float inv = 1.0f / std::max(norm, kNormEps);
          const float* gi = g.row(i);
          const float* yi = y.row(i);
          float* oi = gx.row(i);
          if (norm < kNormEps) {
            // Guarded branch: divisor was the constant eps.
            for (int j = 0; j < y.cols; ++j) oi[j] = gi[j] * inv;
          } else {
            double dot = 0.0;
            for (int j = 0; j < y.cols; ++j) dot += static_cast<double>(gi[j]) * yi[j];
            for (int j = 0; j < y.cols; ++j)
              oi[j] = inv * (gi[j] - static_cast<float>(dot) * yi[j]);
          }
        }
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::sum_all: {
      if (in(0).requires_grad) {
        const DenseMatrix& x = in(0).value;
        accumulate(in_id(0), DenseMatrix(x.rows, x.cols, g.data[0]));
      }
      break;
    }
    case OpKind::mean_all: {
      if (in(0).requires_grad) {
        const DenseMatrix& x = in(0).value;
        accumulate(in_id(0), DenseMatrix(x.rows, x.cols, g.data[0] / static_cast<float>(x.size())));
      }
      break;
    }
    case OpKind::col_sum:
    case OpKind::col_mean: {
      if (in(0).requires_grad) {
        const DenseMatrix& x = in(0).value;
        const float f = n.kind == OpKind::col_mean ? 1.0f / static_cast<float>(x.rows) : 1.0f;
        DenseMatrix gx(x.rows, x.cols);
        for (int i = 0; i < x.rows; ++i)
          for (int j = 0; j < x.cols; ++j) gx.at(i, j) = g.data[static_cast<size_t>(j)] * f;
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::row_sum:
    case OpKind::row_mean: {
      if (in(0).requires_grad) {
        const DenseMatrix& x = in(0).value;
        const float f = n.kind == OpKind::row_mean ? 1.0f / static_cast<float>(x.cols) : 1.0f;
        DenseMatrix gx(x.rows, x.cols);
        for (int i = 0; i < x.rows; ++i) {
          const float gi = g.data[static_cast<size_t>(i)] * f;
          for (int j = 0; j < x.cols; ++j) gx.at(i, j) = gi;
        }
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::col_max: {
      if (in(0).requires_grad) {
        const DenseMatrix& x = in(0).value;
        DenseMatrix gx(x.rows, x.cols);
        for (int j = 0; j < x.cols; ++j) gx.at(n.idx[static_cast<size_t>(j)], j) = g.data[static_cast<size_t>(j)];
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::gather_rows: {
      if (in(0).requires_grad) {
        const DenseMatrix& x = in(0).value;
        DenseMatrix gx(x.rows, x.cols);
        for (size_t i = 0; i < n.idx.size(); ++i) {
          const float* gi = g.row(static_cast<int>(i));
          float* oi = gx.row(n.idx[i]);
          for (int j = 0; j < x.cols; ++j) oi[j] += gi[j];
        }
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::replace_rows: {
      std::vector<bool> replaced(static_cast<size_t>(n.value.rows), false);
      for (int i : n.idx) replaced[static_cast<size_t>(i)] = true;
      if (in(0).requires_grad) {
        DenseMatrix gx = g;
        for (int i = 0; i < gx.rows; ++i)
          if (replaced[static_cast<size_t>(i)])
            std::fill(gx.row(i), gx.row(i) + gx.cols, 0.0f);
        accumulate(in_id(0), gx);
      }
      if (in(1).requires_grad) {
        DenseMatrix gr(1, g.cols);
        std::vector<double> acc(static_cast<size_t>(g.cols), 0.0);
        for (int i : n.idx)
          for (int j = 0; j < g.cols; ++j) acc[static_cast<size_t>(j)] += g.at(i, j);
        for (int j = 0; j < g.cols; ++j) gr.data[static_cast<size_t>(j)] = static_cast<float>(acc[static_cast<size_t>(j)]);
        accumulate(in_id(1), gr);
      }
      break;
    }
    case OpKind::concat_cols: {
      const int split = static_cast<int>(n.scalar);
      if (in(0).requires_grad) {
        DenseMatrix ga(g.rows, split);
        for (int i = 0; i < g.rows; ++i) std::copy(g.row(i), g.row(i) + split, ga.row(i));
        accumulate(in_id(0), ga);
      }
      if (in(1).requires_grad) {
        DenseMatrix gb(g.rows, g.cols - split);
        for (int i = 0; i < g.rows; ++i)
          std::copy(g.row(i) + split, g.row(i) + g.cols, gb.row(i));
        accumulate(in_id(1), gb);
      }
      break;
    }
    case OpKind::concat_rows: {
      const int split = static_cast<int>(n.scalar);
      if (in(0).requires_grad) {
        DenseMatrix ga(split, g.cols);
        std::copy(g.data.begin(), g.data.begin() + ga.data.size(), ga.data.begin());
        accumulate(in_id(0), ga);
      }
      if (in(1).requires_grad) {
        DenseMatrix gb(g.rows - split, g.cols);
        std::copy(g.data.begin() + static_cast<long>(split) * g.cols, g.data.end(), gb.data.begin());
        accumulate(in_id(1), gb);
      }
      break;
    }
    case OpKind::gather_entries: {
      if (in(0).requires_grad) {
        const DenseMatrix& x = in(0).value;
        DenseMatrix gx(x.rows, x.cols);
        for (size_t i = 0; i < n.coords.size(); ++i)
          gx.at(n.coords[i].first, n.coords[i].second) += g.data[i];
        accumulate(in_id(0), gx);
      }
      break;
    }
    case OpKind::masked_row_lse: {
      if (in(0).requires_grad) {
        const DenseMatrix& x = in(0).value;
        DenseMatrix gx(x.rows, x.cols);
        for (int i = 0; i < x.rows; ++i) {
          const float lse = n.value.data[static_cast<size_t>(i)];
          const float gi = g.data[static_cast<size_t>(i)];
          for (int j = 0; j < x.cols; ++j)
            if (n.aux.at(i, j) != 0.0f)
              gx.at(i, j) = gi * std::exp(x.at(i, j) - lse);
        }
        accumulate(in_id(0), gx);
      }
      break;
    }
  }
}

void Tape::backward(Value loss) {
  Node& ln = node(loss);
  if (ln.value.rows != 1 || ln.value.cols != 1)
    throw ContractError("backward: loss node must be 1x1, got " + ln.value.shape_str());

  for (Node& n : nodes_) n.grad.data.clear();
  ln.grad = DenseMatrix(1, 1, {1.0f});
  if (!ln.requires_grad) {
    // Loss does not depend on any parameter; nothing reachable.
    return;
  }

  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.data.empty() || !n.requires_grad) continue;
    backward_node(id);
  }

  for (const auto& [p, id] : param_nodes_) {
    const Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.grad.data.empty()) axpy(p->grad, 1.0f, n.grad);
  }
}

}  // namespace gssl
