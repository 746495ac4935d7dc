#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gssl/matrix.hpp"

namespace gssl {

// Op vocabulary of the tape. all_op_kinds() enumerates every entry so the
// gradient suite can assert full coverage.
enum class OpKind {
  leaf,
  matmul,
  matmul_nt,
  spmm,
  add,
  add_row_bias,
  add_scalar,
  mul,
  scale,
  relu,
  prelu,
  sigmoid,
  tanh_fn,
  exp_fn,
  log_fn,
  softplus,
  pow_scalar,
  row_l2_normalize,
  sum_all,
  mean_all,
  col_sum,
  col_mean,
  row_sum,
  row_mean,
  col_max,
  gather_rows,
  replace_rows,
  concat_cols,
  concat_rows,
  gather_entries,
  masked_row_lse,
};

const char* op_name(OpKind k);
std::vector<OpKind> all_op_kinds();  // excludes leaf

struct Parameter;

// Handle to a tape node. Cheap to copy; only valid for the tape that made it.
struct Value {
  int id = -1;
  int rows = 0;
  int cols = 0;
  bool valid() const { return id >= 0; }
};

// Reverse-mode autodiff over dense matrices, define-by-run. One tape per
// training step; entries are appended in topological order by construction.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves.
  Value constant(DenseMatrix v);
  Value param(Parameter& p);  // differentiable leaf; repeated binds reuse one node

  const DenseMatrix& value(Value v) const;
  size_t size() const { return nodes_.size(); }

  // Linear algebra.
  Value matmul(Value a, Value b);
  Value matmul_nt(Value a, Value b);  // a * b^T
  Value spmm(const SparseMatrix& a, Value x);

  // Elementwise / broadcast arithmetic.
  Value add(Value a, Value b);
  Value add_row_bias(Value x, Value bias);  // (n x d) + (1 x d)
  Value add_scalar(Value x, float c);
  Value mul(Value a, Value b);
  Value scale(Value x, float s);

  // Nonlinearities.
  Value relu(Value x);
  Value prelu(Value x, Value slope);  // slope is 1x1
  Value sigmoid(Value x);
  Value tanh(Value x);
  Value exp(Value x);
  Value log(Value x);
  Value softplus(Value x);
  Value pow_scalar(Value x, float p);  // elementwise x^p, x >= 0, p >= 1

  Value row_l2_normalize(Value x);

  // Reductions.
  Value sum_all(Value x);   // 1x1
  Value mean_all(Value x);  // 1x1
  Value col_sum(Value x);   // 1 x d (down each column)
  Value col_mean(Value x);
  Value row_sum(Value x);  // n x 1 (across each row)
  Value row_mean(Value x);
  Value col_max(Value x);  // 1 x d, subgradient routed to first argmax

  // Structure.
  Value gather_rows(Value x, std::vector<int> idx);
  Value replace_rows(Value x, std::vector<int> idx, Value row);  // row is 1 x d
  Value concat_cols(Value a, Value b);
  Value concat_rows(Value a, Value b);
  Value gather_entries(Value x, std::vector<std::pair<int, int>> coords);  // m x 1
  // Row-wise log-sum-exp over entries where keep_mask != 0; keep_mask is a
  // constant 0/1 matrix of the same shape. Every row must keep something.
  Value masked_row_lse(Value x, DenseMatrix keep_mask);

  // Accumulates d(loss)/dp into every reachable Parameter's grad. loss must
  // be 1x1. Repeated calls accumulate additively.
  void backward(Value loss);

 private:
  struct Node {
    OpKind kind = OpKind::leaf;
    std::vector<int> inputs;
    DenseMatrix value;
    DenseMatrix grad;  // allocated on demand during backward
    bool requires_grad = false;
    Parameter* bound = nullptr;
    // Saved forward context (op-specific; unused fields stay empty).
    SparseMatrix sparse;
    std::vector<int> idx;
    std::vector<std::pair<int, int>> coords;
    DenseMatrix aux;
    float scalar = 0.0f;
  };

  Value push(Node n);
  Node& node(Value v);
  const Node& node(Value v) const;
  void accumulate(int id, const DenseMatrix& g);
  void backward_node(int id);

  std::vector<Node> nodes_;
  std::vector<std::pair<Parameter*, int>> param_nodes_;
};

}  // namespace gssl
