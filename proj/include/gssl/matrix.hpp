#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gssl {

// Row-major dense float32 matrix. The numeric substrate for features,
// hidden representations and weights.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;  // length rows*cols

  DenseMatrix() = default;
  DenseMatrix(int r, int c, float fill = 0.0f);
  DenseMatrix(int r, int c, std::vector<float> d);

  float& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  float at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  const float* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
  float* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
  size_t size() const { return data.size(); }

  bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }
  bool all_finite() const;
  std::string shape_str() const;
};

// CSR sparse float32 matrix. Houses adjacency and diffusion matrices.
struct SparseMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> row_ptr;   // length n_rows+1, non-decreasing, row_ptr[0]==0
  std::vector<int> col_idx;   // strictly increasing within each row, < n_cols
  std::vector<float> values;  // same length as col_idx

  SparseMatrix() = default;
  SparseMatrix(int r, int c) : n_rows(r), n_cols(c), row_ptr(static_cast<size_t>(r) + 1, 0) {}

  int nnz() const { return static_cast<int>(col_idx.size()); }
  // Validates the CSR invariants; throws ShapeError on violation.
  void check_valid() const;
  DenseMatrix to_dense() const;

  // Builds a CSR matrix from (row, col, value) triplets; duplicates are an error.
  static SparseMatrix from_triplets(int n_rows, int n_cols,
                                    std::vector<std::tuple<int, int, float>> triplets);
  static SparseMatrix identity(int n);
};

// Dense kernels. All sequential and deterministic.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a * b^T
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
// a^T * b
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix mul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, float s);

// sparse * dense
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x);
// a^T * g, same layout as spmm but scattering through the transpose.
DenseMatrix spmm_transpose(const SparseMatrix& a, const DenseMatrix& g);

// In-place axpy: y += alpha * x (shapes must match).
void axpy(DenseMatrix& y, float alpha, const DenseMatrix& x);

double frobenius_norm(const DenseMatrix& a);

// Solves A * X = B in-place via partial-pivot LU; A and B are overwritten,
// the solution lands in B. Used by the dense PPR path and PCA checks.
void solve_inplace(DenseMatrix& a, DenseMatrix& b);

}  // namespace gssl
