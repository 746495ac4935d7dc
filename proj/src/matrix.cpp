#include "gssl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "gssl/errors.hpp"

namespace gssl {

DenseMatrix::DenseMatrix(int r, int c, float fill)
    : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {
  if (r < 0 || c < 0) throw ShapeError("negative dimension");
}

DenseMatrix::DenseMatrix(int r, int c, std::vector<float> d) : rows(r), cols(c), data(std::move(d)) {
  if (data.size() != static_cast<size_t>(r) * static_cast<size_t>(c))
    throw ShapeError("data length does not match rows*cols");
}

bool DenseMatrix::all_finite() const {
  for (float v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string DenseMatrix::shape_str() const {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void SparseMatrix::check_valid() const {
  if (row_ptr.size() != static_cast<size_t>(n_rows) + 1) throw ShapeError("row_ptr length");
  if (row_ptr.front() != 0) throw ShapeError("row_ptr[0] != 0");
  if (row_ptr.back() != nnz()) throw ShapeError("row_ptr[n_rows] != nnz");
  if (col_idx.size() != values.size()) throw ShapeError("col_idx/values length mismatch");
  for (int i = 0; i < n_rows; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) throw ShapeError("row_ptr not non-decreasing");
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] < 0 || col_idx[k] >= n_cols) throw ShapeError("column index out of range");
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1])
        throw ShapeError("column indices not strictly increasing within row");
    }
  }
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out(n_rows, n_cols);
  for (int i = 0; i < n_rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) out.at(i, col_idx[k]) = values[k];
  return out;
}

SparseMatrix SparseMatrix::from_triplets(int n_rows, int n_cols,
                                         std::vector<std::tuple<int, int, float>> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  SparseMatrix m(n_rows, n_cols);
  m.col_idx.reserve(triplets.size());
  m.values.reserve(triplets.size());
  int prev_r = -1, prev_c = -1;
  for (const auto& [r, c, v] : triplets) {
    if (r < 0 || r >= n_rows || c < 0 || c >= n_cols)
      throw ShapeError("triplet index out of range");
    if (r == prev_r && c == prev_c) throw ShapeError("duplicate triplet");
    m.col_idx.push_back(c);
    m.values.push_back(v);
    for (int i = prev_r + 1; i <= r; ++i) m.row_ptr[i] = static_cast<int>(m.col_idx.size()) - 1;
    prev_r = r;
    prev_c = c;
  }
  for (int i = prev_r + 1; i <= n_rows; ++i) m.row_ptr[i] = static_cast<int>(m.col_idx.size());
  m.check_valid();
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix m(n, n);
  m.col_idx.resize(n);
  m.values.assign(n, 1.0f);
  for (int i = 0; i < n; ++i) {
    m.col_idx[i] = i;
    m.row_ptr[i + 1] = i + 1;
  }
  return m;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows)
    throw ShapeError("matmul " + a.shape_str() + " x " + b.shape_str());
  DenseMatrix out(a.rows, b.cols);
  // ikj order keeps the inner loop contiguous.
  for (int i = 0; i < a.rows; ++i) {
    float* oi = out.row(i);
    const float* ai = a.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const float aik = ai[k];
      if (aik == 0.0f) continue;
      const float* bk = b.row(k);
      for (int j = 0; j < b.cols; ++j) oi[j] += aik * bk[j];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.cols)
    throw ShapeError("matmul_nt " + a.shape_str() + " x " + b.shape_str() + "^T");
  DenseMatrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const float* ai = a.row(i);
    float* oi = out.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const float* bj = b.row(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += static_cast<double>(ai[k]) * bj[k];
      oi[j] = static_cast<float>(acc);
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows)
    throw ShapeError("matmul_tn " + a.shape_str() + "^T x " + b.shape_str());
  DenseMatrix out(a.cols, b.cols);
  for (int k = 0; k < a.rows; ++k) {
    const float* ak = a.row(k);
    const float* bk = b.row(k);
    for (int i = 0; i < a.cols; ++i) {
      const float aki = ak[i];
      if (aki == 0.0f) continue;
      float* oi = out.row(i);
      for (int j = 0; j < b.cols; ++j) oi[j] += aki * bk[j];
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
  return out;
}

static void check_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + " " + a.shape_str() + " vs " + b.shape_str());
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "add");
  DenseMatrix out = a;
  for (size_t i = 0; i < out.size(); ++i) out.data[i] += b.data[i];
  return out;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "sub");
  DenseMatrix out = a;
  for (size_t i = 0; i < out.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

DenseMatrix mul(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "mul");
  DenseMatrix out = a;
  for (size_t i = 0; i < out.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

DenseMatrix scale(const DenseMatrix& a, float s) {
  DenseMatrix out = a;
  for (float& v : out.data) v *= s;
  return out;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x) {
  if (a.n_cols != x.rows)
    throw ShapeError("spmm " + std::to_string(a.n_rows) + "x" + std::to_string(a.n_cols) + " x " +
                     x.shape_str());
  DenseMatrix out(a.n_rows, x.cols);
  for (int i = 0; i < a.n_rows; ++i) {
    float* oi = out.row(i);
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const float v = a.values[k];
      const float* xr = x.row(a.col_idx[k]);
      for (int j = 0; j < x.cols; ++j) oi[j] += v * xr[j];
    }
  }
  return out;
}

DenseMatrix spmm_transpose(const SparseMatrix& a, const DenseMatrix& g) {
  if (a.n_rows != g.rows)
    throw ShapeError("spmm_transpose: a has " + std::to_string(a.n_rows) + " rows, g has " +
                     std::to_string(g.rows));
  DenseMatrix out(a.n_cols, g.cols);
  for (int i = 0; i < a.n_rows; ++i) {
    const float* gi = g.row(i);
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const float v = a.values[k];
      float* oj = out.row(a.col_idx[k]);
      for (int j = 0; j < g.cols; ++j) oj[j] += v * gi[j];
    }
  }
  return out;
}

void axpy(DenseMatrix& y, float alpha, const DenseMatrix& x) {
  check_same_shape(y, x, "axpy");
  for (size_t i = 0; i < y.size(); ++i) y.data[i] += alpha * x.data[i];
}

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (float v : a.data) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

void solve_inplace(DenseMatrix& a, DenseMatrix& b) {
  if (a.rows != a.cols) throw ShapeError("solve: matrix not square");
  if (a.rows != b.rows) throw ShapeError("solve: rhs row mismatch");
  const int n = a.rows;
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    float best_abs = std::fabs(a.at(col, col));
    for (int r = col + 1; r < n; ++r) {
      const float v = std::fabs(a.at(r, col));
      if (v > best_abs) {
        best = r;
        best_abs = v;
      }
    }
    if (best_abs == 0.0f) throw Error("solve: singular matrix");
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(a.at(col, j), a.at(best, j));
      for (int j = 0; j < b.cols; ++j) std::swap(b.at(col, j), b.at(best, j));
    }
    const float d = a.at(col, col);
    for (int r = col + 1; r < n; ++r) {
      const float f = a.at(r, col) / d;
      if (f == 0.0f) continue;
      a.at(r, col) = 0.0f;
      for (int j = col + 1; j < n; ++j) a.at(r, j) -= f * a.at(col, j);
      for (int j = 0; j < b.cols; ++j) b.at(r, j) -= f * b.at(col, j);
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    const float d = a.at(col, col);
    for (int j = 0; j < b.cols; ++j) b.at(col, j) /= d;
    for (int r = 0; r < col; ++r) {
      const float f = a.at(r, col);
      if (f == 0.0f) continue;
      for (int j = 0; j < b.cols; ++j) b.at(r, j) -= f * b.at(col, j);
    }
  }
}

}  // namespace gssl
