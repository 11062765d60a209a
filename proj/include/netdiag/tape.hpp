#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "netdiag/errors.hpp"
#include "netdiag/matrix.hpp"

namespace netdiag {

// Reverse-mode autodiff over dense matrices. A Tape owns the forward values
// and gradients of every node; backward() walks the nodes in reverse
// creation order. Coarse-grained ops keep the bookkeeping cost negligible
// next to the arithmetic.
class Tape {
 public:
  using Var = int;

  Var leaf(Matrix value) { return push(Op::Leaf, -1, -1, std::move(value)); }

  // a (r x k) times b (k x c)
  Var matmul(Var a, Var b) {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    if (A.cols != B.rows) throw DimMismatch("matmul inner dimensions differ");
    Matrix out(A.rows, B.cols);
    gemm_nn(A, B, out);
    return push(Op::MatMul, a, b, std::move(out));
  }

  // a (r x k) times b^T where b is (c x k)
  Var matmul_bt(Var a, Var b) {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    if (A.cols != B.cols) throw DimMismatch("matmul_bt inner dimensions differ");
    Matrix out(A.rows, B.rows);
    for (int i = 0; i < A.rows; ++i) {
      const double* arow = A.row(i);
      double* orow = out.row(i);
      for (int j = 0; j < B.rows; ++j) {
        const double* brow = B.row(j);
        double acc = 0.0;
        for (int k = 0; k < A.cols; ++k) acc += arow[k] * brow[k];
        orow[j] = acc;
      }
    }
    return push(Op::MatMulBt, a, b, std::move(out));
  }

  Var add(Var a, Var b) {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    if (!A.same_shape(B)) throw DimMismatch("add on mismatched shapes");
    Matrix out = A;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += B.data[i];
    return push(Op::Add, a, b, std::move(out));
  }

  // Adds a 1 x c bias row to every row of a.
  Var add_row(Var a, Var bias) {
    const Matrix& A = value(a);
    const Matrix& B = value(bias);
    if (B.rows != 1 || B.cols != A.cols) throw DimMismatch("bias must be 1 x cols");
    Matrix out = A;
    for (int r = 0; r < out.rows; ++r) {
      double* row = out.row(r);
      for (int c = 0; c < out.cols; ++c) row[c] += B.data[static_cast<std::size_t>(c)];
    }
    return push(Op::AddRow, a, bias, std::move(out));
  }

  Var scale(Var a, double s) {
    Matrix out = value(a);
    for (double& v : out.data) v *= s;
    Var id = push(Op::Scale, a, -1, std::move(out));
    nodes_[static_cast<std::size_t>(id)].scalar = s;
    return id;
  }

  Var hadamard(Var a, Var b) {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    if (!A.same_shape(B)) throw DimMismatch("hadamard on mismatched shapes");
    Matrix out = A;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= B.data[i];
    return push(Op::Hadamard, a, b, std::move(out));
  }

  Var leaky_relu(Var a, double slope) {
    Matrix out = value(a);
    for (double& v : out.data) v = v > 0.0 ? v : slope * v;
    Var id = push(Op::LeakyRelu, a, -1, std::move(out));
    nodes_[static_cast<std::size_t>(id)].scalar = slope;
    return id;
  }

  Var elu(Var a) {
    Matrix out = value(a);
    for (double& v : out.data) v = v > 0.0 ? v : std::expm1(v);
    return push(Op::Elu, a, -1, std::move(out));
  }

  Var gather_rows(Var a, std::vector<int> idx) {
    const Matrix& A = value(a);
    Matrix out(static_cast<int>(idx.size()), A.cols);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (int c = 0; c < A.cols; ++c) out.at(static_cast<int>(r), c) = A.at(idx[r], c);
    Var id = push(Op::GatherRows, a, -1, std::move(out));
    nodes_[static_cast<std::size_t>(id)].idx = std::move(idx);
    return id;
  }

  Var scatter_add_rows(Var a, std::vector<int> dst, int n_out) {
    const Matrix& A = value(a);
    if (static_cast<int>(dst.size()) != A.rows)
      throw DimMismatch("scatter index count differs from row count");
    Matrix out(n_out, A.cols);
    for (std::size_t r = 0; r < dst.size(); ++r)
      for (int c = 0; c < A.cols; ++c) out.at(dst[r], c) += A.at(static_cast<int>(r), c);
    Var id = push(Op::ScatterAddRows, a, -1, std::move(out));
    nodes_[static_cast<std::size_t>(id)].idx = std::move(dst);
    return id;
  }

  // Stable per-destination softmax over per-edge scores (E x 1).
  Var edge_softmax(Var scores, std::vector<int> dst, int n_nodes) {
    const Matrix& S = value(scores);
    if (S.cols != 1 || static_cast<int>(dst.size()) != S.rows)
      throw DimMismatch("edge_softmax expects E x 1 scores with one segment id per row");
    std::vector<double> seg_max(static_cast<std::size_t>(n_nodes), -1e300);
    for (std::size_t e = 0; e < dst.size(); ++e)
      seg_max[static_cast<std::size_t>(dst[e])] =
          std::max(seg_max[static_cast<std::size_t>(dst[e])], S.data[e]);
    Matrix out(S.rows, 1);
    std::vector<double> seg_sum(static_cast<std::size_t>(n_nodes), 0.0);
    for (std::size_t e = 0; e < dst.size(); ++e) {
      out.data[e] = std::exp(S.data[e] - seg_max[static_cast<std::size_t>(dst[e])]);
      seg_sum[static_cast<std::size_t>(dst[e])] += out.data[e];
    }
    for (std::size_t e = 0; e < dst.size(); ++e) out.data[e] /= seg_sum[static_cast<std::size_t>(dst[e])];
    Var id = push(Op::EdgeSoftmax, scores, -1, std::move(out));
    nodes_[static_cast<std::size_t>(id)].idx = std::move(dst);
    nodes_[static_cast<std::size_t>(id)].aux = n_nodes;
    return id;
  }

  // Scales row r of a by col[r] (col is E x 1).
  Var mul_col(Var a, Var col) {
    const Matrix& A = value(a);
    const Matrix& C = value(col);
    if (C.cols != 1 || C.rows != A.rows) throw DimMismatch("mul_col expects an E x 1 scale");
    Matrix out = A;
    for (int r = 0; r < out.rows; ++r) {
      const double s = C.data[static_cast<std::size_t>(r)];
      double* row = out.row(r);
      for (int c = 0; c < out.cols; ++c) row[c] *= s;
    }
    return push(Op::MulCol, a, col, std::move(out));
  }

  Var mean_rows(Var a) {
    const Matrix& A = value(a);
    Matrix out(1, A.cols);
    for (int r = 0; r < A.rows; ++r)
      for (int c = 0; c < A.cols; ++c) out.data[static_cast<std::size_t>(c)] += A.at(r, c);
    for (double& v : out.data) v /= A.rows;
    return push(Op::MeanRows, a, -1, std::move(out));
  }

  Var concat_cols(const std::vector<Var>& parts) { return concat(parts, /*along_rows=*/false); }
  Var concat_rows(const std::vector<Var>& parts) { return concat(parts, /*along_rows=*/true); }

  Var softmax_row(Var a) {
    const Matrix& A = value(a);
    Matrix out = A;
    for (int r = 0; r < out.rows; ++r) {
      double* row = out.row(r);
      double mx = row[0];
      for (int c = 1; c < out.cols; ++c) mx = std::max(mx, row[c]);
      double sum = 0.0;
      for (int c = 0; c < out.cols; ++c) {
        row[c] = std::exp(row[c] - mx);
        sum += row[c];
      }
      for (int c = 0; c < out.cols; ++c) row[c] /= sum;
    }
    return push(Op::SoftmaxRow, a, -1, std::move(out));
  }

  // Cross-entropy of a single 1 x C logit row against an integer label.
  Var cross_entropy_logits(Var logits, int label) {
    const Matrix& L = value(logits);
    if (L.rows != 1 || label < 0 || label >= L.cols)
      throw DimMismatch("cross_entropy_logits expects a 1 x C row and a valid label");
    double mx = L.data[0];
    for (int c = 1; c < L.cols; ++c) mx = std::max(mx, L.data[static_cast<std::size_t>(c)]);
    double lse = 0.0;
    for (int c = 0; c < L.cols; ++c) lse += std::exp(L.data[static_cast<std::size_t>(c)] - mx);
    lse = std::log(lse) + mx;
    Matrix out(1, 1);
    out.data[0] = lse - L.data[static_cast<std::size_t>(label)];
    Var id = push(Op::CrossEntropyLogits, logits, -1, std::move(out));
    nodes_[static_cast<std::size_t>(id)].aux = label;
    return id;
  }

  const Matrix& value(Var v) const { return nodes_[static_cast<std::size_t>(v)].value; }
  const Matrix& grad(Var v) const { return nodes_[static_cast<std::size_t>(v)].grad; }

  // Seeds d(root)/d(root) = 1 and accumulates gradients into every node.
  void backward(Var root) {
    for (auto& n : nodes_) {
      n.grad = Matrix(n.value.rows, n.value.cols);
    }
    Node& r = nodes_[static_cast<std::size_t>(root)];
    if (r.value.rows != 1 || r.value.cols != 1)
      throw DimMismatch("backward root must be a scalar");
    r.grad.data[0] = 1.0;
    for (int i = root; i >= 0; --i) backstep(i);
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    Leaf,
    MatMul,
    MatMulBt,
    Add,
    AddRow,
    Scale,
    Hadamard,
    LeakyRelu,
    Elu,
    GatherRows,
    ScatterAddRows,
    EdgeSoftmax,
    MulCol,
    MeanRows,
    ConcatCols,
    ConcatRows,
    SoftmaxRow,
    CrossEntropyLogits,
  };

  struct Node {
    Op op = Op::Leaf;
    int a = -1;
    int b = -1;
    Matrix value;
    Matrix grad;
    std::vector<int> idx;      // gather/scatter/softmax segments, concat inputs
    double scalar = 0.0;
    int aux = 0;
  };

  std::vector<Node> nodes_;

  Var push(Op op, int a, int b, Matrix value) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return static_cast<Var>(nodes_.size() - 1);
  }

  static void gemm_nn(const Matrix& A, const Matrix& B, Matrix& out) {
    for (int i = 0; i < A.rows; ++i) {
      const double* arow = A.row(i);
      double* orow = out.row(i);
      for (int k = 0; k < A.cols; ++k) {
        const double av = arow[k];
        if (av == 0.0) continue;
        const double* brow = B.row(k);
        for (int j = 0; j < B.cols; ++j) orow[j] += av * brow[j];
      }
    }
  }

  Var concat(const std::vector<Var>& parts, bool along_rows) {
    if (parts.empty()) throw DimMismatch("concat of zero parts");
    int rows = value(parts[0]).rows;
    int cols = value(parts[0]).cols;
    int total = 0;
    for (Var p : parts) {
      const Matrix& M = value(p);
      if (along_rows) {
        if (M.cols != cols) throw DimMismatch("concat_rows column mismatch");
        total += M.rows;
      } else {
        if (M.rows != rows) throw DimMismatch("concat_cols row mismatch");
        total += M.cols;
      }
    }
    Matrix out = along_rows ? Matrix(total, cols) : Matrix(rows, total);
    int offset = 0;
    for (Var p : parts) {
      const Matrix& M = value(p);
      if (along_rows) {
        for (int r = 0; r < M.rows; ++r)
          for (int c = 0; c < cols; ++c) out.at(offset + r, c) = M.at(r, c);
        offset += M.rows;
      } else {
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < M.cols; ++c) out.at(r, offset + c) = M.at(r, c);
        offset += M.cols;
      }
    }
    Var id = push(along_rows ? Op::ConcatRows : Op::ConcatCols, -1, -1, std::move(out));
    nodes_[static_cast<std::size_t>(id)].idx = parts;
    return id;
  }

  void backstep(int i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul: {
        // dA += g B^T ; dB += A^T g
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        Matrix& dB = nodes_[static_cast<std::size_t>(n.b)].grad;
        const Matrix& A = nodes_[static_cast<std::size_t>(n.a)].value;
        const Matrix& B = nodes_[static_cast<std::size_t>(n.b)].value;
        for (int r = 0; r < g.rows; ++r)
          for (int j = 0; j < g.cols; ++j) {
            const double gv = g.at(r, j);
            if (gv == 0.0) continue;
            for (int k = 0; k < A.cols; ++k) dA.at(r, k) += gv * B.at(k, j);
          }
        for (int k = 0; k < A.cols; ++k)
          for (int r = 0; r < A.rows; ++r) {
            const double av = A.at(r, k);
            if (av == 0.0) continue;
            for (int j = 0; j < g.cols; ++j) dB.at(k, j) += av * g.at(r, j);
          }
        break;
      }
      case Op::MatMulBt: {
        // out = A B^T ; dA += g B ; dB += g^T A
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        Matrix& dB = nodes_[static_cast<std::size_t>(n.b)].grad;
        const Matrix& A = nodes_[static_cast<std::size_t>(n.a)].value;
        const Matrix& B = nodes_[static_cast<std::size_t>(n.b)].value;
        for (int r = 0; r < g.rows; ++r) {
          const double* grow = g.row(r);
          double* darow = dA.row(r);
          const double* arow = A.row(r);
          for (int j = 0; j < g.cols; ++j) {
            const double gv = grow[j];
            if (gv == 0.0) continue;
            const double* brow = B.row(j);
            double* dbrow = dB.row(j);
            for (int k = 0; k < A.cols; ++k) {
              darow[k] += gv * brow[k];
              dbrow[k] += gv * arow[k];
            }
          }
        }
        break;
      }
      case Op::Add: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        Matrix& dB = nodes_[static_cast<std::size_t>(n.b)].grad;
        for (std::size_t k = 0; k < g.data.size(); ++k) {
          dA.data[k] += g.data[k];
          dB.data[k] += g.data[k];
        }
        break;
      }
      case Op::AddRow: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        Matrix& dBias = nodes_[static_cast<std::size_t>(n.b)].grad;
        for (int r = 0; r < g.rows; ++r)
          for (int c = 0; c < g.cols; ++c) {
            dA.at(r, c) += g.at(r, c);
            dBias.data[static_cast<std::size_t>(c)] += g.at(r, c);
          }
        break;
      }
      case Op::Scale: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (std::size_t k = 0; k < g.data.size(); ++k) dA.data[k] += n.scalar * g.data[k];
        break;
      }
      case Op::Hadamard: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        Matrix& dB = nodes_[static_cast<std::size_t>(n.b)].grad;
        const Matrix& A = nodes_[static_cast<std::size_t>(n.a)].value;
        const Matrix& B = nodes_[static_cast<std::size_t>(n.b)].value;
        for (std::size_t k = 0; k < g.data.size(); ++k) {
          dA.data[k] += g.data[k] * B.data[k];
          dB.data[k] += g.data[k] * A.data[k];
        }
        break;
      }
      case Op::LeakyRelu: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        const Matrix& A = nodes_[static_cast<std::size_t>(n.a)].value;
        for (std::size_t k = 0; k < g.data.size(); ++k)
          dA.data[k] += g.data[k] * (A.data[k] > 0.0 ? 1.0 : n.scalar);
        break;
      }
      case Op::Elu: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        const Matrix& A = nodes_[static_cast<std::size_t>(n.a)].value;
        for (std::size_t k = 0; k < g.data.size(); ++k)
          dA.data[k] += g.data[k] * (A.data[k] > 0.0 ? 1.0 : n.value.data[k] + 1.0);
        break;
      }
      case Op::GatherRows: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (std::size_t r = 0; r < n.idx.size(); ++r)
          for (int c = 0; c < g.cols; ++c) dA.at(n.idx[r], c) += g.at(static_cast<int>(r), c);
        break;
      }
      case Op::ScatterAddRows: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (std::size_t r = 0; r < n.idx.size(); ++r)
          for (int c = 0; c < g.cols; ++c) dA.at(static_cast<int>(r), c) += g.at(n.idx[r], c);
        break;
      }
      case Op::EdgeSoftmax: {
        // da_e = alpha_e * (g_e - sum_{e' in segment} alpha_e' g_e')
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        std::vector<double> seg_dot(static_cast<std::size_t>(n.aux), 0.0);
        for (std::size_t e = 0; e < n.idx.size(); ++e)
          seg_dot[static_cast<std::size_t>(n.idx[e])] += n.value.data[e] * g.data[e];
        for (std::size_t e = 0; e < n.idx.size(); ++e)
          dA.data[e] += n.value.data[e] * (g.data[e] - seg_dot[static_cast<std::size_t>(n.idx[e])]);
        break;
      }
      case Op::MulCol: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        Matrix& dC = nodes_[static_cast<std::size_t>(n.b)].grad;
        const Matrix& A = nodes_[static_cast<std::size_t>(n.a)].value;
        const Matrix& C = nodes_[static_cast<std::size_t>(n.b)].value;
        for (int r = 0; r < g.rows; ++r) {
          const double s = C.data[static_cast<std::size_t>(r)];
          double dot = 0.0;
          for (int c = 0; c < g.cols; ++c) {
            dA.at(r, c) += g.at(r, c) * s;
            dot += g.at(r, c) * A.at(r, c);
          }
          dC.data[static_cast<std::size_t>(r)] += dot;
        }
        break;
      }
      case Op::MeanRows: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        const double inv = 1.0 / dA.rows;
        for (int r = 0; r < dA.rows; ++r)
          for (int c = 0; c < dA.cols; ++c) dA.at(r, c) += g.data[static_cast<std::size_t>(c)] * inv;
        break;
      }
      case Op::ConcatCols: {
        int offset = 0;
        for (int p : n.idx) {
          Matrix& dP = nodes_[static_cast<std::size_t>(p)].grad;
          for (int r = 0; r < dP.rows; ++r)
            for (int c = 0; c < dP.cols; ++c) dP.at(r, c) += g.at(r, offset + c);
          offset += dP.cols;
        }
        break;
      }
      case Op::ConcatRows: {
        int offset = 0;
        for (int p : n.idx) {
          Matrix& dP = nodes_[static_cast<std::size_t>(p)].grad;
          for (int r = 0; r < dP.rows; ++r)
            for (int c = 0; c < dP.cols; ++c) dP.at(r, c) += g.at(offset + r, c);
          offset += dP.rows;
        }
        break;
      }
      case Op::SoftmaxRow: {
        Matrix& dA = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (int r = 0; r < g.rows; ++r) {
          double dot = 0.0;
          for (int c = 0; c < g.cols; ++c) dot += g.at(r, c) * n.value.at(r, c);
          for (int c = 0; c < g.cols; ++c)
            dA.at(r, c) += n.value.at(r, c) * (g.at(r, c) - dot);
        }
        break;
      }
      case Op::CrossEntropyLogits: {
        Matrix& dL = nodes_[static_cast<std::size_t>(n.a)].grad;
        const Matrix& L = nodes_[static_cast<std::size_t>(n.a)].value;
        double mx = L.data[0];
        for (int c = 1; c < L.cols; ++c) mx = std::max(mx, L.data[static_cast<std::size_t>(c)]);
        double sum = 0.0;
        std::vector<double> p(static_cast<std::size_t>(L.cols));
        for (int c = 0; c < L.cols; ++c) {
          p[static_cast<std::size_t>(c)] = std::exp(L.data[static_cast<std::size_t>(c)] - mx);
          sum += p[static_cast<std::size_t>(c)];
        }
        const double gv = g.data[0];
        for (int c = 0; c < L.cols; ++c) {
          double soft = p[static_cast<std::size_t>(c)] / sum;
          if (c == n.aux) soft -= 1.0;
          dL.data[static_cast<std::size_t>(c)] += gv * soft;
        }
        break;
      }
    }
  }
};

}  // namespace netdiag
