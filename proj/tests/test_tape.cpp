#include "netdiag/tape.hpp"

#include <gtest/gtest.h>

#include <functional>

#include "netdiag/rng.hpp"

namespace netdiag {
namespace {

Matrix random_matrix(int r, int c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform_real(lo, hi);
  return m;
}

// Reduce any matrix to a scalar with nontrivial mixing weights so every
// entry of the output influences the root.
Tape::Var t2_scalar(Tape& t, Tape::Var m) {
  const Matrix& v = t.value(m);
  Matrix w(v.cols, 1);
  for (int i = 0; i < v.cols; ++i) w.data[static_cast<std::size_t>(i)] = 0.3 + 0.1 * i;
  Matrix u(1, v.rows);
  for (int i = 0; i < v.rows; ++i) u.data[static_cast<std::size_t>(i)] = 0.7 - 0.05 * i;
  return t.matmul(t.leaf(u), t.matmul(m, t.leaf(w)));
}

// Central finite differences of a scalar-valued builder with respect to
// every entry of every input matrix.
void check_gradients(const std::vector<Matrix>& inputs,
                     const std::function<Tape::Var(Tape&, const std::vector<Tape::Var>&)>& build,
                     double eps = 1e-6, double tol = 1e-6) {
  Tape tape;
  std::vector<Tape::Var> vars;
  for (const auto& m : inputs) vars.push_back(tape.leaf(m));
  const Tape::Var root = build(tape, vars);
  tape.backward(root);

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t k = 0; k < inputs[i].data.size(); ++k) {
      auto eval = [&](double delta) {
        std::vector<Matrix> shifted = inputs;
        shifted[i].data[k] += delta;
        Tape t2;
        std::vector<Tape::Var> vs;
        for (const auto& m : shifted) vs.push_back(t2.leaf(m));
        return t2.value(build(t2, vs)).data[0];
      };
      const double numeric = (eval(eps) - eval(-eps)) / (2.0 * eps);
      const double analytic = tape.grad(vars[i]).data[k];
      ASSERT_NEAR(analytic, numeric, tol * std::max(1.0, std::abs(numeric)))
          << "input " << i << " entry " << k;
    }
  }
}

TEST(Tape, MatMulForwardAndGrad) {
  Rng rng(1);
  const std::vector<Matrix> in{random_matrix(3, 4, rng), random_matrix(4, 2, rng)};
  check_gradients(in, [](Tape& t, const std::vector<Tape::Var>& v) {
    return t2_scalar(t, t.matmul(v[0], v[1]));
  });
}

TEST(Tape, MatMulBtMatchesMatMul) {
  Rng rng(2);
  const Matrix a = random_matrix(3, 5, rng);
  const Matrix b = random_matrix(4, 5, rng);
  Matrix bt(5, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 5; ++c) bt.at(c, r) = b.at(r, c);
  Tape t;
  const auto x = t.matmul_bt(t.leaf(a), t.leaf(b));
  const auto y = t.matmul(t.leaf(a), t.leaf(bt));
  EXPECT_LT(max_abs_diff(t.value(x), t.value(y)), 1e-15);

  const std::vector<Matrix> in{a, b};
  check_gradients(in, [](Tape& tp, const std::vector<Tape::Var>& v) {
    return t2_scalar(tp, tp.matmul_bt(v[0], v[1]));
  });
}

TEST(Tape, ElementwiseOps) {
  Rng rng(3);
  const std::vector<Matrix> in{random_matrix(4, 3, rng), random_matrix(4, 3, rng)};
  check_gradients(in, [](Tape& t, const std::vector<Tape::Var>& v) {
    return t2_scalar(t, t.hadamard(t.elu(v[0]), t.leaky_relu(t.add(v[0], v[1]), 0.2)));
  });
}

TEST(Tape, AddRowBias) {
  Rng rng(4);
  const std::vector<Matrix> in{random_matrix(5, 3, rng), random_matrix(1, 3, rng)};
  check_gradients(in, [](Tape& t, const std::vector<Tape::Var>& v) {
    return t2_scalar(t, t.add_row(v[0], v[1]));
  });
}

TEST(Tape, GatherScatter) {
  Rng rng(5);
  const std::vector<Matrix> in{random_matrix(4, 3, rng)};
  const std::vector<int> idx{2, 0, 0, 3, 1, 2};
  const std::vector<int> dst{0, 1, 1, 2, 0, 3};
  check_gradients(in, [idx, dst](Tape& t, const std::vector<Tape::Var>& v) {
    return t2_scalar(t, t.scatter_add_rows(t.gather_rows(v[0], idx), dst, 4));
  });
}

TEST(Tape, EdgeSoftmaxNormalizesAndDifferentiates) {
  Rng rng(6);
  const std::vector<int> dst{0, 0, 1, 1, 1, 2};
  const std::vector<Matrix> in{random_matrix(6, 1, rng, -3.0, 3.0)};
  Tape t;
  const auto alpha = t.edge_softmax(t.leaf(in[0]), dst, 3);
  std::array<double, 3> sums{};
  for (int e = 0; e < 6; ++e) sums[static_cast<std::size_t>(dst[static_cast<std::size_t>(e)])] +=
      t.value(alpha).data[static_cast<std::size_t>(e)];
  for (double s : sums) EXPECT_NEAR(s, 1.0, 1e-12);

  check_gradients(in, [dst](Tape& tp, const std::vector<Tape::Var>& v) {
    Matrix mix(6, 1);
    for (int i = 0; i < 6; ++i) mix.data[static_cast<std::size_t>(i)] = 0.2 + 0.13 * i;
    return tp.matmul(tp.leaf(Matrix{1, 6, {1, 1, 1, 1, 1, 1}}),
                     tp.hadamard(tp.edge_softmax(v[0], dst, 3), tp.leaf(mix)));
  });
}

TEST(Tape, MulColAndConcat) {
  Rng rng(7);
  const std::vector<Matrix> in{random_matrix(4, 2, rng), random_matrix(4, 1, rng),
                               random_matrix(4, 3, rng)};
  check_gradients(in, [](Tape& t, const std::vector<Tape::Var>& v) {
    return t2_scalar(t, t.concat_cols({t.mul_col(v[0], v[1]), v[2]}));
  });
  check_gradients({in[2], in[2]}, [](Tape& t, const std::vector<Tape::Var>& v) {
    return t2_scalar(t, t.concat_rows({v[0], t.gather_rows(v[1], {0, 1}), v[0]}));
  });
}

TEST(Tape, SoftmaxRowAndCrossEntropy) {
  Rng rng(8);
  const std::vector<Matrix> in{random_matrix(1, 7, rng, -2.0, 2.0)};
  Tape t;
  const auto probs = t.softmax_row(t.leaf(in[0]));
  double sum = 0.0;
  for (double p : t.value(probs).data) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-12);

  check_gradients(in, [](Tape& tp, const std::vector<Tape::Var>& v) {
    return tp.cross_entropy_logits(v[0], 3);
  });
  check_gradients(in, [](Tape& tp, const std::vector<Tape::Var>& v) {
    Matrix mix(7, 1);
    for (int i = 0; i < 7; ++i) mix.data[static_cast<std::size_t>(i)] = 0.1 * (i + 1);
    return tp.matmul(tp.softmax_row(v[0]), tp.leaf(mix));
  });
}

TEST(Tape, CrossEntropyOfUniformLogitsIsLogC) {
  Tape t;
  const auto loss = t.cross_entropy_logits(t.leaf(Matrix(1, 7)), 2);
  EXPECT_NEAR(t.value(loss).data[0], std::log(7.0), 1e-12);
}

TEST(Tape, ShapeErrors) {
  Tape t;
  const auto a = t.leaf(Matrix(2, 3));
  const auto b = t.leaf(Matrix(2, 3));
  EXPECT_THROW(t.matmul(a, b), DimMismatch);
  EXPECT_THROW(t.add_row(a, b), DimMismatch);
  EXPECT_THROW(t.backward(a), DimMismatch);
}

}  // namespace
}  // namespace netdiag
