#include "netdiag/rb.hpp"

#include <gtest/gtest.h>

#include "netdiag/io.hpp"
#include "support/oracles.hpp"

namespace netdiag {
namespace {

DeltaS make_delta(int n_fwd, int n_reach, int n_iso) {
  DeltaS d;
  int idx = 0;
  for (int i = 0; i < n_fwd; ++i) d.by_kind[0].push_back(idx++);
  for (int i = 0; i < n_reach; ++i) d.by_kind[1].push_back(idx++);
  for (int i = 0; i < n_iso; ++i) d.by_kind[2].push_back(idx++);
  for (const auto& part : d.by_kind) d.violated.insert(d.violated.end(), part.begin(), part.end());
  return d;
}

TEST(RbClassify, SingleKindArithmetic) {
  WeightTable t;
  t.w = {{{0.9, 0.4, 0.2},
          {0.3, 0.8, 0.5},
          {0.1, 0.1, 0.1},
          {0.1, 0.1, 0.1},
          {0.1, 0.1, 0.1},
          {0.1, 0.1, 0.1},
          {0.1, 0.1, 0.1}}};
  const RbVerdict v = rb_classify(make_delta(4, 0, 0), t);
  EXPECT_DOUBLE_EQ(v.scores[0], 0.9);
  EXPECT_DOUBLE_EQ(v.scores[1], 0.3);
  EXPECT_EQ(v.f_hat, FaultClass::OspfWeight);
  EXPECT_FALSE(v.tie);
}

TEST(RbClassify, ConvexCombination) {
  WeightTable t = default_weight_table();
  t.w[2] = {0.5, 0.9, 0.5};
  const RbVerdict v = rb_classify(make_delta(2, 0, 2), t);
  EXPECT_DOUBLE_EQ(v.scores[2], 0.5);
}

TEST(RbClassify, EmptyDelta) {
  EXPECT_THROW(rb_classify(DeltaS{}, default_weight_table()), EmptyDelta);
}

TEST(RbClassify, TieBreaksToSmallestClass) {
  WeightTable t;
  for (auto& row : t.w) row = {0.5, 0.5, 0.5};
  const RbVerdict v = rb_classify(make_delta(1, 2, 3), t);
  EXPECT_EQ(v.f_hat, FaultClass::OspfWeight);
  EXPECT_TRUE(v.tie);
}

TEST(RbClassify, MatchesBruteForceOnRandomInstances) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    WeightTable t;
    for (auto& row : t.w)
      for (double& v : row) v = rng.uniform_real();
    int n_fwd = static_cast<int>(rng.uniform_int(0, 20));
    int n_reach = static_cast<int>(rng.uniform_int(0, 20));
    int n_iso = static_cast<int>(rng.uniform_int(0, 20));
    if (n_fwd + n_reach + n_iso == 0) n_fwd = 1;
    const RbVerdict ours = rb_classify(make_delta(n_fwd, n_reach, n_iso), t);
    const auto [ref_f, ref_scores] = oracles::rb_recompute(n_fwd, n_reach, n_iso, t);
    ASSERT_EQ(static_cast<int>(ours.f_hat), ref_f);
    for (int f = 0; f < 7; ++f)
      ASSERT_DOUBLE_EQ(ours.scores[static_cast<std::size_t>(f)], ref_scores[static_cast<std::size_t>(f)]);
  }
}

TEST(RbClassify, ScaleInvarianceOfArgmax) {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    WeightTable t;
    for (auto& row : t.w)
      for (double& v : row) v = rng.uniform_real(0.0, 0.5);
    const DeltaS d = make_delta(static_cast<int>(rng.uniform_int(0, 9)),
                                static_cast<int>(rng.uniform_int(0, 9)),
                                static_cast<int>(rng.uniform_int(1, 9)));
    WeightTable t2 = t;
    for (auto& row : t2.w)
      for (double& v : row) v *= 2.0;
    EXPECT_EQ(rb_classify(d, t).f_hat, rb_classify(d, t2).f_hat);
  }
}

TEST(RbClassify, ScoreBounds) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    WeightTable t;
    for (auto& row : t.w)
      for (double& v : row) v = rng.uniform_real();
    const DeltaS d = make_delta(static_cast<int>(rng.uniform_int(0, 9)),
                                static_cast<int>(rng.uniform_int(0, 9)),
                                static_cast<int>(rng.uniform_int(1, 9)));
    const RbVerdict v = rb_classify(d, t);
    for (int f = 0; f < 7; ++f) {
      double lo = 1.0, hi = 0.0;
      for (int o = 0; o < 3; ++o) {
        lo = std::min(lo, t.w[static_cast<std::size_t>(f)][static_cast<std::size_t>(o)]);
        hi = std::max(hi, t.w[static_cast<std::size_t>(f)][static_cast<std::size_t>(o)]);
      }
      ASSERT_GE(v.scores[static_cast<std::size_t>(f)], lo - 1e-12);
      ASSERT_LE(v.scores[static_cast<std::size_t>(f)], hi + 1e-12);
    }
  }
}

TEST(DefaultWeightTable, DocumentedShape) {
  const WeightTable t = default_weight_table();
  t.validate();
  EXPECT_DOUBLE_EQ(t.at(FaultClass::OspfWeight, SpecKind::Fwd), 0.9);
  EXPECT_GT(t.at(FaultClass::OspfWeight, SpecKind::Fwd), t.at(FaultClass::OspfWeight, SpecKind::Reach));
  EXPECT_DOUBLE_EQ(t.at(FaultClass::LocalPref, SpecKind::Reach), 0.8);
  for (int f = 2; f <= 7; ++f) {
    const FaultClass fc = static_cast<FaultClass>(f);
    EXPECT_GT(t.at(fc, SpecKind::Reach), t.at(fc, SpecKind::Fwd));
    // per-class jitter stays within +-0.05 of the shared BGP base row
    EXPECT_NEAR(t.at(fc, SpecKind::Fwd), 0.4, 0.05);
    EXPECT_NEAR(t.at(fc, SpecKind::Reach), 0.8, 0.05);
    EXPECT_NEAR(t.at(fc, SpecKind::Iso), 0.3, 0.05);
  }
  // rows are pairwise distinct so verdicts between BGP classes are not degenerate
  for (int f = 0; f < 7; ++f)
    for (int g = f + 1; g < 7; ++g)
      EXPECT_NE(t.w[static_cast<std::size_t>(f)], t.w[static_cast<std::size_t>(g)]);
}

TEST(WeightTableJson, RoundTripAndValidation) {
  const WeightTable t = default_weight_table();
  const WeightTable back = weight_table_from_json(weight_table_to_json(t));
  EXPECT_EQ(back.w, t.w);
  Json bad = weight_table_to_json(t);
  bad["f3"]["iso"] = 1.5;
  EXPECT_THROW(weight_table_from_json(bad), Error);
}

TEST(RbComplexityEstimate, ProductForm) {
  EXPECT_EQ(rb_complexity_estimate(7, 20), 140);
  EXPECT_EQ(rb_complexity_estimate(0, 9), 0);
  EXPECT_THROW(rb_complexity_estimate(-1, 2), Error);
}

TEST(RbClassify, PermutationInvariance) {
  // Verdicts depend only on kind counts, so shuffling spec indices changes nothing.
  WeightTable t = default_weight_table();
  DeltaS a = make_delta(3, 2, 5);
  DeltaS b;
  b.by_kind[0] = {9, 1, 4};
  b.by_kind[1] = {0, 7};
  b.by_kind[2] = {2, 3, 5, 6, 8};
  for (const auto& part : b.by_kind) b.violated.insert(b.violated.end(), part.begin(), part.end());
  const RbVerdict va = rb_classify(a, t);
  const RbVerdict vb = rb_classify(b, t);
  EXPECT_EQ(va.f_hat, vb.f_hat);
  EXPECT_EQ(va.scores, vb.scores);
}

}  // namespace
}  // namespace netdiag
