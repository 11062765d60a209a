#pragma once

#include <array>
#include <string>

#include "netdiag/errors.hpp"
#include "netdiag/faults.hpp"
#include "netdiag/specs.hpp"

namespace netdiag {

// Symptom pattern weights w_f : fault class x violation kind -> [0, 1].
struct WeightTable {
  // [fault label f1..f7][fwd, reach, iso]
  std::array<std::array<double, 3>, kNumFaultClasses> w{};

  double at(FaultClass f, SpecKind o) const {
    return w[static_cast<std::size_t>(fault_label(f))][static_cast<std::size_t>(o)];
  }

  void validate() const {
    for (const auto& row : w)
      for (double v : row)
        if (!(v >= 0.0 && v <= 1.0)) throw Error("weight table cell outside [0, 1]");
  }
};

// Fixed default table (documented in docs/rb-weights.md). The OSPF row leans
// on forwarding violations; the BGP rows lean on reachability, with small
// per-class offsets so verdicts between BGP classes are not degenerate.
inline WeightTable default_weight_table() {
  WeightTable t;
  t.w = {{
      {0.90, 0.50, 0.40},  // f1 ospf weight
      {0.42, 0.80, 0.28},  // f2 local_pref
      {0.38, 0.78, 0.33},  // f3 med
      {0.44, 0.81, 0.27},  // f4 origin
      {0.36, 0.79, 0.31},  // f5 as_path_len
      {0.41, 0.76, 0.34},  // f6 cisco_weight
      {0.39, 0.82, 0.29},  // f7 exas_index
  }};
  return t;
}

struct RbVerdict {
  FaultClass f_hat = FaultClass::None;
  std::array<double, kNumFaultClasses> scores{};
  bool tie = false;
};

// Weighted symptom matching over the decomposed violation set:
// score(f) = sum_o w_f^o * |dS_o| / |dS|, argmax wins, first maximum kept.
inline RbVerdict rb_classify(const DeltaS& delta, const WeightTable& weights) {
  weights.validate();
  const int total = delta.size();
  if (total == 0) throw EmptyDelta("no violated specifications to classify");

  RbVerdict verdict;
  double best = -1.0;
  for (int f = 0; f < kNumFaultClasses; ++f) {
    double s = 0.0;
    for (int o = 0; o < 3; ++o)
      s += weights.w[static_cast<std::size_t>(f)][static_cast<std::size_t>(o)] *
           delta.count(static_cast<SpecKind>(o));
    s /= total;
    verdict.scores[static_cast<std::size_t>(f)] = s;
    if (s > best) {
      best = s;
      verdict.f_hat = static_cast<FaultClass>(f + 1);
      verdict.tie = false;
    } else if (s == best) {
      verdict.tie = true;
    }
  }
  return verdict;
}

// Dominant-term operation count of the rule-based matcher, |F| * |dS|.
inline long long rb_complexity_estimate(long long n_faults, long long n_violations) {
  if (n_faults < 0 || n_violations < 0) throw Error("counts must be non-negative");
  return n_faults * n_violations;
}

}  // namespace netdiag
