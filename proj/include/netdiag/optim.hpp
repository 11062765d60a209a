#pragma once

#include <cmath>
#include <map>
#include <string>

#include "netdiag/errors.hpp"
#include "netdiag/matrix.hpp"
#include "netdiag/model.hpp"

namespace netdiag {

struct AdamState {
  std::map<std::string, Matrix> m;
  std::map<std::string, Matrix> v;
  long long t = 0;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

// Adam with bias correction and decoupled weight decay.
inline void adam_step(ModelParams& params, const GradMap& grads, AdamState& state, double lr,
                      double weight_decay) {
  ++state.t;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.t));
  for (auto& [name, tensor] : params.tensors()) {
    const auto git = grads.find(name);
    if (git == grads.end()) throw ShapeMismatch("missing gradient for tensor '" + name + "'");
    const Matrix& g = git->second;
    if (!g.same_shape(*tensor)) throw ShapeMismatch("gradient shape differs for '" + name + "'");
    Matrix& m = state.m.try_emplace(name, tensor->rows, tensor->cols).first->second;
    Matrix& v = state.v.try_emplace(name, tensor->rows, tensor->cols).first->second;
    if (!m.same_shape(*tensor) || !v.same_shape(*tensor))
      throw ShapeMismatch("optimizer state shape differs for '" + name + "'");
    for (std::size_t i = 0; i < tensor->data.size(); ++i) {
      const double gi = g.data[i];
      m.data[i] = kAdamBeta1 * m.data[i] + (1.0 - kAdamBeta1) * gi;
      v.data[i] = kAdamBeta2 * v.data[i] + (1.0 - kAdamBeta2) * gi * gi;
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      tensor->data[i] -= lr * (mhat / (std::sqrt(vhat) + kAdamEps) + weight_decay * tensor->data[i]);
    }
  }
}

}  // namespace netdiag
