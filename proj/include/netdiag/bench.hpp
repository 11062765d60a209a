#pragma once

#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include "netdiag/graph.hpp"

namespace netdiag {

// Topology parameter row scaled by an integer factor (router and
// destination counts; gateway count fixed).
inline TopologyParams scale_topology(TopologyParams params, int factor) {
  params.router_range = {params.router_range.lo * factor, params.router_range.hi * factor};
  params.dst_range = {params.dst_range.lo * factor, params.dst_range.hi * factor};
  return params;
}

// Least-squares slope of log(y) against log(x): the fitted power-law
// exponent of a timing sweep.
inline double fit_power_law_exponent(const std::vector<std::pair<double, double>>& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& [x, y] : points) {
    const double lx = std::log(x);
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

template <typename F>
double time_seconds(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace netdiag
