#pragma once

#include <array>
#include <map>
#include <utility>

#include "netdiag/errors.hpp"
#include "netdiag/graph.hpp"

namespace netdiag {

// Position of each BGP attribute inside an advertisement vector.
enum BgpAttr : int {
  kLocalPref = 0,
  kMed = 1,
  kOrigin = 2,
  kAsPathLen = 3,
  kCiscoWeight = 4,
  kExasIndex = 5,
};

inline constexpr int kNumBgpAttrs = 6;

using AttrVector = std::array<int, kNumBgpAttrs>;

// Protocol configuration: OSPF link weights (directed map covering both
// directions of every OSPF edge) and one BGP attribute vector per
// (external AS, destination) advertisement.
struct Configuration {
  std::map<std::pair<int, int>, int> ospf_weights;
  std::map<std::pair<int, int>, AttrVector> bgp_attrs;  // (exas, dst) -> attrs
  int phi_max = 32;

  int weight(int i, int j) const {
    const auto it = ospf_weights.find({i, j});
    if (it == ospf_weights.end())
      throw MissingWeight("no OSPF weight for link " + std::to_string(i) + "->" +
                          std::to_string(j));
    return it->second;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

}  // namespace netdiag
