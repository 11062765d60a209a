#pragma once

#include <array>
#include <map>
#include <set>
#include <vector>

#include "netdiag/errors.hpp"
#include "netdiag/graph.hpp"
#include "netdiag/protocol.hpp"
#include "netdiag/rng.hpp"

namespace netdiag {

enum class SpecKind : int { Fwd = 0, Reach = 1, Iso = 2 };

inline const char* to_string(SpecKind k) {
  switch (k) {
    case SpecKind::Fwd: return "fwd";
    case SpecKind::Reach: return "reach";
    case SpecKind::Iso: return "iso";
  }
  return "?";
}

// Intended-behavior query. Fwd/Reach use ids = {router i, dst k, router j};
// Iso uses ids = {router i, router j, dst k, dst m} with (i, j) an OSPF link.
struct Specification {
  SpecKind kind = SpecKind::Fwd;
  std::array<int, 4> ids{-1, -1, -1, -1};
  bool expected = true;

  friend bool operator==(const Specification&, const Specification&) = default;
  friend auto operator<=>(const Specification&, const Specification&) = default;
};

struct SpecificationSet {
  std::vector<Specification> specs;       // fwd block, then reach, then iso
  std::array<int, 3> counts{0, 0, 0};     // per kind
  bool clamped = false;                   // true when candidate supply ran short
};

struct ObservedSpecs {
  std::vector<bool> values;
};

struct DeltaS {
  std::vector<int> violated;                   // indices into the spec list
  std::array<std::vector<int>, 3> by_kind;     // partition of `violated`

  int size() const { return static_cast<int>(violated.size()); }
  int count(SpecKind k) const { return static_cast<int>(by_kind[static_cast<int>(k)].size()); }
};

namespace spec_detail {

// True when the undirected link {i, j} appears consecutively on some
// router's path toward dst.
inline bool link_carries(const ForwardingState& state, const NetworkGraph& graph, int i, int j,
                         int dst) {
  for (const auto& s : graph.ids_with_role(NodeRole::Router)) {
    const auto& path = state.path_of(s, dst);
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
      if ((path[t] == i && path[t + 1] == j) || (path[t] == j && path[t + 1] == i)) return true;
    }
  }
  return false;
}

}  // namespace spec_detail

inline bool eval_spec(const Specification& spec, const ForwardingState& state,
                      const NetworkGraph& graph) {
  switch (spec.kind) {
    case SpecKind::Fwd: {
      const auto it = state.next_hop.find({spec.ids[0], spec.ids[1]});
      if (it == state.next_hop.end())
        throw UnknownPair("fwd query references unknown (router, dst) pair");
      return it->second == spec.ids[2];
    }
    case SpecKind::Reach: {
      const auto& path = state.path_of(spec.ids[0], spec.ids[1]);
      for (int v : path)
        if (v == spec.ids[2]) return true;
      return false;
    }
    case SpecKind::Iso: {
      const bool carries_k = spec_detail::link_carries(state, graph, spec.ids[0], spec.ids[1], spec.ids[2]);
      const bool carries_m = spec_detail::link_carries(state, graph, spec.ids[0], spec.ids[1], spec.ids[3]);
      return !(carries_k && carries_m);
    }
  }
  throw UnknownPair("unreachable");
}

// Samples a specification set that holds under the true configuration:
// fwd/reach from realized paths, iso from link/destination-pair combinations
// that are isolated (preferring links already carrying one of the pair, so
// the query stays sensitive to path changes). Counts are clamped to the
// candidate supply; `clamped` records whether that happened.
inline SpecificationSet generate_queries(const NetworkGraph& graph, const Configuration& true_config,
                                         std::array<int, 3> counts, std::uint64_t seed) {
  const ForwardingState state = compute_forwarding(graph, true_config);
  Rng rng(seed);
  SpecificationSet out;

  std::vector<Specification> fwd_pool;
  for (const auto& [key, path] : state.path) {
    if (path.size() < 2) continue;
    fwd_pool.push_back({SpecKind::Fwd, {key.first, key.second, path[1], -1}, true});
  }
  rng.shuffle(fwd_pool);

  std::vector<Specification> reach_pool;
  for (const auto& [key, path] : state.path)
    for (int j : path) reach_pool.push_back({SpecKind::Reach, {key.first, key.second, j, -1}, true});
  rng.shuffle(reach_pool);

  // Destinations carried per OSPF link, for iso sampling.
  std::map<std::pair<int, int>, std::set<int>> carried;
  for (const auto& e : graph.edges)
    if (e.type == EdgeType::Ospf) carried[{e.src, e.dst}] = {};
  for (const auto& [key, path] : state.path) {
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
      const auto link = std::minmax(path[t], path[t + 1]);
      carried[link].insert(key.second);
    }
  }
  std::vector<Specification> iso_preferred, iso_fallback;
  const auto dsts = graph.ids_with_role(NodeRole::Dst);
  for (const auto& [link, dset] : carried) {
    for (std::size_t a = 0; a < dsts.size(); ++a) {
      for (std::size_t b = a + 1; b < dsts.size(); ++b) {
        const bool ca = dset.count(dsts[a]) > 0;
        const bool cb = dset.count(dsts[b]) > 0;
        if (ca && cb) continue;  // not isolated under the true config
        Specification s{SpecKind::Iso, {link.first, link.second, dsts[a], dsts[b]}, true};
        (ca || cb ? iso_preferred : iso_fallback).push_back(s);
      }
    }
  }
  rng.shuffle(iso_preferred);
  rng.shuffle(iso_fallback);
  iso_preferred.insert(iso_preferred.end(), iso_fallback.begin(), iso_fallback.end());

  const std::array<std::vector<Specification>*, 3> pools{&fwd_pool, &reach_pool, &iso_preferred};
  for (int k = 0; k < 3; ++k) {
    const int take = std::min<int>(counts[static_cast<std::size_t>(k)],
                                   static_cast<int>(pools[static_cast<std::size_t>(k)]->size()));
    if (take < counts[static_cast<std::size_t>(k)]) out.clamped = true;
    out.counts[static_cast<std::size_t>(k)] = take;
    out.specs.insert(out.specs.end(), pools[static_cast<std::size_t>(k)]->begin(),
                     pools[static_cast<std::size_t>(k)]->begin() + take);
  }
  return out;
}

// Truth value of every query under the given configuration.
inline ObservedSpecs prot(const NetworkGraph& graph, const Configuration& config,
                          const SpecificationSet& queries) {
  ObservedSpecs out;
  if (queries.specs.empty()) return out;
  const ForwardingState state = compute_forwarding(graph, config);
  out.values.reserve(queries.specs.size());
  for (const auto& s : queries.specs) out.values.push_back(eval_spec(s, state, graph));
  return out;
}

// 1 iff the observed specifications differ from the intended ones.
inline bool f_check(const SpecificationSet& spec_set, const ObservedSpecs& observed) {
  if (spec_set.specs.size() != observed.values.size())
    throw LengthMismatch("spec set and observation lengths differ");
  for (std::size_t i = 0; i < observed.values.size(); ++i)
    if (observed.values[i] != spec_set.specs[i].expected) return true;
  return false;
}

inline DeltaS diff_specs(const SpecificationSet& spec_set, const ObservedSpecs& observed) {
  if (spec_set.specs.size() != observed.values.size())
    throw LengthMismatch("spec set and observation lengths differ");
  DeltaS delta;
  for (std::size_t i = 0; i < observed.values.size(); ++i) {
    if (observed.values[i] != spec_set.specs[i].expected) {
      delta.violated.push_back(static_cast<int>(i));
      delta.by_kind[static_cast<int>(spec_set.specs[i].kind)].push_back(static_cast<int>(i));
    }
  }
  return delta;
}

}  // namespace netdiag
