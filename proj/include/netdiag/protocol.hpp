#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "netdiag/config.hpp"
#include "netdiag/errors.hpp"
#include "netdiag/graph.hpp"

namespace netdiag {

inline constexpr long long kInfCost = std::numeric_limits<long long>::max() / 4;

// All-pairs router costs and next hops under the configured OSPF weights.
// Stored dense over router ids (which precede all other ids).
struct IgpCostTable {
  int n = 0;
  std::vector<long long> cost_;   // n*n
  std::vector<int> next_hop_;     // n*n, -1 on the diagonal

  long long cost(int i, int j) const { return cost_[static_cast<std::size_t>(i) * n + j]; }
  int next_hop(int i, int j) const { return next_hop_[static_cast<std::size_t>(i) * n + j]; }
};

struct ForwardingState {
  // Keyed by (router id, dst id).
  std::map<std::pair<int, int>, std::pair<int, int>> egress;  // -> (gateway, exas)
  std::map<std::pair<int, int>, int> next_hop;                // -> router or exas id
  std::map<std::pair<int, int>, std::vector<int>> path;       // router ids, i .. gateway

  const std::vector<int>& path_of(int router, int dst) const {
    const auto it = path.find({router, dst});
    if (it == path.end())
      throw UnknownPair("no forwarding entry for (" + std::to_string(router) + ", " +
                        std::to_string(dst) + ")");
    return it->second;
  }
};

// Exact shortest paths over the router-OSPF subgraph. Next hops are the
// smallest-id neighbor on some shortest path, which also fixes ECMP
// tie-breaking deterministically.
inline IgpCostTable ospf_shortest_paths(const NetworkGraph& graph, const Configuration& config) {
  const int n = graph.router_count();
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));  // (nbr, w)
  for (const auto& e : graph.edges) {
    if (e.type != EdgeType::Ospf) continue;
    adj[static_cast<std::size_t>(e.src)].push_back({e.dst, config.weight(e.src, e.dst)});
    adj[static_cast<std::size_t>(e.dst)].push_back({e.src, config.weight(e.dst, e.src)});
  }

  IgpCostTable table;
  table.n = n;
  table.cost_.assign(static_cast<std::size_t>(n) * n, kInfCost);
  table.next_hop_.assign(static_cast<std::size_t>(n) * n, -1);

  std::vector<char> done(static_cast<std::size_t>(n));
  for (int src = 0; src < n; ++src) {
    auto* dist = &table.cost_[static_cast<std::size_t>(src) * n];
    std::fill(done.begin(), done.end(), 0);
    dist[src] = 0;
    for (int iter = 0; iter < n; ++iter) {
      int v = -1;
      long long best = kInfCost;
      for (int u = 0; u < n; ++u)
        if (!done[static_cast<std::size_t>(u)] && dist[u] < best) {
          best = dist[u];
          v = u;
        }
      if (v < 0) break;
      done[static_cast<std::size_t>(v)] = 1;
      for (const auto& [u, w] : adj[static_cast<std::size_t>(v)])
        dist[u] = std::min(dist[u], dist[v] + w);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || table.cost(i, j) >= kInfCost) continue;
      int hop = -1;
      for (const auto& [u, w] : adj[static_cast<std::size_t>(i)]) {
        if (w + table.cost(u, j) == table.cost(i, j) && (hop < 0 || u < hop)) hop = u;
      }
      table.next_hop_[static_cast<std::size_t>(i) * n + j] = hop;
    }
  }
  return table;
}

struct RouteCandidate {
  int exas = -1;
  int gateway = -1;
  AttrVector attrs{};
};

// Best-path selection: higher cisco_weight, higher local_pref, shorter AS
// path, lower origin, lower MED, lower IGP cost from the deciding router
// (hot potato), lower external-AS index. The last criterion makes the
// order total.
inline RouteCandidate bgp_select(const std::vector<RouteCandidate>& candidates,
                                 int igp_cost_from, const IgpCostTable& igp) {
  if (candidates.empty()) throw NoRoute("empty candidate set");
  auto key = [&](const RouteCandidate& c) {
    return std::make_tuple(-c.attrs[kCiscoWeight], -c.attrs[kLocalPref], c.attrs[kAsPathLen],
                           c.attrs[kOrigin], c.attrs[kMed], igp.cost(igp_cost_from, c.gateway),
                           c.attrs[kExasIndex]);
  };
  const RouteCandidate* best = &candidates.front();
  auto best_key = key(*best);
  for (const auto& c : candidates) {
    auto k = key(c);
    if (k < best_key) {
      best = &c;
      best_key = k;
    }
  }
  return *best;
}

// Runs OSPF and the BGP decision process to a fixed point: for every
// (router, destination) pair, the selected egress and the OSPF path
// toward it.
inline ForwardingState compute_forwarding(const NetworkGraph& graph, const Configuration& config) {
  const IgpCostTable igp = ospf_shortest_paths(graph, config);
  ForwardingState state;
  const auto routers = graph.ids_with_role(NodeRole::Router);

  for (const auto& [dst, exas_list] : graph.dst_attachment) {
    std::vector<RouteCandidate> candidates;
    for (int m : exas_list) {
      const auto it = config.bgp_attrs.find({m, dst});
      if (it == config.bgp_attrs.end())
        throw UnreachableDst("no advertisement for (" + std::to_string(m) + ", " +
                             std::to_string(dst) + ")");
      for (int g : graph.gateways_of_exas(m)) candidates.push_back({m, g, it->second});
    }
    if (candidates.empty())
      throw UnreachableDst("destination " + std::to_string(dst) + " has no candidates");

    for (int i : routers) {
      const RouteCandidate chosen = bgp_select(candidates, i, igp);
      std::vector<int> path{i};
      int cur = i;
      while (cur != chosen.gateway) {
        cur = igp.next_hop(cur, chosen.gateway);
        path.push_back(cur);
      }
      state.egress[{i, dst}] = {chosen.gateway, chosen.exas};
      state.next_hop[{i, dst}] = path.size() > 1 ? path[1] : chosen.exas;
      state.path[{i, dst}] = std::move(path);
    }
  }
  return state;
}

}  // namespace netdiag
