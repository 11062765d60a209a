#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "netdiag/errors.hpp"
#include "netdiag/rng.hpp"

namespace netdiag {

enum class NodeRole { Router, Dst, Exas };

// Self-loops exist only in augmented edge lists, never in raw graphs.
enum class EdgeType : int { Ospf = 0, Ebgp = 1, Ibgp = 2, SelfLoop = 3 };

inline const char* to_string(NodeRole r) {
  switch (r) {
    case NodeRole::Router: return "router";
    case NodeRole::Dst: return "dst";
    case NodeRole::Exas: return "exas";
  }
  return "?";
}

inline const char* to_string(EdgeType t) {
  switch (t) {
    case EdgeType::Ospf: return "ospf";
    case EdgeType::Ebgp: return "ebgp";
    case EdgeType::Ibgp: return "ibgp";
    case EdgeType::SelfLoop: return "self";
  }
  return "?";
}

struct Node {
  int id = 0;
  NodeRole role = NodeRole::Router;
  bool gateway = false;  // meaningful for routers only
};

struct Edge {
  int src = 0;
  int dst = 0;
  EdgeType type = EdgeType::Ospf;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) {
    return std::tie(a.type, a.src, a.dst) <=> std::tie(b.type, b.src, b.dst);
  }
};

// Typed network graph. Raw edges hold OSPF (router-router) and eBGP
// (gateway-exas) links once each, canonicalized src < dst for OSPF and
// src = router for eBGP. Destination attachment is kept separately: it
// drives BGP advertisements, not message passing.
struct NetworkGraph {
  std::vector<Node> nodes;  // index == id
  std::vector<Edge> edges;
  std::map<int, std::vector<int>> dst_attachment;  // dst id -> exas ids

  int size() const { return static_cast<int>(nodes.size()); }

  const Node& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }

  bool is_role(int id, NodeRole r) const {
    return id >= 0 && id < size() && node(id).role == r;
  }

  std::vector<int> ids_with_role(NodeRole r) const {
    std::vector<int> out;
    for (const auto& n : nodes)
      if (n.role == r) out.push_back(n.id);
    return out;
  }

  int router_count() const { return static_cast<int>(ids_with_role(NodeRole::Router).size()); }
  int exas_count() const { return static_cast<int>(ids_with_role(NodeRole::Exas).size()); }
  int dst_count() const { return static_cast<int>(ids_with_role(NodeRole::Dst).size()); }

  std::vector<int> gateways() const {
    std::vector<int> out;
    for (const auto& n : nodes)
      if (n.role == NodeRole::Router && n.gateway) out.push_back(n.id);
    return out;
  }

  std::vector<Edge> edges_of_type(EdgeType t) const {
    std::vector<Edge> out;
    for (const auto& e : edges)
      if (e.type == t) out.push_back(e);
    return out;
  }

  // Gateways peering with the given external AS, ascending.
  std::vector<int> gateways_of_exas(int exas_id) const {
    std::vector<int> out;
    for (const auto& e : edges)
      if (e.type == EdgeType::Ebgp && e.dst == exas_id) out.push_back(e.src);
    std::sort(out.begin(), out.end());
    return out;
  }
};

struct IntRange {
  int lo = 1;
  int hi = 1;

  bool contains(int v) const { return v >= lo && v <= hi; }
  int sample(Rng& rng) const { return static_cast<int>(rng.uniform_int(lo, hi)); }

  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct QueryCounts {
  IntRange fwd{8, 12};
  IntRange reach{4, 7};
  IntRange iso{10, 30};

  friend bool operator==(const QueryCounts&, const QueryCounts&) = default;
};

struct TopologyParams {
  IntRange router_range{16, 23};
  IntRange dst_range{4, 7};
  IntRange gateway_count{3, 3};
  QueryCounts query_counts{};
  std::uint64_t seed = 0;

  void validate() const {
    for (const IntRange& r : {router_range, dst_range, gateway_count, query_counts.fwd,
                              query_counts.reach, query_counts.iso}) {
      if (r.lo < 1 || r.hi < r.lo)
        throw InfeasibleParams("interval bounds must satisfy 1 <= lo <= hi");
    }
    if (gateway_count.lo > router_range.hi)
      throw InfeasibleParams("gateway count exceeds router count");
  }
};

// Message-passing view of a graph: both directions of every raw edge, one
// self-loop per node, and the full directed iBGP mesh over routers. Edge
// order is canonical (type, src, dst).
struct AugmentedGraph {
  NetworkGraph base;
  std::vector<Edge> mp_edges;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw RoleViolation(msg);
}

inline bool routers_ospf_connected(const NetworkGraph& g) {
  const auto routers = g.ids_with_role(NodeRole::Router);
  if (routers.empty()) return true;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.size()));
  for (const auto& e : g.edges) {
    if (e.type == EdgeType::Ospf) {
      adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
      adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
    }
  }
  std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
  std::vector<int> stack{routers.front()};
  seen[static_cast<std::size_t>(routers.front())] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++reached;
    for (int u : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = 1;
        stack.push_back(u);
      }
    }
  }
  return reached == routers.size();
}

}  // namespace detail

// Validates and canonicalizes a typed graph. Throws DisconnectedRouters,
// RoleViolation or DanglingDst when an invariant fails.
inline NetworkGraph build_graph(std::vector<Node> nodes, std::vector<Edge> edges,
                                std::map<int, std::vector<int>> dst_attachment) {
  NetworkGraph g;
  g.nodes.resize(nodes.size());
  std::vector<char> filled(nodes.size(), 0);
  for (const auto& n : nodes) {
    if (n.id < 0 || n.id >= static_cast<int>(nodes.size()) || filled[static_cast<std::size_t>(n.id)])
      throw RoleViolation("node ids must be dense 0..N-1 without duplicates");
    filled[static_cast<std::size_t>(n.id)] = 1;
    g.nodes[static_cast<std::size_t>(n.id)] = n;
    if (n.role != NodeRole::Router && n.gateway)
      throw RoleViolation("gateway flag is valid only for routers");
  }

  std::set<std::pair<std::pair<int, int>, EdgeType>> seen;
  for (Edge e : edges) {
    if (e.src < 0 || e.src >= g.size() || e.dst < 0 || e.dst >= g.size())
      throw RoleViolation("edge endpoint does not exist");
    if (e.src == e.dst) throw RoleViolation("self edges are not allowed in raw graphs");
    switch (e.type) {
      case EdgeType::Ospf:
        detail::require(g.node(e.src).role == NodeRole::Router &&
                            g.node(e.dst).role == NodeRole::Router,
                        "OSPF edges connect routers only");
        if (e.src > e.dst) std::swap(e.src, e.dst);
        break;
      case EdgeType::Ebgp: {
        if (g.node(e.src).role == NodeRole::Exas) std::swap(e.src, e.dst);
        detail::require(g.node(e.src).role == NodeRole::Router && g.node(e.src).gateway &&
                            g.node(e.dst).role == NodeRole::Exas,
                        "eBGP edges connect gateway routers and external ASes only");
        break;
      }
      case EdgeType::Ibgp:
      case EdgeType::SelfLoop:
        throw RoleViolation("iBGP and self-loop edges are derived, not stored in raw graphs");
    }
    if (!seen.insert({{e.src, e.dst}, e.type}).second)
      throw RoleViolation("duplicate edge");
    g.edges.push_back(e);
  }
  std::sort(g.edges.begin(), g.edges.end());

  for (auto& [dst, exas_list] : dst_attachment) {
    if (!g.is_role(dst, NodeRole::Dst))
      throw RoleViolation("dst_attachment key is not a destination node");
    std::sort(exas_list.begin(), exas_list.end());
    exas_list.erase(std::unique(exas_list.begin(), exas_list.end()), exas_list.end());
    if (exas_list.empty()) throw DanglingDst("destination with empty attachment list");
    for (int m : exas_list)
      if (!g.is_role(m, NodeRole::Exas))
        throw RoleViolation("dst_attachment value is not an external AS");
  }
  g.dst_attachment = std::move(dst_attachment);

  for (const auto& n : g.nodes) {
    if (n.role == NodeRole::Dst && !g.dst_attachment.count(n.id))
      throw DanglingDst("destination " + std::to_string(n.id) + " has no attachment");
    if (n.role == NodeRole::Exas && g.gateways_of_exas(n.id).empty())
      throw RoleViolation("external AS " + std::to_string(n.id) + " has no gateway peer");
  }
  if (g.router_count() > 0 && g.gateways().empty())
    throw RoleViolation("graph has no gateway router");
  if (!detail::routers_ospf_connected(g))
    throw DisconnectedRouters("router OSPF subgraph is not connected");
  return g;
}

namespace detail {

// Random connected router topology: spanning tree plus chords up to an
// average degree of ~3.
inline std::vector<Edge> random_router_topology(int n_routers, Rng& rng) {
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> present;
  std::vector<int> order(static_cast<std::size_t>(n_routers));
  for (int i = 0; i < n_routers; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  for (int i = 1; i < n_routers; ++i) {
    const int u = order[static_cast<std::size_t>(i)];
    const int v = order[static_cast<std::size_t>(rng.uniform_int(0, i - 1))];
    const auto key = std::minmax(u, v);
    present.insert(key);
    edges.push_back({key.first, key.second, EdgeType::Ospf});
  }
  const int max_edges = n_routers * (n_routers - 1) / 2;
  const int target = std::min(max_edges, (3 * n_routers + 1) / 2);
  int guard = 0;
  while (static_cast<int>(edges.size()) < target && guard < 64 * target) {
    ++guard;
    const int u = static_cast<int>(rng.uniform_int(0, n_routers - 1));
    const int v = static_cast<int>(rng.uniform_int(0, n_routers - 1));
    if (u == v) continue;
    const auto key = std::minmax(u, v);
    if (present.insert(key).second) edges.push_back({key.first, key.second, EdgeType::Ospf});
  }
  return edges;
}

// Appends gateway flags, external ASes, and destinations to a bare router
// core. Node ids: routers 0..R-1, exas R..R+M-1, dst R+M..R+M+K-1.
inline NetworkGraph attach_externals(int n_routers, std::vector<Edge> router_edges,
                                     const TopologyParams& params, Rng& rng) {
  const int n_gateways = params.gateway_count.sample(rng);
  if (n_gateways > n_routers) throw InfeasibleParams("gateway count exceeds router count");
  const int n_dst = params.dst_range.sample(rng);
  const int n_exas = n_gateways;

  std::vector<Node> nodes;
  for (int i = 0; i < n_routers; ++i) nodes.push_back({i, NodeRole::Router, false});
  auto gw = rng.sample_without_replacement(n_routers, n_gateways);
  std::sort(gw.begin(), gw.end());
  for (int id : gw) nodes[static_cast<std::size_t>(id)].gateway = true;

  std::vector<Edge> edges = std::move(router_edges);
  for (int m = 0; m < n_exas; ++m) {
    const int exas_id = n_routers + m;
    nodes.push_back({exas_id, NodeRole::Exas, false});
    edges.push_back({gw[static_cast<std::size_t>(m)], exas_id, EdgeType::Ebgp});
  }

  std::map<int, std::vector<int>> attachment;
  for (int k = 0; k < n_dst; ++k) {
    const int dst_id = n_routers + n_exas + k;
    nodes.push_back({dst_id, NodeRole::Dst, false});
    const int want = static_cast<int>(rng.uniform_int(1, 3));
    auto picks = rng.sample_without_replacement(n_exas, std::min(want, n_exas));
    std::sort(picks.begin(), picks.end());
    for (int& m : picks) m += n_routers;
    attachment[dst_id] = picks;
  }
  return build_graph(std::move(nodes), std::move(edges), std::move(attachment));
}

}  // namespace detail

// Deterministic synthetic topology for the given parameter row.
inline NetworkGraph generate_synthetic(const TopologyParams& params) {
  params.validate();
  Rng rng(params.seed);
  const int n_routers = params.router_range.sample(rng);
  auto router_edges = detail::random_router_topology(n_routers, rng);
  return detail::attach_externals(n_routers, std::move(router_edges), params, rng);
}

inline AugmentedGraph augment(const NetworkGraph& graph) {
  AugmentedGraph out;
  out.base = graph;
  auto& mp = out.mp_edges;
  for (const auto& e : graph.edges) {
    mp.push_back({e.src, e.dst, e.type});
    mp.push_back({e.dst, e.src, e.type});
  }
  const auto routers = graph.ids_with_role(NodeRole::Router);
  for (int u : routers)
    for (int v : routers)
      if (u != v) mp.push_back({u, v, EdgeType::Ibgp});
  for (const auto& n : graph.nodes) mp.push_back({n.id, n.id, EdgeType::SelfLoop});
  std::sort(mp.begin(), mp.end());
  return out;
}

}  // namespace netdiag
