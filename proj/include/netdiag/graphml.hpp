#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "netdiag/errors.hpp"
#include "netdiag/graph.hpp"

namespace netdiag {
namespace graphml_detail {

struct Tag {
  std::string name;
  std::map<std::string, std::string> attrs;
  bool closing = false;
  bool self_closing = false;
};

inline void skip_ws(std::string_view s, std::size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

// Scans the next markup tag, skipping declarations, comments and CDATA.
// Returns false at end of input.
inline bool next_tag(std::string_view s, std::size_t& i, Tag& tag) {
  while (true) {
    const auto lt = s.find('<', i);
    if (lt == std::string_view::npos) return false;
    i = lt + 1;
    if (i >= s.size()) throw ParseError("unterminated tag");
    if (s.compare(lt, 4, "<!--") == 0) {
      const auto end = s.find("-->", lt + 4);
      if (end == std::string_view::npos) throw ParseError("unterminated comment");
      i = end + 3;
      continue;
    }
    if (s.compare(lt, 9, "<![CDATA[") == 0) {
      const auto end = s.find("]]>", lt + 9);
      if (end == std::string_view::npos) throw ParseError("unterminated CDATA section");
      i = end + 3;
      continue;
    }
    if (s[i] == '?' || s[i] == '!') {  // <?xml ...?> or <!DOCTYPE ...>
      const auto end = s.find('>', i);
      if (end == std::string_view::npos) throw ParseError("unterminated declaration");
      i = end + 1;
      continue;
    }
    break;
  }

  tag = Tag{};
  if (s[i] == '/') {
    tag.closing = true;
    ++i;
  }
  const std::size_t name_start = i;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == ':' ||
                          s[i] == '_' || s[i] == '-' || s[i] == '.'))
    ++i;
  tag.name = std::string(s.substr(name_start, i - name_start));
  if (tag.name.empty()) throw ParseError("missing tag name");

  while (true) {
    skip_ws(s, i);
    if (i >= s.size()) throw ParseError("unterminated tag '" + tag.name + "'");
    if (s[i] == '>') {
      ++i;
      return true;
    }
    if (s[i] == '/') {
      ++i;
      skip_ws(s, i);
      if (i >= s.size() || s[i] != '>') throw ParseError("malformed self-closing tag");
      ++i;
      tag.self_closing = true;
      return true;
    }
    const std::size_t attr_start = i;
    while (i < s.size() && s[i] != '=' && !std::isspace(static_cast<unsigned char>(s[i])) &&
           s[i] != '>' && s[i] != '/')
      ++i;
    std::string attr(s.substr(attr_start, i - attr_start));
    skip_ws(s, i);
    if (i >= s.size() || s[i] != '=') throw ParseError("attribute '" + attr + "' without value");
    ++i;
    skip_ws(s, i);
    if (i >= s.size() || (s[i] != '"' && s[i] != '\'')) throw ParseError("unquoted attribute value");
    const char quote = s[i++];
    const auto end = s.find(quote, i);
    if (end == std::string_view::npos) throw ParseError("unterminated attribute value");
    tag.attrs[attr] = std::string(s.substr(i, end - i));
    i = end + 1;
  }
}

}  // namespace graphml_detail

// Parses a GraphML document into an undirected router core: nodes become
// routers, edges become OSPF links. Parallel edges collapse, self edges are
// dropped, and only the largest connected component is kept. Gateways,
// external ASes, and destinations are synthesized from attach_params.
inline NetworkGraph load_graphml(const std::string& text, const TopologyParams& attach_params) {
  using graphml_detail::Tag;
  std::vector<std::string> node_ids;
  std::map<std::string, int> index_of;
  std::vector<std::pair<int, int>> raw_edges;
  bool saw_graphml = false;

  std::size_t pos = 0;
  Tag tag;
  while (graphml_detail::next_tag(text, pos, tag)) {
    if (tag.closing) continue;
    if (tag.name == "graphml") saw_graphml = true;
    if (tag.name == "node") {
      const auto it = tag.attrs.find("id");
      if (it == tag.attrs.end()) throw ParseError("node without id attribute");
      if (index_of.count(it->second)) throw ParseError("duplicate node id '" + it->second + "'");
      index_of[it->second] = static_cast<int>(node_ids.size());
      node_ids.push_back(it->second);
    } else if (tag.name == "edge") {
      const auto src = tag.attrs.find("source");
      const auto dst = tag.attrs.find("target");
      if (src == tag.attrs.end() || dst == tag.attrs.end())
        throw ParseError("edge without source/target");
      const auto si = index_of.find(src->second);
      const auto di = index_of.find(dst->second);
      if (si == index_of.end() || di == index_of.end())
        throw ParseError("edge references undeclared node");
      raw_edges.emplace_back(si->second, di->second);
    }
  }
  if (!saw_graphml) throw ParseError("no <graphml> element found");
  if (node_ids.empty()) throw EmptyGraph("document declares no nodes");

  const int n = static_cast<int>(node_ids.size());
  std::set<std::pair<int, int>> undirected;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [u, v] : raw_edges) {
    if (u == v) continue;
    const auto key = std::minmax(u, v);
    if (undirected.insert(key).second) {
      adj[static_cast<std::size_t>(u)].push_back(v);
      adj[static_cast<std::size_t>(v)].push_back(u);
    }
  }

  // Largest connected component; ties resolved toward the earliest node.
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int n_comp = 0;
  for (int start = 0; start < n; ++start) {
    if (comp[static_cast<std::size_t>(start)] >= 0) continue;
    std::vector<int> stack{start};
    comp[static_cast<std::size_t>(start)] = n_comp;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : adj[static_cast<std::size_t>(v)])
        if (comp[static_cast<std::size_t>(u)] < 0) {
          comp[static_cast<std::size_t>(u)] = n_comp;
          stack.push_back(u);
        }
    }
    ++n_comp;
  }
  std::vector<int> comp_size(static_cast<std::size_t>(n_comp), 0);
  for (int v = 0; v < n; ++v) ++comp_size[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];
  int best = 0;
  for (int c = 1; c < n_comp; ++c)
    if (comp_size[static_cast<std::size_t>(c)] > comp_size[static_cast<std::size_t>(best)]) best = c;

  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  int n_routers = 0;
  for (int v = 0; v < n; ++v)
    if (comp[static_cast<std::size_t>(v)] == best) remap[static_cast<std::size_t>(v)] = n_routers++;

  std::vector<Edge> router_edges;
  for (const auto& [u, v] : undirected) {
    const int ru = remap[static_cast<std::size_t>(u)];
    const int rv = remap[static_cast<std::size_t>(v)];
    if (ru >= 0 && rv >= 0)
      router_edges.push_back({std::min(ru, rv), std::max(ru, rv), EdgeType::Ospf});
  }

  attach_params.validate();
  Rng rng(attach_params.seed);
  return detail::attach_externals(n_routers, std::move(router_edges), attach_params, rng);
}

// A directory of .graphml topologies, sorted by filename for determinism.
struct ZooCorpus {
  std::vector<std::string> names;
  std::vector<std::string> texts;

  std::size_t size() const { return names.size(); }
};

inline ZooCorpus load_zoo_dir(const std::string& dir) {
  ZooCorpus corpus;
  std::vector<std::filesystem::path> paths;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.path().extension() == ".graphml") paths.push_back(entry.path());
  if (ec) throw ParseError("cannot read topology directory '" + dir + "'");
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    corpus.names.push_back(p.filename().string());
    corpus.texts.push_back(ss.str());
  }
  if (corpus.names.empty()) throw EmptyGraph("no .graphml files under '" + dir + "'");
  return corpus;
}

}  // namespace netdiag
