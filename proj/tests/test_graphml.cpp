#include "netdiag/graphml.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "netdiag/io.hpp"

namespace netdiag {
namespace {

TopologyParams attach_params(std::uint64_t seed) {
  TopologyParams p;  // gateways 3, dst 4-7: the real-world parameter row
  p.seed = seed;
  return p;
}

std::string wrap(const std::string& body) {
  return "<?xml version=\"1.0\"?>\n<graphml>\n<graph edgedefault=\"undirected\">\n" + body +
         "</graph>\n</graphml>\n";
}

TEST(LoadGraphml, PathGraphPreservesStructure) {
  std::string body;
  for (int i = 0; i < 5; ++i) body += "<node id=\"n" + std::to_string(i) + "\"/>\n";
  for (int i = 0; i < 4; ++i)
    body += "<edge source=\"n" + std::to_string(i) + "\" target=\"n" + std::to_string(i + 1) + "\"/>\n";
  const NetworkGraph g = load_graphml(wrap(body), attach_params(1));
  EXPECT_EQ(g.router_count(), 5);
  EXPECT_EQ(static_cast<int>(g.edges_of_type(EdgeType::Ospf).size()), 4);
  EXPECT_EQ(g.exas_count(), 3);
  EXPECT_GE(g.dst_count(), 4);
  EXPECT_LE(g.dst_count(), 7);
}

TEST(LoadGraphml, LargestComponentRetained) {
  std::string body;
  for (int i = 0; i < 9; ++i) body += "<node id=\"n" + std::to_string(i) + "\"/>\n";
  for (int i = 0; i < 6; ++i)  // component of 7 (path)
    body += "<edge source=\"n" + std::to_string(i) + "\" target=\"n" + std::to_string(i + 1) + "\"/>\n";
  body += "<edge source=\"n7\" target=\"n8\"/>\n";  // component of 2
  const NetworkGraph g = load_graphml(wrap(body), attach_params(2));
  EXPECT_EQ(g.router_count(), 7);
}

TEST(LoadGraphml, DuplicateAndSelfEdgesCollapse) {
  std::string body = "<node id=\"a\"/><node id=\"b\"/><node id=\"c\"/>";
  body += "<edge source=\"a\" target=\"b\"/><edge source=\"b\" target=\"a\"/>";
  body += "<edge source=\"a\" target=\"a\"/><edge source=\"b\" target=\"c\"/>";
  TopologyParams p = attach_params(3);
  p.gateway_count = {1, 1};
  const NetworkGraph g = load_graphml(wrap(body), p);
  EXPECT_EQ(g.router_count(), 3);
  EXPECT_EQ(static_cast<int>(g.edges_of_type(EdgeType::Ospf).size()), 2);
}

TEST(LoadGraphml, ParseErrors) {
  EXPECT_THROW(load_graphml("<graphml><node id=></graphml>", attach_params(0)), ParseError);
  EXPECT_THROW(load_graphml(wrap("<node/>"), attach_params(0)), ParseError);
  EXPECT_THROW(load_graphml(wrap("<node id=\"x\"/><edge source=\"x\" target=\"y\"/>"), attach_params(0)),
               ParseError);
  EXPECT_THROW(load_graphml("just text, no tags", attach_params(0)), ParseError);
  EXPECT_THROW(load_graphml(wrap("<node id=\"x\"/><node id=\"x\"/>"), attach_params(0)), ParseError);
}

TEST(LoadGraphml, EmptyGraph) {
  EXPECT_THROW(load_graphml(wrap(""), attach_params(0)), EmptyGraph);
}

TEST(LoadGraphml, DeterministicAttachment) {
  const std::string text = read_file(std::string(NETDIAG_DATA_DIR) + "/zoo/Abilene.graphml");
  const NetworkGraph a = load_graphml(text, attach_params(9));
  const NetworkGraph b = load_graphml(text, attach_params(9));
  EXPECT_EQ(graph_to_json(a).dump(), graph_to_json(b).dump());
}

// Every bundled Topology Zoo style file must produce a graph passing all
// validator invariants (the round-trip revalidates via build_graph).
TEST(LoadGraphml, BundledZooFilesPassValidation) {
  const std::filesystem::path dir = std::string(NETDIAG_DATA_DIR) + "/zoo";
  int n_files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".graphml") continue;
    ++n_files;
    const NetworkGraph g = load_graphml(read_file(entry.path().string()), attach_params(17));
    EXPECT_GE(g.router_count(), 2) << entry.path();
    const NetworkGraph round = graph_from_json(graph_to_json(g));
    EXPECT_EQ(graph_to_json(round).dump(), graph_to_json(g).dump()) << entry.path();
  }
  EXPECT_GE(n_files, 5);
}

TEST(LoadGraphml, AbileneShape) {
  const std::string text = read_file(std::string(NETDIAG_DATA_DIR) + "/zoo/Abilene.graphml");
  const NetworkGraph g = load_graphml(text, attach_params(4));
  EXPECT_EQ(g.router_count(), 11);
  EXPECT_EQ(static_cast<int>(g.edges_of_type(EdgeType::Ospf).size()), 14);
}

}  // namespace
}  // namespace netdiag
