#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netdiag/config.hpp"
#include "netdiag/errors.hpp"
#include "netdiag/faults.hpp"
#include "netdiag/graph.hpp"
#include "netdiag/model.hpp"
#include "netdiag/rb.hpp"
#include "netdiag/specs.hpp"
#include "netdiag/train.hpp"

namespace netdiag {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so partially written outputs are never observed.
inline void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Graph / configuration / specification JSON
// ---------------------------------------------------------------------------

inline Json graph_to_json(const NetworkGraph& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes)
    nodes.push_back({{"id", n.id}, {"role", to_string(n.role)}, {"gateway", n.gateway}});
  Json edges = Json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"type", to_string(e.type)}});
  Json attach = Json::object();
  for (const auto& [dst, exas] : g.dst_attachment) attach[std::to_string(dst)] = exas;
  return Json{{"nodes", nodes}, {"edges", edges}, {"dst_attachment", attach}};
}

inline NetworkGraph graph_from_json(const Json& j) {
  std::vector<Node> nodes;
  for (const auto& n : j.at("nodes")) {
    NodeRole role;
    const std::string r = n.at("role");
    if (r == "router") role = NodeRole::Router;
    else if (r == "dst") role = NodeRole::Dst;
    else if (r == "exas") role = NodeRole::Exas;
    else throw ParseError("unknown node role '" + r + "'");
    nodes.push_back({n.at("id").get<int>(), role, n.value("gateway", false)});
  }
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    EdgeType type;
    const std::string t = e.at("type");
    if (t == "ospf") type = EdgeType::Ospf;
    else if (t == "ebgp") type = EdgeType::Ebgp;
    else throw ParseError("unknown raw edge type '" + t + "'");
    edges.push_back({e.at("src").get<int>(), e.at("dst").get<int>(), type});
  }
  std::map<int, std::vector<int>> attach;
  for (const auto& [key, val] : j.at("dst_attachment").items())
    attach[std::stoi(key)] = val.get<std::vector<int>>();
  return build_graph(std::move(nodes), std::move(edges), std::move(attach));
}

inline Json config_to_json(const Configuration& c) {
  Json weights = Json::array();
  for (const auto& [key, w] : c.ospf_weights) weights.push_back({key.first, key.second, w});
  Json attrs = Json::array();
  for (const auto& [key, a] : c.bgp_attrs) attrs.push_back({key.first, key.second, a});
  return Json{{"ospf_weights", weights}, {"bgp_attrs", attrs}, {"phi_max", c.phi_max}};
}

inline Configuration config_from_json(const Json& j) {
  Configuration c;
  c.phi_max = j.at("phi_max").get<int>();
  for (const auto& row : j.at("ospf_weights"))
    c.ospf_weights[{row.at(0).get<int>(), row.at(1).get<int>()}] = row.at(2).get<int>();
  for (const auto& row : j.at("bgp_attrs"))
    c.bgp_attrs[{row.at(0).get<int>(), row.at(1).get<int>()}] = row.at(2).get<AttrVector>();
  return c;
}

inline Json spec_set_to_json(const SpecificationSet& s) {
  Json fwd = Json::array(), reach = Json::array(), iso = Json::array();
  for (const auto& spec : s.specs) {
    switch (spec.kind) {
      case SpecKind::Fwd: fwd.push_back({spec.ids[0], spec.ids[1], spec.ids[2]}); break;
      case SpecKind::Reach: reach.push_back({spec.ids[0], spec.ids[1], spec.ids[2]}); break;
      case SpecKind::Iso: iso.push_back({spec.ids[0], spec.ids[1], spec.ids[2], spec.ids[3]}); break;
    }
  }
  return Json{{"fwd", fwd}, {"reach", reach}, {"iso", iso}};
}

inline SpecificationSet spec_set_from_json(const Json& j) {
  SpecificationSet s;
  for (const auto& row : j.at("fwd"))
    s.specs.push_back({SpecKind::Fwd, {row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>(), -1}, true});
  s.counts[0] = static_cast<int>(j.at("fwd").size());
  for (const auto& row : j.at("reach"))
    s.specs.push_back({SpecKind::Reach, {row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>(), -1}, true});
  s.counts[1] = static_cast<int>(j.at("reach").size());
  for (const auto& row : j.at("iso"))
    s.specs.push_back({SpecKind::Iso,
                       {row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>(), row.at(3).get<int>()},
                       true});
  s.counts[2] = static_cast<int>(j.at("iso").size());
  return s;
}

// ---------------------------------------------------------------------------
// Weight table JSON (operator-tunable)
// ---------------------------------------------------------------------------

inline Json weight_table_to_json(const WeightTable& t) {
  Json j = Json::object();
  for (int f = 0; f < kNumFaultClasses; ++f) {
    j["f" + std::to_string(f + 1)] = Json{{"fwd", t.w[static_cast<std::size_t>(f)][0]},
                                          {"reach", t.w[static_cast<std::size_t>(f)][1]},
                                          {"iso", t.w[static_cast<std::size_t>(f)][2]}};
  }
  return j;
}

inline WeightTable weight_table_from_json(const Json& j) {
  WeightTable t;
  for (int f = 0; f < kNumFaultClasses; ++f) {
    const Json& row = j.at("f" + std::to_string(f + 1));
    t.w[static_cast<std::size_t>(f)] = {row.at("fwd").get<double>(), row.at("reach").get<double>(),
                                        row.at("iso").get<double>()};
  }
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Dataset JSONL
// ---------------------------------------------------------------------------

inline Json sample_to_json(const GraphSample& s) {
  Json edges = Json::array();
  for (const auto& e : s.edges) edges.push_back({e.src, e.dst, static_cast<int>(e.type)});
  Json features = Json::array();
  for (int r = 0; r < s.features.rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < s.features.cols; ++c) row.push_back(s.features.at(r, c));
    features.push_back(row);
  }
  return Json{{"edges", edges},
              {"features", features},
              {"label", to_string(s.label)},
              {"meta", Json{{"graph_id", s.meta.graph_id}, {"seed", s.meta.seed}, {"delta", s.meta.delta}}}};
}

inline GraphSample sample_from_json(const Json& j) {
  GraphSample s;
  const auto& feats = j.at("features");
  const int rows = static_cast<int>(feats.size());
  const int cols = rows > 0 ? static_cast<int>(feats.at(0).size()) : 0;
  s.features = Matrix(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) s.features.at(r, c) = feats.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
  for (const auto& e : j.at("edges"))
    s.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), static_cast<EdgeType>(e.at(2).get<int>())});
  s.label = fault_from_string(j.at("label").get<std::string>());
  const Json& meta = j.at("meta");
  s.meta = {meta.at("graph_id").get<std::uint64_t>(), meta.at("seed").get<std::uint64_t>(),
            meta.at("delta").get<int>()};
  return s;
}

inline Json dataset_header(const DatasetBuild& build, const Json& params, std::uint64_t seed,
                           DatasetMode mode) {
  Json hist = Json::object();
  for (int f = 0; f < kNumFaultClasses; ++f)
    hist["f" + std::to_string(f + 1)] = build.dataset.class_histogram[static_cast<std::size_t>(f)];
  return Json{{"format", "netdiag-dataset"},
              {"version", 1},
              {"n", build.dataset.size()},
              {"class_histogram", hist},
              {"params", params},
              {"seed", seed},
              {"mode", mode == DatasetMode::Pregenerated ? "pregenerated" : "on_the_fly"},
              {"f_check_positive", build.f_check_positive}};
}

inline std::string dataset_to_jsonl(const DatasetBuild& build, const Json& params,
                                    std::uint64_t seed, DatasetMode mode) {
  std::ostringstream out;
  out << dataset_header(build, params, seed, mode).dump() << '\n';
  for (const auto& s : build.dataset.samples) out << sample_to_json(s).dump() << '\n';
  return out.str();
}

struct LoadedDataset {
  Dataset dataset;
  Json header;
};

inline LoadedDataset dataset_from_jsonl(const std::string& text) {
  LoadedDataset out;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dataset file");
  out.header = Json::parse(line);
  if (out.header.value("format", "") != "netdiag-dataset")
    throw ParseError("not a netdiag dataset file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    GraphSample s = sample_from_json(Json::parse(line));
    ++out.dataset.class_histogram[static_cast<std::size_t>(fault_label(s.label))];
    out.dataset.samples.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model checkpoints
// ---------------------------------------------------------------------------

inline Json hyperparams_to_json(const Hyperparams& hp) {
  return Json{{"hidden_dim", hp.hidden_dim},
              {"heads", hp.heads},
              {"layers", hp.layers},
              {"batch_size", hp.batch_size},
              {"learning_rate", hp.learning_rate},
              {"weight_decay", hp.weight_decay},
              {"epochs", hp.epochs},
              {"variant", to_string(hp.variant)},
              {"seed", hp.seed},
              {"leaky_slope", hp.leaky_slope},
              {"dropout_rate", hp.dropout_rate}};
}

inline Hyperparams hyperparams_from_json(const Json& j) {
  Hyperparams hp;
  hp.hidden_dim = j.at("hidden_dim").get<int>();
  hp.heads = j.at("heads").get<int>();
  hp.layers = j.at("layers").get<int>();
  hp.batch_size = j.at("batch_size").get<int>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.weight_decay = j.at("weight_decay").get<double>();
  hp.epochs = j.at("epochs").get<int>();
  hp.variant = variant_from_string(j.at("variant").get<std::string>());
  hp.seed = j.at("seed").get<std::uint64_t>();
  hp.leaky_slope = j.at("leaky_slope").get<double>();
  hp.dropout_rate = j.at("dropout_rate").get<double>();
  return hp;
}

inline Json checkpoint_to_json(const ModelParams& params) {
  Json tensors = Json::object();
  for (const auto& [name, m] : params.tensors())
    tensors[name] = Json{{"shape", {m->rows, m->cols}}, {"data", m->data}};
  return Json{{"format", "netdiag-checkpoint"},
              {"version", 1},
              {"hyperparams", hyperparams_to_json(params.hp)},
              {"d_feat", params.d_feat},
              {"param_count", params.param_count()},
              {"tensors", tensors}};
}

inline ModelParams checkpoint_from_json(const Json& j) {
  if (j.value("format", "") != "netdiag-checkpoint") throw ParseError("not a checkpoint file");
  ModelParams params = init_params(hyperparams_from_json(j.at("hyperparams")), j.at("d_feat").get<int>());
  const Json& tensors = j.at("tensors");
  for (auto& [name, m] : params.tensors()) {
    const Json& t = tensors.at(name);
    const int rows = t.at("shape").at(0).get<int>();
    const int cols = t.at("shape").at(1).get<int>();
    if (rows != m->rows || cols != m->cols)
      throw ShapeMismatch("checkpoint tensor '" + name + "' has unexpected shape");
    m->data = t.at("data").get<std::vector<double>>();
    if (static_cast<int>(m->data.size()) != rows * cols)
      throw ShapeMismatch("checkpoint tensor '" + name + "' has unexpected size");
  }
  return params;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string fmt_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

inline std::string train_report_to_csv(const TrainReport& report) {
  std::ostringstream out;
  out << "epoch,samples_seen,loss,acc\n";
  for (const auto& e : report.epochs)
    out << e.epoch << ',' << e.samples_seen << ',' << fmt_double(e.loss) << ','
        << fmt_double(e.accuracy) << '\n';
  return out.str();
}

}  // namespace netdiag
