#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "netdiag/config.hpp"
#include "netdiag/errors.hpp"
#include "netdiag/graph.hpp"
#include "netdiag/graphml.hpp"
#include "netdiag/matrix.hpp"
#include "netdiag/rng.hpp"
#include "netdiag/specs.hpp"

namespace netdiag {

// Template-level fault classes: f0 = no fault, f1 = OSPF weight template,
// f2..f7 = the six BGP attribute templates in advertisement-vector order.
enum class FaultClass : int {
  None = 0,
  OspfWeight = 1,
  LocalPref = 2,
  Med = 3,
  Origin = 4,
  AsPathLen = 5,
  CiscoWeight = 6,
  ExasIndex = 7,
};

inline constexpr int kNumFaultClasses = 7;  // classifier label space f1..f7

inline std::string to_string(FaultClass f) { return "f" + std::to_string(static_cast<int>(f)); }

inline FaultClass fault_from_string(const std::string& s) {
  if (s.size() == 2 && s[0] == 'f' && s[1] >= '0' && s[1] <= '7')
    return static_cast<FaultClass>(s[1] - '0');
  throw Error("unknown fault class '" + s + "'");
}

// Zero-based classifier label for f1..f7.
inline int fault_label(FaultClass f) { return static_cast<int>(f) - 1; }

// Feature layout: 3 role one-hot columns, then the OSPF weight column,
// then the six BGP attribute columns.
inline constexpr int kFeatureDim = 10;
inline constexpr int kAttrColBase = 3;

inline int fault_column(FaultClass f) { return kAttrColBase + fault_label(f); }

struct SampleMeta {
  std::uint64_t graph_id = 0;
  std::uint64_t seed = 0;
  int delta = 0;
};

struct GraphSample {
  Matrix features;           // |V| x kFeatureDim
  std::vector<Edge> edges;   // augmented message-passing edges
  FaultClass label = FaultClass::None;
  SampleMeta meta;
};

struct Dataset {
  std::vector<GraphSample> samples;
  std::array<int, kNumFaultClasses> class_histogram{};

  int size() const { return static_cast<int>(samples.size()); }
};

// Base value ranges for sampled true configurations. exas_index is not
// sampled; it always equals the advertising AS id offset (identity
// tie-breaker).
struct AttrRanges {
  IntRange local_pref{50, 150};
  IntRange med{0, 20};
  IntRange origin{0, 2};
  IntRange as_path_len{1, 6};
  IntRange cisco_weight{0, 10};
};

inline constexpr int kPhiMax = 32;

// Uniform true configuration: symmetric OSPF weights in [1, phi_max] and
// per-advertisement BGP attributes from the base ranges.
inline Configuration sample_true_config(const NetworkGraph& graph, std::uint64_t seed) {
  Rng rng(seed);
  const AttrRanges ranges;
  Configuration config;
  config.phi_max = kPhiMax;
  for (const auto& e : graph.edges) {
    if (e.type != EdgeType::Ospf) continue;
    const int w = static_cast<int>(rng.uniform_int(1, kPhiMax));
    config.ospf_weights[{e.src, e.dst}] = w;
    config.ospf_weights[{e.dst, e.src}] = w;
  }
  const int first_exas = graph.router_count();
  for (const auto& [dst, exas_list] : graph.dst_attachment) {
    for (int m : exas_list) {
      AttrVector attrs{};
      attrs[kLocalPref] = ranges.local_pref.sample(rng);
      attrs[kMed] = ranges.med.sample(rng);
      attrs[kOrigin] = ranges.origin.sample(rng);
      attrs[kAsPathLen] = ranges.as_path_len.sample(rng);
      attrs[kCiscoWeight] = ranges.cisco_weight.sample(rng);
      attrs[kExasIndex] = m - first_exas;
      config.bgp_attrs[{m, dst}] = attrs;
    }
  }
  return config;
}

// Shifts one template by delta across every instantiation. OSPF weights
// clamp to [1, phi_max]; BGP attributes shift unclamped.
inline Configuration apply_template_offset(Configuration config, FaultClass f, int delta) {
  if (f == FaultClass::None) throw BadDelta("cannot inject the no-fault class");
  if (f == FaultClass::OspfWeight) {
    for (auto& [key, w] : config.ospf_weights)
      w = std::clamp(w + delta, 1, config.phi_max);
  } else {
    const int attr = fault_label(f) - 1;
    for (auto& [key, attrs] : config.bgp_attrs)
      attrs[static_cast<std::size_t>(attr)] += delta;
  }
  return config;
}

inline int draw_delta(Rng& rng) { return static_cast<int>(rng.uniform_int(1, 4)); }

inline Configuration inject_config_fault(const Configuration& config, FaultClass f,
                                         std::uint64_t seed) {
  Rng rng(seed);
  return apply_template_offset(config, f, draw_delta(rng));
}

// Node feature matrix for one (graph, configuration) pair. Routers carry
// their mean incident OSPF weight; each external AS carries the mean of its
// own advertisements per attribute; all remaining cells of an attribute
// column hold the template's global mean, so a template shift moves the
// whole column uniformly.
inline GraphSample build_sample(const NetworkGraph& graph, const Configuration& config,
                                FaultClass label) {
  GraphSample sample;
  sample.label = label;
  sample.edges = augment(graph).mp_edges;
  sample.features = Matrix(graph.size(), kFeatureDim);
  Matrix& x = sample.features;

  for (const auto& n : graph.nodes) x.at(n.id, static_cast<int>(n.role)) = 1.0;

  std::vector<double> wsum(static_cast<std::size_t>(graph.size()), 0.0);
  std::vector<int> wcnt(static_cast<std::size_t>(graph.size()), 0);
  for (const auto& e : graph.edges) {
    if (e.type != EdgeType::Ospf) continue;
    wsum[static_cast<std::size_t>(e.src)] += config.weight(e.src, e.dst);
    wsum[static_cast<std::size_t>(e.dst)] += config.weight(e.dst, e.src);
    ++wcnt[static_cast<std::size_t>(e.src)];
    ++wcnt[static_cast<std::size_t>(e.dst)];
  }
  for (const auto& n : graph.nodes)
    if (n.role == NodeRole::Router && wcnt[static_cast<std::size_t>(n.id)] > 0)
      x.at(n.id, kAttrColBase) =
          wsum[static_cast<std::size_t>(n.id)] / wcnt[static_cast<std::size_t>(n.id)];

  std::array<double, kNumBgpAttrs> global_sum{};
  std::map<int, std::array<double, kNumBgpAttrs>> exas_sum;
  std::map<int, int> exas_cnt;
  int n_pairs = 0;
  for (const auto& [key, attrs] : config.bgp_attrs) {
    ++n_pairs;
    ++exas_cnt[key.first];
    for (int a = 0; a < kNumBgpAttrs; ++a) {
      global_sum[static_cast<std::size_t>(a)] += attrs[static_cast<std::size_t>(a)];
      exas_sum[key.first][static_cast<std::size_t>(a)] += attrs[static_cast<std::size_t>(a)];
    }
  }
  for (const auto& n : graph.nodes) {
    for (int a = 0; a < kNumBgpAttrs; ++a) {
      double v = n_pairs > 0 ? global_sum[static_cast<std::size_t>(a)] / n_pairs : 0.0;
      if (n.role == NodeRole::Exas && exas_cnt.count(n.id))
        v = exas_sum[n.id][static_cast<std::size_t>(a)] / exas_cnt[n.id];
      x.at(n.id, kAttrColBase + 1 + a) = v;
    }
  }
  return sample;
}

// Feature-level fast path: shifts one attribute column of every node by
// delta and relabels. Matches config-level injection exactly on the BGP
// columns (the OSPF column additionally clamps and owns only router rows).
inline GraphSample perturb_features(GraphSample sample, FaultClass f, int delta) {
  if (f == FaultClass::None) throw BadDelta("cannot inject the no-fault class");
  if (delta < 1 || delta > 4) throw BadDelta("delta must lie in [1, 4]");
  const int col = fault_column(f);
  for (int r = 0; r < sample.features.rows; ++r) sample.features.at(r, col) += delta;
  sample.label = f;
  return sample;
}

enum class DatasetMode { Pregenerated, OnTheFly };

// Deterministic per-sample substreams: topology, configuration, fault
// offset and queries each draw from an independent seed derived from
// (dataset seed, sample index).
namespace fault_detail {

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t idx, std::uint64_t stream) {
  return Rng::mix(Rng::mix(seed, idx), stream);
}

inline std::array<FaultClass, kNumFaultClasses> label_rotation(std::uint64_t seed) {
  std::array<FaultClass, kNumFaultClasses> order{};
  std::vector<int> perm(kNumFaultClasses);
  for (int i = 0; i < kNumFaultClasses; ++i) perm[static_cast<std::size_t>(i)] = i + 1;
  Rng rng(Rng::mix(seed, 0x6c61626564ULL));
  rng.shuffle(perm);
  for (int i = 0; i < kNumFaultClasses; ++i)
    order[static_cast<std::size_t>(i)] = static_cast<FaultClass>(perm[static_cast<std::size_t>(i)]);
  return order;
}

}  // namespace fault_detail

using TopologySource = std::function<NetworkGraph(std::uint64_t topo_seed)>;

inline TopologySource synthetic_source(const TopologyParams& params) {
  params.validate();
  return [params](std::uint64_t topo_seed) {
    TopologyParams p = params;
    p.seed = topo_seed;
    return generate_synthetic(p);
  };
}

// Real-world topologies: one corpus file per sample (seed-selected), with
// gateways/ASes/destinations attached per the parameter row.
inline TopologySource zoo_topology_source(ZooCorpus corpus, const TopologyParams& attach_params) {
  attach_params.validate();
  return [corpus = std::move(corpus), attach_params](std::uint64_t topo_seed) {
    TopologyParams p = attach_params;
    p.seed = topo_seed;
    const std::size_t idx = static_cast<std::size_t>(topo_seed % corpus.size());
    return load_graphml(corpus.texts[idx], p);
  };
}

struct SampleRecipe {
  TopologySource topology;
  QueryCounts query_counts{};
  std::uint64_t seed = 0;
  DatasetMode mode = DatasetMode::Pregenerated;
};

struct BuiltSample {
  GraphSample sample;
  bool f_check_value = false;  // meaningful for the pregenerated path only
};

// One labeled sample, deterministic in (recipe.seed, index). Labels follow
// a seeded round-robin rotation so any prefix of the stream is balanced
// within one sample per class.
inline BuiltSample make_sample(const SampleRecipe& recipe, std::uint64_t index) {
  using fault_detail::sub_seed;
  const auto rotation = fault_detail::label_rotation(recipe.seed);
  const FaultClass label = rotation[index % kNumFaultClasses];

  const NetworkGraph graph = recipe.topology(sub_seed(recipe.seed, index, 1));
  const Configuration true_config = sample_true_config(graph, sub_seed(recipe.seed, index, 2));
  Rng fault_rng(sub_seed(recipe.seed, index, 3));
  const int delta = draw_delta(fault_rng);

  BuiltSample out;
  if (recipe.mode == DatasetMode::Pregenerated) {
    const Configuration broken = apply_template_offset(true_config, label, delta);
    out.sample = build_sample(graph, broken, label);
    Rng qrng(sub_seed(recipe.seed, index, 4));
    const std::array<int, 3> counts{recipe.query_counts.fwd.sample(qrng),
                                    recipe.query_counts.reach.sample(qrng),
                                    recipe.query_counts.iso.sample(qrng)};
    const SpecificationSet queries =
        generate_queries(graph, true_config, counts, sub_seed(recipe.seed, index, 5));
    out.f_check_value = f_check(queries, prot(graph, broken, queries));
  } else {
    GraphSample clean = build_sample(graph, true_config, FaultClass::None);
    out.sample = perturb_features(std::move(clean), label, delta);
  }
  out.sample.meta = {index, sub_seed(recipe.seed, index, 1), delta};
  return out;
}

struct DatasetBuild {
  Dataset dataset;
  int f_check_positive = 0;
};

inline DatasetBuild make_dataset(const SampleRecipe& recipe, int n_samples) {
  if (n_samples < kNumFaultClasses)
    throw InfeasibleParams("need at least one sample per fault class");
  DatasetBuild out;
  out.dataset.samples.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    BuiltSample built = make_sample(recipe, static_cast<std::uint64_t>(i));
    if (built.f_check_value) ++out.f_check_positive;
    ++out.dataset.class_histogram[static_cast<std::size_t>(fault_label(built.sample.label))];
    out.dataset.samples.push_back(std::move(built.sample));
  }
  return out;
}

inline DatasetBuild make_dataset(const TopologyParams& topo_params, int n_samples,
                                 DatasetMode mode, std::uint64_t seed) {
  SampleRecipe recipe{synthetic_source(topo_params), topo_params.query_counts, seed, mode};
  return make_dataset(recipe, n_samples);
}

}  // namespace netdiag
