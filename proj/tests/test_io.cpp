#include "netdiag/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace netdiag {
namespace {

TopologyParams baseline(std::uint64_t seed) {
  TopologyParams p;
  p.seed = seed;
  return p;
}

TEST(IoGraphJson, RoundTripPreservesEverything) {
  const NetworkGraph g = generate_synthetic(baseline(1));
  const Json j = graph_to_json(g);
  const NetworkGraph back = graph_from_json(j);
  EXPECT_EQ(graph_to_json(back).dump(), j.dump());
  // Keys are sorted in the canonical serialization.
  const std::string s = j.dump();
  EXPECT_LT(s.find("\"dst_attachment\""), s.find("\"edges\""));
  EXPECT_LT(s.find("\"edges\""), s.find("\"nodes\""));
}

TEST(IoConfigJson, RoundTrip) {
  const NetworkGraph g = generate_synthetic(baseline(2));
  const Configuration c = sample_true_config(g, 3);
  const Configuration back = config_from_json(config_to_json(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(config_to_json(c)["phi_max"], 32);
}

TEST(IoSpecSetJson, RoundTripKeepsKindOrder) {
  const NetworkGraph g = generate_synthetic(baseline(3));
  const Configuration c = sample_true_config(g, 4);
  const SpecificationSet set = generate_queries(g, c, {8, 4, 10}, 5);
  const SpecificationSet back = spec_set_from_json(spec_set_to_json(set));
  EXPECT_EQ(back.specs, set.specs);
  EXPECT_EQ(back.counts, set.counts);
}

TEST(IoDataset, JsonlRoundTrip) {
  const DatasetBuild build = make_dataset(baseline(4), 14, DatasetMode::Pregenerated, 6);
  const std::string text = dataset_to_jsonl(build, Json{{"preset", "baseline"}}, 6, DatasetMode::Pregenerated);
  const LoadedDataset loaded = dataset_from_jsonl(text);
  ASSERT_EQ(loaded.dataset.size(), build.dataset.size());
  EXPECT_EQ(loaded.header.at("n").get<int>(), 14);
  EXPECT_EQ(loaded.header.at("params").at("preset"), "baseline");
  EXPECT_EQ(loaded.dataset.class_histogram, build.dataset.class_histogram);
  for (int i = 0; i < build.dataset.size(); ++i) {
    const GraphSample& a = build.dataset.samples[static_cast<std::size_t>(i)];
    const GraphSample& b = loaded.dataset.samples[static_cast<std::size_t>(i)];
    ASSERT_EQ(a.features, b.features);
    ASSERT_EQ(a.edges, b.edges);
    ASSERT_EQ(a.label, b.label);
    ASSERT_EQ(a.meta.delta, b.meta.delta);
  }
  EXPECT_THROW(dataset_from_jsonl("{\"format\":\"other\"}\n"), ParseError);
  EXPECT_THROW(dataset_from_jsonl(""), ParseError);
}

TEST(IoCheckpoint, RoundTripBitExact) {
  Hyperparams hp;
  hp.hidden_dim = 8;
  hp.heads = 2;
  hp.variant = Variant::EtaGat;
  hp.seed = 9;
  const ModelParams params = init_params(hp, kFeatureDim);
  const Json j = checkpoint_to_json(params);
  const ModelParams back = checkpoint_from_json(j);
  for (const auto& [name, m] : params.tensors()) {
    bool found = false;
    for (const auto& [bname, bm] : back.tensors()) {
      if (bname != name) continue;
      found = true;
      ASSERT_EQ(*bm, *m) << name;
    }
    ASSERT_TRUE(found) << name;
  }
  EXPECT_EQ(back.hp.variant, Variant::EtaGat);
  EXPECT_EQ(j.at("param_count").get<long long>(), params.param_count());

  Json corrupt = j;
  corrupt["tensors"]["embed.w"]["shape"] = {1, 1};
  EXPECT_THROW(checkpoint_from_json(corrupt), ShapeMismatch);
}

TEST(IoCsv, TrainReportFormat) {
  TrainReport r;
  r.epochs = {{1, 14, 1.9, 0.14}, {2, 28, 1.2, 0.5}};
  const std::string csv = train_report_to_csv(r);
  EXPECT_EQ(csv.substr(0, 27), "epoch,samples_seen,loss,acc");
  EXPECT_NE(csv.find("\n1,14,"), std::string::npos);
  EXPECT_NE(csv.find("\n2,28,"), std::string::npos);
}

TEST(IoFiles, AtomicWriteAndRead) {
  const std::string path = (std::filesystem::temp_directory_path() / "netdiag_io_test.json").string();
  atomic_write(path, "{\"x\": 1}\n");
  EXPECT_EQ(read_file(path), "{\"x\": 1}\n");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove(path);
  EXPECT_THROW(read_file(path), IoError);
}

}  // namespace
}  // namespace netdiag
