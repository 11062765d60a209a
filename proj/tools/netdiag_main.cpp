// netdiag: simulate OSPF/BGP control planes on ISP-style graphs, inject
// template-level misconfigurations, and diagnose them with a rule-based
// matcher or edge-type-aware graph attention networks.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netdiag/bench.hpp"
#include "netdiag/faults.hpp"
#include "netdiag/graphml.hpp"
#include "netdiag/io.hpp"
#include "netdiag/rb.hpp"
#include "netdiag/train.hpp"

namespace {

using namespace netdiag;

constexpr int kExitBadInput = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitNoMisconfig = 4;

struct PresetRow {
  TopologyParams topo;
  bool zoo = false;
};

PresetRow topology_preset(const std::string& name) {
  PresetRow row;
  if (name == "baseline") {
    row.topo.router_range = {16, 23};
    row.topo.dst_range = {4, 7};
    row.topo.gateway_count = {3, 3};
    row.topo.query_counts = {{8, 12}, {4, 7}, {10, 30}};
  } else if (name == "larger-scale") {
    row.topo.router_range = {24, 31};
    row.topo.dst_range = {10, 15};
    row.topo.gateway_count = {7, 9};
    row.topo.query_counts = {{25, 35}, {15, 20}, {10, 30}};
  } else if (name == "real-world") {
    row.topo.dst_range = {4, 7};
    row.topo.gateway_count = {3, 3};
    row.topo.query_counts = {{8, 12}, {4, 7}, {10, 30}};
    row.zoo = true;
  } else {
    throw Error("unknown preset '" + name + "' (expected baseline, larger-scale or real-world)");
  }
  return row;
}

// Desk-scale defaults; `paper` switches to the full-size configuration.
Hyperparams hyper_preset(const std::string& name) {
  Hyperparams hp;
  if (name == "desk") {
    hp.hidden_dim = 32;
    hp.heads = 4;
    hp.layers = 2;
    hp.batch_size = 4;
    hp.learning_rate = 2e-3;
    hp.weight_decay = 1e-5;
    hp.epochs = 20;
    hp.dropout_rate = 0.0;
  } else if (name == "paper") {
    hp.hidden_dim = 128;
    hp.heads = 8;
    hp.layers = 2;
    hp.batch_size = 4;
    hp.learning_rate = 1e-4;
    hp.weight_decay = 1e-5;
    hp.epochs = 400;
    hp.dropout_rate = 0.1;
  } else {
    throw Error("unknown hyperparameter preset '" + name + "' (expected desk or paper)");
  }
  return hp;
}

std::string zoo_dir_or_die(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  const char* env = std::getenv("NETDIAG_ZOO_DIR");
  if (env != nullptr && *env != '\0') return env;
  throw Error("real-world preset needs --zoo-dir or NETDIAG_ZOO_DIR");
}

SampleRecipe make_recipe(const PresetRow& row, const std::string& zoo_dir, std::uint64_t seed,
                         DatasetMode mode) {
  SampleRecipe recipe;
  recipe.query_counts = row.topo.query_counts;
  recipe.seed = seed;
  recipe.mode = mode;
  if (row.zoo) {
    recipe.topology = zoo_topology_source(load_zoo_dir(zoo_dir), row.topo);
  } else {
    recipe.topology = synthetic_source(row.topo);
  }
  return recipe;
}

Json topo_params_json(const std::string& preset, const PresetRow& row, const std::string& zoo_dir) {
  Json j{{"preset", preset},
         {"router_range", {row.topo.router_range.lo, row.topo.router_range.hi}},
         {"dst_range", {row.topo.dst_range.lo, row.topo.dst_range.hi}},
         {"gateways", {row.topo.gateway_count.lo, row.topo.gateway_count.hi}},
         {"query_counts",
          {{"fwd", {row.topo.query_counts.fwd.lo, row.topo.query_counts.fwd.hi}},
           {"reach", {row.topo.query_counts.reach.lo, row.topo.query_counts.reach.hi}},
           {"iso", {row.topo.query_counts.iso.lo, row.topo.query_counts.iso.hi}}}}};
  if (row.zoo) j["zoo_dir"] = zoo_dir;
  return j;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

int cmd_gen(const std::string& preset, int n, std::uint64_t seed, const std::string& mode_name,
            const std::string& zoo_dir_flag, const std::string& out_path) {
  const PresetRow row = topology_preset(preset);
  const std::string zoo_dir = row.zoo ? zoo_dir_or_die(zoo_dir_flag) : "";
  const DatasetMode mode =
      mode_name == "on-the-fly" ? DatasetMode::OnTheFly : DatasetMode::Pregenerated;
  const SampleRecipe recipe = make_recipe(row, zoo_dir, seed, mode);
  const DatasetBuild build = make_dataset(recipe, n);
  atomic_write(out_path, dataset_to_jsonl(build, topo_params_json(preset, row, zoo_dir), seed, mode));
  Json hist = Json::object();
  for (int f = 0; f < kNumFaultClasses; ++f)
    hist["f" + std::to_string(f + 1)] = build.dataset.class_histogram[static_cast<std::size_t>(f)];
  std::cout << Json{{"written", out_path},
                    {"n", n},
                    {"class_histogram", hist},
                    {"f_check_positive", build.f_check_positive}}
                   .dump(2)
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data_path;
  std::string stream_preset;
  int stream_epoch_size = 1024;
  std::string zoo_dir;
  std::string variant = "etagatv2";
  std::string preset = "desk";
  std::uint64_t seed = 7;
  int epochs = -1;
  double lr = -1.0;
  double dropout = -1.0;
  int batch = -1;
  int hidden = -1;
  int heads = -1;
  int layers = -1;
  double weight_decay = -1.0;
  long long max_samples = 0;
  double target_acc = 0.8;
  int ma_window = 1024;
  std::string out_checkpoint;
  std::string out_report;
};

Hyperparams resolve_hyperparams(const TrainArgs& args) {
  Hyperparams hp = hyper_preset(args.preset);
  hp.variant = variant_from_string(args.variant);
  hp.seed = args.seed;
  if (args.epochs > 0) hp.epochs = args.epochs;
  if (args.lr > 0) hp.learning_rate = args.lr;
  if (args.dropout >= 0) hp.dropout_rate = args.dropout;
  if (args.batch > 0) hp.batch_size = args.batch;
  if (args.hidden > 0) hp.hidden_dim = args.hidden;
  if (args.heads > 0) hp.heads = args.heads;
  if (args.layers > 0) hp.layers = args.layers;
  if (args.weight_decay >= 0) hp.weight_decay = args.weight_decay;
  return hp;
}

int cmd_train(const TrainArgs& args) {
  LoadedDataset loaded;
  SampleSource source;
  if (!args.data_path.empty()) {
    loaded = dataset_from_jsonl(read_file(args.data_path));
    source = dataset_source(loaded.dataset);
  } else {
    const PresetRow row = topology_preset(args.stream_preset);
    const std::string zoo_dir = row.zoo ? zoo_dir_or_die(args.zoo_dir) : "";
    source = stream_source(make_recipe(row, zoo_dir, args.seed, DatasetMode::OnTheFly),
                           static_cast<std::uint64_t>(args.stream_epoch_size));
  }

  const Hyperparams hp = resolve_hyperparams(args);
  TrainOptions options;
  options.max_samples = args.max_samples;
  options.target_accuracy = args.target_acc;
  options.moving_window = args.ma_window;
  options.on_epoch = [](const EpochStats& e) {
    std::fprintf(stderr, "epoch %d: samples %lld loss %.4f acc %.4f\n", e.epoch, e.samples_seen,
                 e.loss, e.accuracy);
  };

  const TrainResult result = train(source, hp, options);
  if (!args.out_checkpoint.empty())
    atomic_write(args.out_checkpoint, checkpoint_to_json(result.params).dump() + "\n");
  if (!args.out_report.empty()) atomic_write(args.out_report, train_report_to_csv(result.report));

  std::cout << Json{{"final_loss", result.report.epochs.back().loss},
                    {"final_acc", result.report.epochs.back().accuracy},
                    {"samples_seen", result.report.epochs.back().samples_seen},
                    {"samples_to_target", result.report.samples_to_target},
                    {"wall_seconds", result.report.wall_seconds},
                    {"params_checksum", result.report.params_checksum},
                    {"metrics_checksum", result.report.metrics_checksum},
                    {"param_count", result.params.param_count()}}
                   .dump(2)
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const std::string& checkpoint_path, const std::vector<std::string>& data_paths,
             const std::string& out_path) {
  const ModelParams params = checkpoint_from_json(Json::parse(read_file(checkpoint_path)));
  Json datasets = Json::array();
  for (const auto& path : data_paths) {
    const LoadedDataset loaded = dataset_from_jsonl(read_file(path));
    const EvalResult eval = evaluate(params, loaded.dataset);
    Json confusion = Json::array(), normalized = Json::array();
    const auto norm = eval.row_normalized();
    for (int r = 0; r < kNumClasses; ++r) {
      confusion.push_back(eval.confusion[static_cast<std::size_t>(r)]);
      normalized.push_back(norm[static_cast<std::size_t>(r)]);
    }
    datasets.push_back(Json{{"path", path},
                            {"n", loaded.dataset.size()},
                            {"accuracy", eval.accuracy},
                            {"confusion", confusion},
                            {"confusion_row_normalized", normalized}});
    std::fprintf(stderr, "%s: accuracy %.4f over %d samples\n", path.c_str(), eval.accuracy,
                 loaded.dataset.size());
  }
  const Json out{{"checkpoint", checkpoint_path},
                 {"variant", to_string(params.hp.variant)},
                 {"datasets", datasets}};
  if (!out_path.empty()) atomic_write(out_path, out.dump(2) + "\n");
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

int cmd_compare(const std::string& data_path, int seeds, long long budget,
                const std::vector<std::string>& eval_paths, const std::string& curves_path,
                const std::string& summary_path) {
  const LoadedDataset loaded = dataset_from_jsonl(read_file(data_path));
  const SampleSource source = dataset_source(loaded.dataset);

  std::vector<LoadedDataset> eval_sets;
  for (const auto& p : eval_paths) eval_sets.push_back(dataset_from_jsonl(read_file(p)));

  std::string curves = "variant,seed,samples_seen,ma_acc\n";
  std::string summary = "variant,seed,samples_to_80pct";
  for (const auto& p : eval_paths) summary += ",acc:" + p;
  summary += "\n";

  const std::vector<Variant> variants{Variant::Gat, Variant::Gatv2, Variant::EtaGat,
                                      Variant::EtaGatv2};
  std::map<Variant, std::vector<long long>> to80;
  for (const Variant v : variants) {
    for (int s = 0; s < seeds; ++s) {
      Hyperparams hp = hyper_preset("desk");
      hp.variant = v;
      hp.seed = static_cast<std::uint64_t>(s) + 1;
      hp.epochs = static_cast<int>((budget + loaded.dataset.size() - 1) / loaded.dataset.size());
      TrainOptions options;
      options.max_samples = budget;
      const TrainResult r = train(source, hp, options);
      const long long reached =
          r.report.samples_to_target > 0 ? r.report.samples_to_target : budget;
      to80[v].push_back(reached);
      for (const auto& [seen, acc] : r.report.ma_curve)
        curves += std::string(to_string(v)) + "," + std::to_string(hp.seed) + "," +
                  std::to_string(seen) + "," + fmt_double(acc) + "\n";
      summary += std::string(to_string(v)) + "," + std::to_string(hp.seed) + "," +
                 std::to_string(reached);
      for (auto& es : eval_sets)
        summary += "," + fmt_double(evaluate(r.params, es.dataset).accuracy);
      summary += "\n";
      std::fprintf(stderr, "%s seed %llu: samples_to_80pct %lld\n", to_string(v),
                   static_cast<unsigned long long>(hp.seed), reached);
    }
  }
  Json medians = Json::object();
  for (const Variant v : variants) {
    auto xs = to80[v];
    std::sort(xs.begin(), xs.end());
    medians[to_string(v)] = xs[xs.size() / 2];
    summary += std::string(to_string(v)) + ",median," + std::to_string(xs[xs.size() / 2]) + "\n";
  }
  if (!curves_path.empty()) atomic_write(curves_path, curves);
  if (!summary_path.empty()) atomic_write(summary_path, summary);
  std::cout << Json{{"samples_to_80pct_median", medians}}.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

int cmd_bench(std::vector<int> scales, int reps, int graphs_per_scale, std::uint64_t seed,
              const std::string& out_path) {
  std::string csv = "algorithm,scale,repetition,seconds\n";
  Hyperparams hp = hyper_preset("desk");
  hp.variant = Variant::EtaGatv2;

  std::vector<std::pair<double, double>> infer_points;
  for (const int scale : scales) {
    const TopologyParams params = scale_topology(topology_preset("baseline").topo, scale);
    std::vector<PreparedSample> prepared;
    for (int g = 0; g < graphs_per_scale; ++g) {
      SampleRecipe recipe{synthetic_source(params), params.query_counts,
                          Rng::mix(seed, static_cast<std::uint64_t>(scale)), DatasetMode::OnTheFly};
      prepared.push_back(prepare_sample(make_sample(recipe, static_cast<std::uint64_t>(g)).sample));
    }
    const ModelParams model = init_params(hp, kFeatureDim);
    double best_total = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const double secs = time_seconds([&] {
        for (const auto& s : prepared) (void)predict_proba(model, s);
      });
      csv += "etagatv2_infer," + std::to_string(scale) + "," + std::to_string(rep) + "," +
             fmt_double(secs / graphs_per_scale) + "\n";
      best_total = rep == 0 ? secs : std::min(best_total, secs);
    }
    infer_points.push_back({static_cast<double>(scale), best_total / graphs_per_scale});
  }
  const double infer_exponent = fit_power_law_exponent(infer_points);

  // Rule-based matcher timing across violation-set sizes, plus the
  // dominant-term operation count.
  std::vector<std::pair<double, double>> rb_points;
  const WeightTable table = default_weight_table();
  for (const int size : {100, 1000, 10000}) {
    DeltaS delta;
    for (int i = 0; i < size; ++i) {
      delta.violated.push_back(i);
      delta.by_kind[static_cast<std::size_t>(i % 3)].push_back(i);
    }
    for (int rep = 0; rep < reps; ++rep) {
      const double secs = time_seconds([&] {
        for (int it = 0; it < 50; ++it) (void)rb_classify(delta, table);
      });
      csv += "rb_classify," + std::to_string(size) + "," + std::to_string(rep) + "," +
             fmt_double(secs / 50) + "\n";
      if (rep == 0) rb_points.push_back({static_cast<double>(size), secs / 50});
    }
  }

  if (!out_path.empty()) atomic_write(out_path, csv);
  std::cout << Json{{"etagatv2_infer_exponent", infer_exponent},
                    {"rb_op_count_example", rb_complexity_estimate(kNumFaultClasses, 20)},
                    {"csv", out_path}}
                   .dump(2)
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// rb
// ---------------------------------------------------------------------------

int cmd_rb(const std::string& scenario_path, const std::string& preset, std::uint64_t seed,
           const std::string& fault_name, int delta_flag, const std::string& weights_path,
           const std::string& out_path, const std::string& out_scenario,
           const std::string& zoo_dir_flag) {
  NetworkGraph graph;
  Configuration true_config, observed_config;
  SpecificationSet queries;

  if (!scenario_path.empty()) {
    const Json j = Json::parse(read_file(scenario_path));
    graph = graph_from_json(j.at("graph"));
    true_config = config_from_json(j.at("true_config"));
    observed_config = config_from_json(j.at("observed_config"));
    queries = spec_set_from_json(j.at("queries"));
  } else {
    const PresetRow row = topology_preset(preset);
    Rng rng(Rng::mix(seed, 0x7262ULL));
    if (row.zoo) {
      TopologyParams p = row.topo;
      p.seed = rng.next_u64();
      graph = load_graphml(load_zoo_dir(zoo_dir_or_die(zoo_dir_flag)).texts[0], p);
    } else {
      TopologyParams p = row.topo;
      p.seed = rng.next_u64();
      graph = generate_synthetic(p);
    }
    true_config = sample_true_config(graph, rng.next_u64());
    observed_config = true_config;
    if (fault_name != "f0") {
      const int delta = delta_flag > 0 ? delta_flag : draw_delta(rng);
      observed_config = apply_template_offset(true_config, fault_from_string(fault_name), delta);
    }
    const std::array<int, 3> counts{row.topo.query_counts.fwd.sample(rng),
                                    row.topo.query_counts.reach.sample(rng),
                                    row.topo.query_counts.iso.sample(rng)};
    queries = generate_queries(graph, true_config, counts, rng.next_u64());
  }

  if (!out_scenario.empty()) {
    atomic_write(out_scenario, Json{{"graph", graph_to_json(graph)},
                                    {"true_config", config_to_json(true_config)},
                                    {"observed_config", config_to_json(observed_config)},
                                    {"queries", spec_set_to_json(queries)}}
                                       .dump() +
                                   "\n");
  }

  const ObservedSpecs observed = prot(graph, observed_config, queries);
  if (!f_check(queries, observed)) {
    std::cout << Json{{"f_check", 0}, {"message", "no misconfiguration detected"}}.dump(2) << '\n';
    return kExitNoMisconfig;
  }
  const DeltaS delta = diff_specs(queries, observed);
  const WeightTable table = weights_path.empty()
                                ? default_weight_table()
                                : weight_table_from_json(Json::parse(read_file(weights_path)));
  const RbVerdict verdict = rb_classify(delta, table);

  Json scores = Json::object();
  for (int f = 0; f < kNumFaultClasses; ++f)
    scores["f" + std::to_string(f + 1)] = verdict.scores[static_cast<std::size_t>(f)];
  const Json out{{"f_check", 1},
                 {"delta", Json{{"fwd", delta.count(SpecKind::Fwd)},
                                {"reach", delta.count(SpecKind::Reach)},
                                {"iso", delta.count(SpecKind::Iso)},
                                {"total", delta.size()}}},
                 {"verdict", to_string(verdict.f_hat)},
                 {"tie", verdict.tie},
                 {"scores", scores}};
  if (!out_path.empty()) atomic_write(out_path, out.dump(2) + "\n");
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Routing misconfiguration laboratory: protocol simulation, fault injection, "
               "rule-based and attention-network diagnosis"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a labeled dataset (JSONL)");
  std::string gen_preset = "baseline", gen_mode = "pregenerated", gen_zoo, gen_out = "dataset.jsonl";
  int gen_n = 1024;
  std::uint64_t gen_seed = 7;
  gen->add_option("--preset", gen_preset, "baseline | larger-scale | real-world");
  gen->add_option("--n", gen_n, "number of samples");
  gen->add_option("--seed", gen_seed, "dataset seed");
  gen->add_option("--mode", gen_mode, "pregenerated | on-the-fly");
  gen->add_option("--zoo-dir", gen_zoo, "directory of .graphml topologies (or NETDIAG_ZOO_DIR)");
  gen->add_option("--out", gen_out, "output JSONL path");

  // train
  auto* tr = app.add_subcommand("train", "Train a variant; writes checkpoint and report CSV");
  TrainArgs ta;
  tr->add_option("--data", ta.data_path, "dataset JSONL (omit to stream synthetic samples)");
  tr->add_option("--stream-preset", ta.stream_preset, "topology preset for streaming mode");
  tr->add_option("--stream-n", ta.stream_epoch_size, "stream epoch size");
  tr->add_option("--zoo-dir", ta.zoo_dir, "zoo directory for real-world streaming");
  tr->add_option("--variant", ta.variant, "gat | gatv2 | etagat | etagatv2");
  tr->add_option("--preset", ta.preset, "hyperparameter preset: desk | paper");
  tr->add_option("--seed", ta.seed, "training seed");
  tr->add_option("--epochs", ta.epochs, "override epochs");
  tr->add_option("--lr", ta.lr, "override learning rate");
  tr->add_option("--dropout", ta.dropout, "override attention dropout");
  tr->add_option("--batch", ta.batch, "override batch size");
  tr->add_option("--hidden", ta.hidden, "override hidden dimension");
  tr->add_option("--heads", ta.heads, "override attention heads");
  tr->add_option("--layers", ta.layers, "override attention layers");
  tr->add_option("--weight-decay", ta.weight_decay, "override weight decay");
  tr->add_option("--max-samples", ta.max_samples, "stop after this many consumed samples");
  tr->add_option("--target-acc", ta.target_acc, "moving-average accuracy target");
  tr->add_option("--ma-window", ta.ma_window, "moving-average window (consumed samples)");
  tr->add_option("--out-checkpoint", ta.out_checkpoint, "checkpoint JSON path");
  tr->add_option("--out-report", ta.out_report, "per-epoch CSV path");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on one or more datasets");
  std::string ev_checkpoint, ev_out;
  std::vector<std::string> ev_data;
  ev->add_option("--checkpoint", ev_checkpoint, "checkpoint JSON")->required();
  ev->add_option("--data", ev_data, "dataset JSONL (repeatable)")->required();
  ev->add_option("--out", ev_out, "metrics JSON path");

  // compare
  auto* cp = app.add_subcommand("compare", "Sample-efficiency comparison across all variants");
  std::string cp_data, cp_curves = "curves.csv", cp_summary = "summary.csv";
  std::vector<std::string> cp_eval;
  int cp_seeds = 3;
  long long cp_budget = 20000;
  cp->add_option("--data", cp_data, "training dataset JSONL")->required();
  cp->add_option("--seeds", cp_seeds, "number of seeds per variant");
  cp->add_option("--budget", cp_budget, "consumed-sample budget per run");
  cp->add_option("--eval-data", cp_eval, "datasets to evaluate each checkpoint on (repeatable)");
  cp->add_option("--out-curves", cp_curves, "moving-average curve CSV");
  cp->add_option("--out-summary", cp_summary, "summary CSV");

  // bench
  auto* bn = app.add_subcommand("bench", "Runtime scaling of inference and the rule-based matcher");
  std::vector<int> bn_scales{1, 2, 4};
  int bn_reps = 3, bn_graphs = 8;
  std::uint64_t bn_seed = 7;
  std::string bn_out = "bench.csv";
  bn->add_option("--scales", bn_scales, "graph scale factors");
  bn->add_option("--reps", bn_reps, "repetitions per scale");
  bn->add_option("--graphs-per-scale", bn_graphs, "graphs per scale");
  bn->add_option("--seed", bn_seed, "benchmark seed");
  bn->add_option("--out", bn_out, "timing CSV path");

  // rb
  auto* rb = app.add_subcommand("rb", "Rule-based diagnosis of one scenario");
  std::string rb_scenario, rb_preset = "baseline", rb_fault = "f1", rb_weights, rb_out,
              rb_out_scenario, rb_zoo;
  std::uint64_t rb_seed = 7;
  int rb_delta = 0;
  rb->add_option("--scenario", rb_scenario, "scenario JSON file");
  rb->add_option("--preset", rb_preset, "topology preset for generated scenarios");
  rb->add_option("--seed", rb_seed, "scenario seed");
  rb->add_option("--fault", rb_fault, "fault class to inject (f0..f7; f0 = none)");
  rb->add_option("--delta", rb_delta, "template offset (default: seeded draw from [1,4])");
  rb->add_option("--weights", rb_weights, "weight table JSON (default: built-in table)");
  rb->add_option("--out", rb_out, "verdict JSON path");
  rb->add_option("--out-scenario", rb_out_scenario, "also write the generated scenario JSON");
  rb->add_option("--zoo-dir", rb_zoo, "zoo directory for real-world scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_preset, gen_n, gen_seed, gen_mode, gen_zoo, gen_out);
    if (tr->parsed()) return cmd_train(ta);
    if (ev->parsed()) return cmd_eval(ev_checkpoint, ev_data, ev_out);
    if (cp->parsed()) return cmd_compare(cp_data, cp_seeds, cp_budget, cp_eval, cp_curves, cp_summary);
    if (bn->parsed()) return cmd_bench(bn_scales, bn_reps, bn_graphs, bn_seed, bn_out);
    if (rb->parsed())
      return cmd_rb(rb_scenario, rb_preset, rb_seed, rb_fault, rb_delta, rb_weights, rb_out,
                    rb_out_scenario, rb_zoo);
  } catch (const Diverged& e) {
    std::fprintf(stderr, "error: training diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  }
  return 0;
}
