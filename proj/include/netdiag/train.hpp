#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "netdiag/errors.hpp"
#include "netdiag/faults.hpp"
#include "netdiag/model.hpp"
#include "netdiag/optim.hpp"
#include "netdiag/rng.hpp"

namespace netdiag {

// Uniform view over pregenerated datasets and on-the-fly streams. size() of 0
// means unbounded; get() must be deterministic in the index.
struct SampleSource {
  std::function<GraphSample(std::uint64_t)> get;
  std::uint64_t size = 0;
  std::uint64_t epoch_size() const { return size; }
};

inline SampleSource dataset_source(const Dataset& dataset) {
  const Dataset* d = &dataset;
  return {[d](std::uint64_t i) { return d->samples[static_cast<std::size_t>(i)]; },
          static_cast<std::uint64_t>(d->size())};
}

inline SampleSource stream_source(const SampleRecipe& recipe, std::uint64_t epoch_size) {
  SampleRecipe r = recipe;
  r.mode = DatasetMode::OnTheFly;
  return {[r](std::uint64_t i) { return make_sample(r, i).sample; }, epoch_size};
}

struct EpochStats {
  int epoch = 0;
  long long samples_seen = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::vector<std::pair<long long, double>> ma_curve;  // (samples_seen, moving-avg accuracy)
  long long samples_to_target = -1;                    // -1: never crossed
  double wall_seconds = 0.0;
  std::uint64_t params_checksum = 0;
  std::uint64_t metrics_checksum = 0;
};

struct TrainOptions {
  double target_accuracy = 0.8;
  int moving_window = 1024;   // consumed samples
  int curve_stride = 256;     // consumed samples between curve points
  long long max_samples = 0;  // 0: bounded by epochs only
  std::function<void(const EpochStats&)> on_epoch;
};

namespace train_detail {

inline std::uint64_t fnv1a(std::uint64_t h, const void* bytes, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t checksum_params(const ModelParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [name, m] : params.tensors()) {
    h = fnv1a(h, name.data(), name.size());
    h = fnv1a(h, m->data.data(), m->data.size() * sizeof(double));
  }
  return h;
}

// Windowed accuracy over per-sample on-batch correctness bits.
class MovingAccuracy {
 public:
  explicit MovingAccuracy(int window) : window_(window) {}

  void push(bool correct) {
    bits_.push_back(correct);
    sum_ += correct ? 1 : 0;
    if (static_cast<int>(bits_.size()) > window_) {
      sum_ -= bits_.front() ? 1 : 0;
      bits_.pop_front();
    }
  }

  bool full() const { return static_cast<int>(bits_.size()) >= window_; }
  double value() const { return bits_.empty() ? 0.0 : static_cast<double>(sum_) / bits_.size(); }

 private:
  int window_;
  std::deque<bool> bits_;
  long long sum_ = 0;
};

}  // namespace train_detail

struct TrainResult {
  ModelParams params;
  TrainReport report;
};

// Batched training with per-epoch shuffling, fully reproducible from the
// hyperparameter seed. Throws Diverged when the loss stops being finite.
inline TrainResult train(const SampleSource& source, const Hyperparams& hp,
                         const TrainOptions& options = {}) {
  hp.validate();
  if (source.size == 0) throw Error("sample source must declare an epoch size");
  const auto t0 = std::chrono::steady_clock::now();

  TrainResult result;
  result.params = init_params(hp, source.get(0).features.cols);
  AdamState adam;
  Rng shuffle_rng(Rng::mix(hp.seed, 0x73687566ULL));
  Rng dropout_rng(Rng::mix(hp.seed, 0x64726f70ULL));

  // Samples are prepared lazily and cached; dataset epochs revisit them.
  std::vector<PreparedSample> cache(static_cast<std::size_t>(source.size));
  std::vector<char> cached(static_cast<std::size_t>(source.size), 0);
  auto prepared = [&](std::uint64_t i) -> const PreparedSample& {
    if (!cached[static_cast<std::size_t>(i)]) {
      cache[static_cast<std::size_t>(i)] = prepare_sample(source.get(i));
      cached[static_cast<std::size_t>(i)] = 1;
    }
    return cache[static_cast<std::size_t>(i)];
  };

  train_detail::MovingAccuracy ma(options.moving_window);
  long long samples_seen = 0;
  long long next_curve_point = options.curve_stride;
  bool stop = false;

  for (int epoch = 1; epoch <= hp.epochs && !stop; ++epoch) {
    std::vector<std::uint64_t> order(source.size);
    for (std::uint64_t i = 0; i < source.size; ++i) order[static_cast<std::size_t>(i)] = i;
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    long long batch_count = 0;
    long long correct = 0;
    long long seen_this_epoch = 0;

    for (std::size_t pos = 0; pos < order.size() && !stop; pos += static_cast<std::size_t>(hp.batch_size)) {
      std::vector<const PreparedSample*> batch;
      std::vector<int> labels;
      for (std::size_t b = pos; b < order.size() && b < pos + static_cast<std::size_t>(hp.batch_size); ++b) {
        const PreparedSample& s = prepared(order[b]);
        batch.push_back(&s);
        labels.push_back(s.label);
      }
      LossResult lr;
      try {
        lr = loss_and_grads(result.params, batch, hp.dropout_rate > 0.0 ? &dropout_rng : nullptr);
      } catch (const NonFiniteLoss& e) {
        throw Diverged(e.what());
      }
      adam_step(result.params, lr.grads, adam, hp.learning_rate, hp.weight_decay);

      loss_sum += lr.loss;
      ++batch_count;
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const bool ok = lr.predictions[b] == labels[b];
        correct += ok ? 1 : 0;
        ma.push(ok);
        ++samples_seen;
        ++seen_this_epoch;
        if (ma.full() && result.report.samples_to_target < 0 &&
            ma.value() >= options.target_accuracy)
          result.report.samples_to_target = samples_seen;
        if (samples_seen >= next_curve_point) {
          result.report.ma_curve.push_back({samples_seen, ma.value()});
          next_curve_point += options.curve_stride;
        }
      }
      if (options.max_samples > 0 && samples_seen >= options.max_samples) stop = true;
    }

    EpochStats stats{epoch, samples_seen, loss_sum / std::max<long long>(1, batch_count),
                     static_cast<double>(correct) / std::max<long long>(1, seen_this_epoch)};
    result.report.epochs.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);
  }

  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.report.params_checksum = train_detail::checksum_params(result.params);
  std::uint64_t mh = 0xcbf29ce484222325ULL;
  for (const auto& e : result.report.epochs) {
    mh = train_detail::fnv1a(mh, &e.loss, sizeof(e.loss));
    mh = train_detail::fnv1a(mh, &e.accuracy, sizeof(e.accuracy));
    mh = train_detail::fnv1a(mh, &e.samples_seen, sizeof(e.samples_seen));
  }
  result.report.metrics_checksum = mh;
  return result;
}

struct EvalResult {
  double accuracy = 0.0;
  // Raw counts; rows index the true class, columns the predicted one.
  std::array<std::array<long long, kNumClasses>, kNumClasses> confusion{};

  std::array<std::array<double, kNumClasses>, kNumClasses> row_normalized() const {
    std::array<std::array<double, kNumClasses>, kNumClasses> out{};
    for (int r = 0; r < kNumClasses; ++r) {
      long long total = 0;
      for (int c = 0; c < kNumClasses; ++c) total += confusion[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      for (int c = 0; c < kNumClasses; ++c)
        out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            total > 0 ? static_cast<double>(confusion[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) / total : 0.0;
    }
    return out;
  }
};

inline EvalResult evaluate(const ModelParams& params, const Dataset& dataset) {
  EvalResult out;
  if (dataset.samples.empty()) return out;
  long long correct = 0;
  for (const auto& sample : dataset.samples) {
    const PreparedSample s = prepare_sample(sample);
    const int pred = argmax_row(predict_proba(params, s));
    ++out.confusion[static_cast<std::size_t>(s.label)][static_cast<std::size_t>(pred)];
    if (pred == s.label) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.samples.size());
  return out;
}

}  // namespace netdiag
