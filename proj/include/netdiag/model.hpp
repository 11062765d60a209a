#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netdiag/errors.hpp"
#include "netdiag/faults.hpp"
#include "netdiag/graph.hpp"
#include "netdiag/matrix.hpp"
#include "netdiag/rng.hpp"
#include "netdiag/tape.hpp"

namespace netdiag {

inline constexpr int kNumEdgeTypes = 4;  // ospf, ebgp, ibgp, self-loop
inline constexpr int kNumClasses = kNumFaultClasses;

enum class Variant { Gat, Gatv2, EtaGat, EtaGatv2 };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::Gat: return "gat";
    case Variant::Gatv2: return "gatv2";
    case Variant::EtaGat: return "etagat";
    case Variant::EtaGatv2: return "etagatv2";
  }
  return "?";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "gat") return Variant::Gat;
  if (s == "gatv2") return Variant::Gatv2;
  if (s == "etagat") return Variant::EtaGat;
  if (s == "etagatv2") return Variant::EtaGatv2;
  throw Error("unknown variant '" + s + "'");
}

// Dynamic attention places the attention vector after the nonlinearity.
inline bool is_dynamic(Variant v) { return v == Variant::Gatv2 || v == Variant::EtaGatv2; }
// Edge-type-aware variants hold dedicated parameters per edge type.
inline bool is_eta(Variant v) { return v == Variant::EtaGat || v == Variant::EtaGatv2; }

struct Hyperparams {
  int hidden_dim = 32;
  int heads = 4;
  int layers = 2;
  int batch_size = 4;
  double learning_rate = 2e-3;
  double weight_decay = 1e-5;
  int epochs = 20;
  Variant variant = Variant::EtaGatv2;
  std::uint64_t seed = 7;
  double leaky_slope = 0.2;
  double dropout_rate = 0.1;

  void validate() const {
    if (hidden_dim < 1 || heads < 1 || hidden_dim % heads != 0)
      throw Error("hidden_dim must be a positive multiple of heads");
    if (layers < 1) throw Error("need at least one attention layer");
    if (batch_size < 1 || epochs < 1) throw Error("batch size and epochs must be positive");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw Error("learning rate must lie in (0, 1]");
    if (!(weight_decay >= 0.0 && weight_decay < 1.0)) throw Error("weight decay must lie in [0, 1)");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw Error("dropout rate must lie in [0, 1)");
    if (!(leaky_slope > 0.0 && leaky_slope <= 1.0)) throw Error("leaky slope must lie in (0, 1]");
  }
};

// ---------------------------------------------------------------------------
// Attention coefficients, scalar form. These are the reference formulas; the
// layer below evaluates the same math in vectorized form.
// ---------------------------------------------------------------------------

namespace attn_detail {

inline void check_vec(const Matrix& h, const char* name) {
  if (h.rows != 1) throw DimMismatch(std::string(name) + " must be a 1 x d row vector");
}

}  // namespace attn_detail

// e = LeakyReLU(a^T [W h_u || W h_v]); W is d' x d, a is 2d' x 1.
inline double attn_gat(const Matrix& h_u, const Matrix& h_v, const Matrix& W, const Matrix& a,
                       double slope) {
  attn_detail::check_vec(h_u, "h_u");
  attn_detail::check_vec(h_v, "h_v");
  if (W.cols != h_u.cols || W.cols != h_v.cols) throw DimMismatch("W columns must match feature dim");
  if (a.cols != 1 || a.rows != 2 * W.rows) throw DimMismatch("a must be 2d' x 1");
  double acc = 0.0;
  for (int r = 0; r < W.rows; ++r) {
    double wu = 0.0, wv = 0.0;
    for (int c = 0; c < W.cols; ++c) {
      wu += W.at(r, c) * h_u.data[static_cast<std::size_t>(c)];
      wv += W.at(r, c) * h_v.data[static_cast<std::size_t>(c)];
    }
    acc += a.data[static_cast<std::size_t>(r)] * wu;
    acc += a.data[static_cast<std::size_t>(W.rows + r)] * wv;
  }
  return acc > 0.0 ? acc : slope * acc;
}

// e = a^T LeakyReLU(W [h_u || h_v]); W is d' x 2d, a is d' x 1.
inline double attn_gatv2(const Matrix& h_u, const Matrix& h_v, const Matrix& W, const Matrix& a,
                         double slope) {
  attn_detail::check_vec(h_u, "h_u");
  attn_detail::check_vec(h_v, "h_v");
  if (W.cols != h_u.cols + h_v.cols) throw DimMismatch("W columns must match concatenated dim");
  if (a.cols != 1 || a.rows != W.rows) throw DimMismatch("a must be d' x 1");
  double acc = 0.0;
  for (int r = 0; r < W.rows; ++r) {
    double pre = 0.0;
    for (int c = 0; c < h_u.cols; ++c) pre += W.at(r, c) * h_u.data[static_cast<std::size_t>(c)];
    for (int c = 0; c < h_v.cols; ++c)
      pre += W.at(r, h_u.cols + c) * h_v.data[static_cast<std::size_t>(c)];
    acc += a.data[static_cast<std::size_t>(r)] * (pre > 0.0 ? pre : slope * pre);
  }
  return acc;
}

// Per-edge-type parameter bundle for the type-aware scalar forms.
struct TypedAttnParams {
  std::vector<Matrix> W;  // one per registered type
  std::vector<Matrix> a;
};

inline double attn_etagatv2(const Matrix& h_u, const Matrix& h_v, int tau,
                            const TypedAttnParams& params, double slope) {
  if (tau < 0 || tau >= static_cast<int>(params.W.size()))
    throw UnknownType("edge type " + std::to_string(tau) + " is not registered");
  return attn_gatv2(h_u, h_v, params.W[static_cast<std::size_t>(tau)],
                    params.a[static_cast<std::size_t>(tau)], slope);
}

inline double attn_etagat(const Matrix& h_u, const Matrix& h_v, int tau,
                          const TypedAttnParams& params, double slope) {
  if (tau < 0 || tau >= static_cast<int>(params.W.size()))
    throw UnknownType("edge type " + std::to_string(tau) + " is not registered");
  return attn_gat(h_u, h_v, params.W[static_cast<std::size_t>(tau)],
                  params.a[static_cast<std::size_t>(tau)], slope);
}

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

// One attention layer. Per (type slot, head): the scoring matrix is stored as
// its left/right halves W_l, W_r (each d_head x d_in, jointly the d_head x
// 2 d_in scoring transform), and W_l doubles as the message transform. The
// attention vector has d_head entries for dynamic variants and 2 d_head for
// static ones. Non-eta variants hold a single slot shared by all edge types.
struct LayerParams {
  int d_in = 0;
  int d_head = 0;
  std::vector<std::vector<Matrix>> W_l;  // [slot][head]
  std::vector<std::vector<Matrix>> W_r;
  std::vector<std::vector<Matrix>> a;

  int slots() const { return static_cast<int>(W_l.size()); }
};

struct ModelParams {
  Hyperparams hp;
  int d_feat = kFeatureDim;
  Matrix embed_w;  // h x d_feat
  Matrix embed_b;  // 1 x h
  std::vector<LayerParams> layers;
  Matrix mlp_w1, mlp_b1;  // h x h, 1 x h
  Matrix mlp_w2, mlp_b2;  // classes x h, 1 x classes

  int slot_of(EdgeType t) const { return is_eta(hp.variant) ? static_cast<int>(t) : 0; }

  std::vector<std::pair<std::string, Matrix*>> tensors() {
    std::vector<std::pair<std::string, Matrix*>> out;
    out.push_back({"embed.w", &embed_w});
    out.push_back({"embed.b", &embed_b});
    for (std::size_t l = 0; l < layers.size(); ++l) {
      for (int s = 0; s < layers[l].slots(); ++s) {
        for (int h = 0; h < hp.heads; ++h) {
          const std::string base =
              "layer" + std::to_string(l) + ".t" + std::to_string(s) + ".h" + std::to_string(h);
          out.push_back({base + ".wl", &layers[l].W_l[static_cast<std::size_t>(s)][static_cast<std::size_t>(h)]});
          out.push_back({base + ".wr", &layers[l].W_r[static_cast<std::size_t>(s)][static_cast<std::size_t>(h)]});
          out.push_back({base + ".a", &layers[l].a[static_cast<std::size_t>(s)][static_cast<std::size_t>(h)]});
        }
      }
    }
    out.push_back({"mlp.w1", &mlp_w1});
    out.push_back({"mlp.b1", &mlp_b1});
    out.push_back({"mlp.w2", &mlp_w2});
    out.push_back({"mlp.b2", &mlp_b2});
    return out;
  }

  std::vector<std::pair<std::string, const Matrix*>> tensors() const {
    auto mut = const_cast<ModelParams*>(this)->tensors();
    std::vector<std::pair<std::string, const Matrix*>> out;
    out.reserve(mut.size());
    for (auto& [name, ptr] : mut) out.push_back({name, ptr});
    return out;
  }

  long long param_count() const {
    long long n = 0;
    for (const auto& [name, m] : tensors()) n += static_cast<long long>(m->size());
    return n;
  }
};

namespace model_detail {

inline Matrix glorot(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  const double limit = std::sqrt(6.0 / (rows + cols));
  for (double& v : m.data) v = rng.uniform_real(-limit, limit);
  return m;
}

}  // namespace model_detail

inline ModelParams init_params(const Hyperparams& hp, int d_feat = kFeatureDim) {
  hp.validate();
  ModelParams p;
  p.hp = hp;
  p.d_feat = d_feat;
  Rng rng(Rng::mix(hp.seed, 0x696e6974ULL));
  const int h = hp.hidden_dim;
  p.embed_w = model_detail::glorot(h, d_feat, rng);
  p.embed_b = Matrix(1, h);
  const int n_slots = is_eta(hp.variant) ? kNumEdgeTypes : 1;
  for (int l = 0; l < hp.layers; ++l) {
    LayerParams lp;
    lp.d_in = h;
    lp.d_head = (l == hp.layers - 1) ? h : h / hp.heads;
    const int a_len = is_dynamic(hp.variant) ? lp.d_head : 2 * lp.d_head;
    lp.W_l.resize(static_cast<std::size_t>(n_slots));
    lp.W_r.resize(static_cast<std::size_t>(n_slots));
    lp.a.resize(static_cast<std::size_t>(n_slots));
    for (int s = 0; s < n_slots; ++s) {
      for (int head = 0; head < hp.heads; ++head) {
        lp.W_l[static_cast<std::size_t>(s)].push_back(model_detail::glorot(lp.d_head, lp.d_in, rng));
        lp.W_r[static_cast<std::size_t>(s)].push_back(model_detail::glorot(lp.d_head, lp.d_in, rng));
        lp.a[static_cast<std::size_t>(s)].push_back(model_detail::glorot(a_len, 1, rng));
      }
    }
    p.layers.push_back(std::move(lp));
  }
  p.mlp_w1 = model_detail::glorot(h, h, rng);
  p.mlp_b1 = Matrix(1, h);
  p.mlp_w2 = model_detail::glorot(kNumClasses, h, rng);
  p.mlp_b2 = Matrix(1, kNumClasses);
  return p;
}

// ---------------------------------------------------------------------------
// Edge bookkeeping
// ---------------------------------------------------------------------------

// Message-passing edges grouped by type (canonical type order). The merged
// destination list drives the joint softmax over all incident edges.
struct EdgeGroups {
  int n_nodes = 0;
  std::array<std::vector<int>, kNumEdgeTypes> src;
  std::array<std::vector<int>, kNumEdgeTypes> dst;
  std::vector<int> dst_all;

  int total_edges() const { return static_cast<int>(dst_all.size()); }
};

inline EdgeGroups build_edge_groups(const std::vector<Edge>& mp_edges, int n_nodes) {
  EdgeGroups eg;
  eg.n_nodes = n_nodes;
  for (const auto& e : mp_edges) {
    const int t = static_cast<int>(e.type);
    eg.src[static_cast<std::size_t>(t)].push_back(e.src);
    eg.dst[static_cast<std::size_t>(t)].push_back(e.dst);
  }
  std::vector<char> has_in(static_cast<std::size_t>(n_nodes), 0);
  for (int t = 0; t < kNumEdgeTypes; ++t)
    for (int v : eg.dst[static_cast<std::size_t>(t)]) {
      eg.dst_all.push_back(v);
      has_in[static_cast<std::size_t>(v)] = 1;
    }
  for (int v = 0; v < n_nodes; ++v)
    if (!has_in[static_cast<std::size_t>(v)])
      throw IsolatedNode("node " + std::to_string(v) + " has no incoming edge (self-loop missing?)");
  return eg;
}

// ---------------------------------------------------------------------------
// Forward pass on the tape
// ---------------------------------------------------------------------------

struct StagedParams {
  Tape::Var embed_w = -1, embed_b = -1;
  struct StagedLayer {
    std::vector<std::vector<Tape::Var>> W_l, W_r, a;  // [slot][head]
  };
  std::vector<StagedLayer> layers;
  Tape::Var mlp_w1 = -1, mlp_b1 = -1, mlp_w2 = -1, mlp_b2 = -1;
  std::map<std::string, Tape::Var> by_name;
};

inline StagedParams stage_params(Tape& tape, const ModelParams& params) {
  StagedParams sp;
  sp.layers.resize(params.layers.size());
  for (const auto& [name, m] : params.tensors()) sp.by_name[name] = tape.leaf(*m);
  sp.embed_w = sp.by_name.at("embed.w");
  sp.embed_b = sp.by_name.at("embed.b");
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& lp = params.layers[l];
    auto& sl = sp.layers[l];
    sl.W_l.resize(static_cast<std::size_t>(lp.slots()));
    sl.W_r.resize(static_cast<std::size_t>(lp.slots()));
    sl.a.resize(static_cast<std::size_t>(lp.slots()));
    for (int s = 0; s < lp.slots(); ++s) {
      for (int h = 0; h < params.hp.heads; ++h) {
        const std::string base =
            "layer" + std::to_string(l) + ".t" + std::to_string(s) + ".h" + std::to_string(h);
        sl.W_l[static_cast<std::size_t>(s)].push_back(sp.by_name.at(base + ".wl"));
        sl.W_r[static_cast<std::size_t>(s)].push_back(sp.by_name.at(base + ".wr"));
        sl.a[static_cast<std::size_t>(s)].push_back(sp.by_name.at(base + ".a"));
      }
    }
  }
  sp.mlp_w1 = sp.by_name.at("mlp.w1");
  sp.mlp_b1 = sp.by_name.at("mlp.b1");
  sp.mlp_w2 = sp.by_name.at("mlp.w2");
  sp.mlp_b2 = sp.by_name.at("mlp.b2");
  return sp;
}

// One attention layer. Scores per head over all in-edges, softmax jointly
// across edge types, type-specific messages, ELU update; heads concatenate
// on hidden layers and average on the last one.
inline Tape::Var layer_forward_tape(Tape& tape, Tape::Var h_in, const EdgeGroups& eg,
                                    const StagedParams::StagedLayer& sl, const Hyperparams& hp,
                                    bool is_eta_layer, bool is_dynamic_layer, bool is_last,
                                    Tape::Var dropout_mask = -1) {
  std::vector<Tape::Var> head_outs;
  for (int head = 0; head < hp.heads; ++head) {
    std::vector<Tape::Var> scores_parts, msg_parts;
    for (int t = 0; t < kNumEdgeTypes; ++t) {
      if (eg.src[static_cast<std::size_t>(t)].empty()) continue;
      const int slot = is_eta_layer ? t : 0;
      const Tape::Var wl = sl.W_l[static_cast<std::size_t>(slot)][static_cast<std::size_t>(head)];
      const Tape::Var wr = sl.W_r[static_cast<std::size_t>(slot)][static_cast<std::size_t>(head)];
      const Tape::Var av = sl.a[static_cast<std::size_t>(slot)][static_cast<std::size_t>(head)];
      const Tape::Var s_nodes = tape.matmul_bt(h_in, wl);
      const Tape::Var t_nodes = tape.matmul_bt(h_in, wr);
      const Tape::Var su = tape.gather_rows(s_nodes, eg.src[static_cast<std::size_t>(t)]);
      const Tape::Var tv = tape.gather_rows(t_nodes, eg.dst[static_cast<std::size_t>(t)]);
      Tape::Var score;
      if (is_dynamic_layer) {
        score = tape.matmul(tape.leaky_relu(tape.add(su, tv), hp.leaky_slope), av);
      } else {
        score = tape.leaky_relu(tape.matmul(tape.concat_cols({su, tv}), av), hp.leaky_slope);
      }
      scores_parts.push_back(score);
      msg_parts.push_back(su);
    }
    const Tape::Var scores = tape.concat_rows(scores_parts);
    Tape::Var alpha = tape.edge_softmax(scores, eg.dst_all, eg.n_nodes);
    if (dropout_mask >= 0) alpha = tape.hadamard(alpha, dropout_mask);
    const Tape::Var messages = tape.concat_rows(msg_parts);
    const Tape::Var weighted = tape.mul_col(messages, alpha);
    const Tape::Var aggregated = tape.scatter_add_rows(weighted, eg.dst_all, eg.n_nodes);
    head_outs.push_back(tape.elu(aggregated));
  }
  if (!is_last) return tape.concat_cols(head_outs);
  Tape::Var acc = head_outs[0];
  for (std::size_t h = 1; h < head_outs.size(); ++h) acc = tape.add(acc, head_outs[h]);
  return tape.scale(acc, 1.0 / hp.heads);
}

// Per-column centering and scaling for the standard 10-column fault
// samples: every attribute column is mapped to roughly [-1, 1] around the
// midpoint of its base range. The external-AS index column centers on the
// mean index of the graph's own AS set, so its baseline is
// topology-independent and transfers across gateway counts. Feature
// matrices of any other width pass through unscaled.
inline Matrix normalize_features(const Matrix& x) {
  if (x.cols != kFeatureDim) return x;
  int n_exas = 0;
  for (int r = 0; r < x.rows; ++r)
    if (x.at(r, static_cast<int>(NodeRole::Exas)) > 0.5) ++n_exas;
  const double exas_mid = (n_exas - 1) / 2.0;
  const double exas_half = std::max(1.0, exas_mid);
  // {ospf weight, local_pref, med, origin, as_path_len, cisco_weight, exas_index}
  const std::array<double, 7> mid{16.5, 100.0, 10.0, 1.0, 3.5, 5.0, exas_mid};
  const std::array<double, 7> half{15.5, 50.0, 10.0, 1.0, 2.5, 5.0, exas_half};
  Matrix out = x;
  for (int r = 0; r < out.rows; ++r)
    for (int a = 0; a < 7; ++a)
      out.at(r, kAttrColBase + a) =
          (x.at(r, kAttrColBase + a) - mid[static_cast<std::size_t>(a)]) / half[static_cast<std::size_t>(a)];
  return out;
}

struct PreparedSample {
  Matrix x;  // normalized features
  EdgeGroups eg;
  int label = -1;  // -1 when unlabeled
};

inline PreparedSample prepare_sample(const GraphSample& sample) {
  PreparedSample out;
  out.x = normalize_features(sample.features);
  out.eg = build_edge_groups(sample.edges, sample.features.rows);
  out.label = sample.label == FaultClass::None ? -1 : fault_label(sample.label);
  return out;
}

inline Tape::Var model_logits(Tape& tape, const StagedParams& sp, const ModelParams& params,
                              const PreparedSample& s, Rng* dropout_rng = nullptr) {
  const Hyperparams& hp = params.hp;
  Tape::Var h = tape.add_row(tape.matmul_bt(tape.leaf(s.x), sp.embed_w), sp.embed_b);
  for (int l = 0; l < hp.layers; ++l) {
    Tape::Var mask = -1;
    if (dropout_rng != nullptr && hp.dropout_rate > 0.0) {
      Matrix m(s.eg.total_edges(), 1);
      const double keep = 1.0 - hp.dropout_rate;
      for (double& v : m.data) v = dropout_rng->bernoulli(keep) ? 1.0 / keep : 0.0;
      mask = tape.leaf(std::move(m));
    }
    h = layer_forward_tape(tape, h, s.eg, sp.layers[static_cast<std::size_t>(l)], hp,
                           is_eta(hp.variant), is_dynamic(hp.variant), l == hp.layers - 1, mask);
  }
  const Tape::Var z = tape.mean_rows(h);
  const Tape::Var h1 = tape.elu(tape.add_row(tape.matmul_bt(z, sp.mlp_w1), sp.mlp_b1));
  return tape.add_row(tape.matmul_bt(h1, sp.mlp_w2), sp.mlp_b2);
}

// Mean pooling, MLP head, softmax: class probabilities for final embeddings.
inline Matrix readout_and_classify(const Matrix& h_final, const ModelParams& params) {
  Tape tape;
  const StagedParams sp = stage_params(tape, params);
  const Tape::Var z = tape.mean_rows(tape.leaf(h_final));
  const Tape::Var h1 = tape.elu(tape.add_row(tape.matmul_bt(z, sp.mlp_w1), sp.mlp_b1));
  const Tape::Var logits = tape.add_row(tape.matmul_bt(h1, sp.mlp_w2), sp.mlp_b2);
  return tape.value(tape.softmax_row(logits));
}

// Forward pass without gradient bookkeeping beyond the tape itself: class
// probabilities for one sample.
inline Matrix predict_proba(const ModelParams& params, const PreparedSample& s) {
  Tape tape;
  const StagedParams sp = stage_params(tape, params);
  const Tape::Var logits = model_logits(tape, sp, params, s);
  return tape.value(tape.softmax_row(logits));
}

inline int argmax_row(const Matrix& row) {
  int best = 0;
  for (int c = 1; c < row.cols; ++c)
    if (row.data[static_cast<std::size_t>(c)] > row.data[static_cast<std::size_t>(best)]) best = c;
  return best;
}

// ---------------------------------------------------------------------------
// Loss and gradients
// ---------------------------------------------------------------------------

using GradMap = std::map<std::string, Matrix>;

struct LossResult {
  double loss = 0.0;
  GradMap grads;
  std::vector<int> predictions;  // argmax per batch member
};

// Mean cross-entropy over the batch with exact reverse-mode gradients for
// every parameter tensor.
inline LossResult loss_and_grads(const ModelParams& params,
                                 const std::vector<const PreparedSample*>& batch,
                                 Rng* dropout_rng = nullptr) {
  if (batch.empty()) throw Error("empty batch");
  Tape tape;
  const StagedParams sp = stage_params(tape, params);
  std::vector<Tape::Var> losses;
  LossResult out;
  for (const PreparedSample* s : batch) {
    if (s->label < 0) throw Error("unlabeled sample in training batch");
    const Tape::Var logits = model_logits(tape, sp, params, *s, dropout_rng);
    out.predictions.push_back(argmax_row(tape.value(logits)));
    losses.push_back(tape.cross_entropy_logits(logits, s->label));
  }
  Tape::Var total = losses[0];
  for (std::size_t i = 1; i < losses.size(); ++i) total = tape.add(total, losses[i]);
  total = tape.scale(total, 1.0 / static_cast<double>(losses.size()));
  out.loss = tape.value(total).data[0];
  if (!std::isfinite(out.loss)) throw NonFiniteLoss("loss is not finite");
  tape.backward(total);
  for (const auto& [name, var] : sp.by_name) out.grads[name] = tape.grad(var);
  return out;
}

}  // namespace netdiag
