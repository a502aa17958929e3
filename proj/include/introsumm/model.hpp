#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "introsumm/common.hpp"
#include "introsumm/corpus.hpp"
#include "introsumm/oracle.hpp"
#include "introsumm/represent.hpp"

namespace introsumm {

/// tstr: full intro-guided scorer. ext: source encoder + linear head only
/// (the single-task extractive baseline). noguide: tstr graph with the pooled
/// intro vector forced to zero, the guidance ablation.
enum class ModelMode { tstr, ext, noguide };

std::string to_string(ModelMode mode);
ModelMode model_mode_from_string(const std::string& s);

struct ModelParams {
  ModelMode mode = ModelMode::tstr;
  int dim = 0;
  int k = 5;
  double alpha = 0.5;
  EncoderParams source_encoder;
  EncoderParams intro_encoder;
  std::vector<double> intro_head_w;   // d -> 1
  double intro_head_b = 0.0;
  std::vector<double> source_head_w;  // d -> 1 (ext scoring path)
  double source_head_b = 0.0;
  Matrix mlp1_w;                      // (k·d) -> d
  std::vector<double> mlp1_b;
  Matrix mlp2_w;                      // (2d) -> d
  std::vector<double> mlp2_b;
  std::vector<double> fusion_w;       // d -> 1
  double fusion_b = 0.0;
};

ModelParams init_model(ModelMode mode, int dim, int k, double alpha, Rng& rng);
ModelParams zeros_like(const ModelParams& params);
void for_each_tensor(ModelParams& params, const ParamVisitor& fn);

struct ForwardTrace {
  Matrix x_src, x_intro;
  EncoderTrace src_enc, intro_enc;            // h = src_enc.y2, h̃ = intro_enc.y2
  std::vector<double> intro_probs;            // p̃
  std::vector<int> topk;                      // chosen intro rows, descending p̃
  Matrix h_top;                               // k×d, zero-padded when m < k
  std::vector<double> h_hat;                  // pooled intro vector (tanh output)
  Matrix r;                                   // n×d fused representations
  std::vector<double> probs;                  // p, final extraction probabilities
};

/// Intro branch: encode then sigmoid head.
void forward_intro(const ModelParams& params, const Matrix& intro_vectors, Matrix& h_tilde,
                   std::vector<double>& p_tilde);

/// Rows of h_tilde for the k largest probabilities, ordered by descending
/// probability (ties: smaller row). Pads with zero rows when m < k.
std::vector<int> select_topk(const std::vector<double>& p_tilde, int k);
Matrix gather_topk(const Matrix& h_tilde, const std::vector<int>& indices, int k);

/// Pooling + fusion: ĥ = tanh(W1·vec(h_top)+b1); r_i = tanh(W2·[h_i;ĥ]+b2);
/// p_i = σ(w_z·r_i + b_z). `guided` false zeroes ĥ (ablation).
std::vector<double> fuse_and_score(const ModelParams& params, const Matrix& h,
                                   const Matrix& h_top, bool guided = true);

struct LossParts {
  double total = 0.0;
  double l_t1 = 0.0;
  double l_t2 = 0.0;
};

double bce_mean(const std::vector<double>& probs, const std::vector<double>& labels);

/// total = alpha · l_t1 + (1 − alpha) · l_t2, both mean binary cross-entropy
/// with probabilities clamped to [1e-7, 1 − 1e-7].
LossParts joint_loss(const std::vector<double>& probs, const std::vector<double>& labels,
                     const std::vector<double>& intro_probs,
                     const std::vector<double>& intro_labels, double alpha);

ForwardTrace model_forward(const ModelParams& params, const Matrix& x_src, const Matrix& x_intro);

LossParts trace_loss(const ModelParams& params, const ForwardTrace& trace,
                     const std::vector<double>& labels, const std::vector<double>& intro_labels);

/// Exact gradients of `scale · loss` for every tensor. Top-k indices are
/// frozen as recorded in the trace; gradients flow into the selected rows
/// only.
ModelParams model_backward(const ModelParams& params, const ForwardTrace& trace,
                           const std::vector<double>& labels,
                           const std::vector<double>& intro_labels, double scale = 1.0);

/// Per-sentence extraction scores for a whole document (inference path).
std::vector<double> score_document(const ModelParams& params, const Provider& provider,
                                   const Document& doc);

struct Checkpoint {
  ModelParams params;
  Provider provider;
  std::string provider_source;  // "embedded" or a path for external tables
};

void save_checkpoint(const ModelParams& params, const Provider& provider,
                     const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct TrainConfig {
  ModelMode mode = ModelMode::tstr;
  int k = 5;
  double alpha = 0.5;
  double learning_rate = 2e-3;
  int max_steps = 4000;
  int val_interval = 2000;
  std::uint64_t seed = 13;
  int val_budget_words = 600;
};

struct TrainLogEntry {
  int step = 0;
  double l_t1 = 0.0, l_t2 = 0.0, total = 0.0;
  std::optional<double> val_r2;
};

struct TrainResult {
  ModelParams best;
  std::vector<TrainLogEntry> log;
  double best_val_r2 = 0.0;
  int best_step = 0;
  std::vector<std::string> diagnostics;
};

/// Adam loop, one document per step; validates every `val_interval` steps
/// (plus step 0 and the final step) by generating trigram-blocked summaries
/// on the validation split and scoring ROUGE-2 F1 against the abstracts. The
/// checkpoint with the highest validation ROUGE-2 wins.
TrainResult train(const CorpusSplit& train_split, const CorpusSplit& val_split,
                  const std::map<std::string, LabelSet>& labels, const Provider& provider,
                  const TrainConfig& config);

}  // namespace introsumm
