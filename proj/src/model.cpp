#include "introsumm/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "introsumm/rouge.hpp"
#include "introsumm/summarize.hpp"
#include "json.hpp"

namespace introsumm {

using nlohmann::json;

namespace {
constexpr double kProbEps = 1e-7;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

std::string to_string(ModelMode mode) {
  switch (mode) {
    case ModelMode::tstr: return "tstr";
    case ModelMode::ext: return "ext";
    case ModelMode::noguide: return "noguide";
  }
  return "tstr";
}

ModelMode model_mode_from_string(const std::string& s) {
  if (s == "tstr") return ModelMode::tstr;
  if (s == "ext") return ModelMode::ext;
  if (s == "noguide") return ModelMode::noguide;
  throw std::invalid_argument("unknown model mode: " + s);
}

ModelParams init_model(ModelMode mode, int dim, int k, double alpha, Rng& rng) {
  if (k < 1) throw std::invalid_argument("init_model: k must be >= 1");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("init_model: alpha outside [0,1]");
  ModelParams p;
  p.mode = mode;
  p.dim = dim;
  p.k = k;
  p.alpha = alpha;
  p.source_encoder = init_encoder(dim, rng);
  p.intro_encoder = init_encoder(dim, rng);
  const double head_bound = std::sqrt(6.0 / (dim + 1));
  p.intro_head_w.resize(dim);
  p.source_head_w.resize(dim);
  p.fusion_w.resize(dim);
  for (double& v : p.intro_head_w) v = rng.next_uniform(-head_bound, head_bound);
  for (double& v : p.source_head_w) v = rng.next_uniform(-head_bound, head_bound);
  p.mlp1_w = Matrix(dim, k * dim);
  const double b1 = std::sqrt(6.0 / (k * dim + dim));
  for (double& v : p.mlp1_w.data) v = rng.next_uniform(-b1, b1);
  p.mlp1_b.assign(dim, 0.0);
  p.mlp2_w = Matrix(dim, 2 * dim);
  const double b2 = std::sqrt(6.0 / (2 * dim + dim));
  for (double& v : p.mlp2_w.data) v = rng.next_uniform(-b2, b2);
  p.mlp2_b.assign(dim, 0.0);
  for (double& v : p.fusion_w) v = rng.next_uniform(-head_bound, head_bound);
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z = params;
  for_each_tensor(z, [](const std::string&, double* data, std::size_t len) {
    std::fill(data, data + len, 0.0);
  });
  // LN gains were zeroed with everything else; that is what a gradient
  // container wants.
  return z;
}

void for_each_tensor(ModelParams& params, const ParamVisitor& fn) {
  for_each_tensor(params.source_encoder, "src.", fn);
  for_each_tensor(params.intro_encoder, "intro.", fn);
  fn("intro_head_w", params.intro_head_w.data(), params.intro_head_w.size());
  fn("intro_head_b", &params.intro_head_b, 1);
  fn("source_head_w", params.source_head_w.data(), params.source_head_w.size());
  fn("source_head_b", &params.source_head_b, 1);
  fn("mlp1_w", params.mlp1_w.data.data(), params.mlp1_w.data.size());
  fn("mlp1_b", params.mlp1_b.data(), params.mlp1_b.size());
  fn("mlp2_w", params.mlp2_w.data.data(), params.mlp2_w.data.size());
  fn("mlp2_b", params.mlp2_b.data(), params.mlp2_b.size());
  fn("fusion_w", params.fusion_w.data(), params.fusion_w.size());
  fn("fusion_b", &params.fusion_b, 1);
}

void forward_intro(const ModelParams& params, const Matrix& intro_vectors, Matrix& h_tilde,
                   std::vector<double>& p_tilde) {
  h_tilde = encode(params.intro_encoder, intro_vectors);
  p_tilde.resize(h_tilde.rows);
  for (int i = 0; i < h_tilde.rows; ++i) {
    double logit = params.intro_head_b;
    const double* hr = h_tilde.row(i);
    for (int j = 0; j < h_tilde.cols; ++j) logit += params.intro_head_w[j] * hr[j];
    p_tilde[i] = sigmoid(logit);
    if (!std::isfinite(p_tilde[i])) throw std::runtime_error("forward_intro: non-finite activation");
  }
}

std::vector<int> select_topk(const std::vector<double>& p_tilde, int k) {
  if (k < 1) throw std::invalid_argument("select_topk: k must be >= 1");
  std::vector<int> order(p_tilde.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return p_tilde[a] > p_tilde[b];  // stable keeps smaller index first on ties
  });
  if (static_cast<int>(order.size()) > k) order.resize(k);
  return order;
}

Matrix gather_topk(const Matrix& h_tilde, const std::vector<int>& indices, int k) {
  Matrix out(k, h_tilde.cols);  // zero rows pad when fewer than k survive
  for (std::size_t r = 0; r < indices.size(); ++r)
    std::copy(h_tilde.row(indices[r]), h_tilde.row(indices[r]) + h_tilde.cols,
              out.row(static_cast<int>(r)));
  return out;
}

namespace {

std::vector<double> mlp1_pool(const ModelParams& params, const Matrix& h_top) {
  // vec(h_top) is rows concatenated in selection order.
  std::vector<double> h_hat(params.dim, 0.0);
  for (int o = 0; o < params.dim; ++o) {
    double acc = params.mlp1_b[o];
    const double* wrow = params.mlp1_w.row(o);
    for (std::size_t i = 0; i < h_top.data.size(); ++i) acc += wrow[i] * h_top.data[i];
    h_hat[o] = std::tanh(acc);
  }
  return h_hat;
}

}  // namespace

std::vector<double> fuse_and_score(const ModelParams& params, const Matrix& h,
                                   const Matrix& h_top, bool guided) {
  if (h_top.rows != params.k) throw std::invalid_argument("fuse_and_score: h_top must have k rows");
  std::vector<double> h_hat(params.dim, 0.0);
  if (guided) h_hat = mlp1_pool(params, h_top);
  Matrix r(h.rows, params.dim);
  std::vector<double> probs(h.rows, 0.0);
  const int d = params.dim;
  for (int i = 0; i < h.rows; ++i) {
    const double* hr = h.row(i);
    double* rr = r.row(i);
    double logit = params.fusion_b;
    for (int o = 0; o < d; ++o) {
      double acc = params.mlp2_b[o];
      const double* wrow = params.mlp2_w.row(o);
      for (int j = 0; j < d; ++j) acc += wrow[j] * hr[j];
      for (int j = 0; j < d; ++j) acc += wrow[d + j] * h_hat[j];
      rr[o] = std::tanh(acc);
      logit += params.fusion_w[o] * rr[o];
    }
    probs[i] = sigmoid(logit);
  }
  return probs;
}

double bce_mean(const std::vector<double>& probs, const std::vector<double>& labels) {
  if (probs.size() != labels.size())
    throw std::invalid_argument("bce_mean: probabilities/labels length mismatch");
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kProbEps, 1.0 - kProbEps);
    sum += -(labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p));
  }
  return sum / static_cast<double>(probs.size());
}

LossParts joint_loss(const std::vector<double>& probs, const std::vector<double>& labels,
                     const std::vector<double>& intro_probs,
                     const std::vector<double>& intro_labels, double alpha) {
  LossParts parts;
  parts.l_t1 = bce_mean(probs, labels);
  parts.l_t2 = bce_mean(intro_probs, intro_labels);
  parts.total = alpha * parts.l_t1 + (1.0 - alpha) * parts.l_t2;
  return parts;
}

ForwardTrace model_forward(const ModelParams& params, const Matrix& x_src, const Matrix& x_intro) {
  ForwardTrace t;
  t.x_src = x_src;
  t.src_enc = encode_traced(params.source_encoder, x_src);
  const Matrix& h = t.src_enc.y2;
  const int n = h.rows;
  const int d = params.dim;
  if (params.mode == ModelMode::ext) {
    t.probs.resize(n);
    for (int i = 0; i < n; ++i) {
      double logit = params.source_head_b;
      const double* hr = h.row(i);
      for (int j = 0; j < d; ++j) logit += params.source_head_w[j] * hr[j];
      t.probs[i] = sigmoid(logit);
    }
    return t;
  }
  t.x_intro = x_intro;
  t.intro_enc = encode_traced(params.intro_encoder, x_intro);
  const Matrix& h_tilde = t.intro_enc.y2;
  t.intro_probs.resize(h_tilde.rows);
  for (int i = 0; i < h_tilde.rows; ++i) {
    double logit = params.intro_head_b;
    const double* hr = h_tilde.row(i);
    for (int j = 0; j < d; ++j) logit += params.intro_head_w[j] * hr[j];
    t.intro_probs[i] = sigmoid(logit);
  }
  t.topk = select_topk(t.intro_probs, params.k);
  t.h_top = gather_topk(h_tilde, t.topk, params.k);
  const bool guided = params.mode != ModelMode::noguide;
  t.h_hat.assign(d, 0.0);
  if (guided) t.h_hat = mlp1_pool(params, t.h_top);
  t.r = Matrix(n, d);
  t.probs.resize(n);
  for (int i = 0; i < n; ++i) {
    const double* hr = h.row(i);
    double* rr = t.r.row(i);
    double logit = params.fusion_b;
    for (int o = 0; o < d; ++o) {
      double acc = params.mlp2_b[o];
      const double* wrow = params.mlp2_w.row(o);
      for (int j = 0; j < d; ++j) acc += wrow[j] * hr[j];
      for (int j = 0; j < d; ++j) acc += wrow[d + j] * t.h_hat[j];
      rr[o] = std::tanh(acc);
      logit += params.fusion_w[o] * rr[o];
    }
    t.probs[i] = sigmoid(logit);
    if (!std::isfinite(t.probs[i])) throw std::runtime_error("model_forward: non-finite activation");
  }
  return t;
}

LossParts trace_loss(const ModelParams& params, const ForwardTrace& trace,
                     const std::vector<double>& labels, const std::vector<double>& intro_labels) {
  if (params.mode == ModelMode::ext) {
    LossParts parts;
    parts.l_t1 = bce_mean(trace.probs, labels);
    parts.total = parts.l_t1;
    return parts;
  }
  return joint_loss(trace.probs, labels, trace.intro_probs, intro_labels, params.alpha);
}

ModelParams model_backward(const ModelParams& params, const ForwardTrace& trace,
                           const std::vector<double>& labels,
                           const std::vector<double>& intro_labels, double scale) {
  ModelParams grads = zeros_like(params);
  const int d = params.dim;
  const Matrix& h = trace.src_enc.y2;
  const int n = h.rows;
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("model_backward: label length mismatch");

  if (params.mode == ModelMode::ext) {
    Matrix d_h(n, d);
    for (int i = 0; i < n; ++i) {
      const double d_logit = scale * (trace.probs[i] - labels[i]) / n;
      grads.source_head_b += d_logit;
      const double* hr = h.row(i);
      double* dhr = d_h.row(i);
      for (int j = 0; j < d; ++j) {
        grads.source_head_w[j] += d_logit * hr[j];
        dhr[j] = d_logit * params.source_head_w[j];
      }
    }
    encoder_backward(params.source_encoder, trace.src_enc, d_h, grads.source_encoder);
    return grads;
  }

  const Matrix& h_tilde = trace.intro_enc.y2;
  const int m = h_tilde.rows;
  if (static_cast<int>(intro_labels.size()) != m)
    throw std::invalid_argument("model_backward: intro label length mismatch");
  const bool guided = params.mode != ModelMode::noguide;

  // Fusion head and MLP_2, accumulating into dL/dh and dL/dĥ.
  Matrix d_h(n, d);
  std::vector<double> d_h_hat(d, 0.0);
  for (int i = 0; i < n; ++i) {
    const double d_logit = scale * params.alpha * (trace.probs[i] - labels[i]) / n;
    grads.fusion_b += d_logit;
    const double* rr = trace.r.row(i);
    const double* hr = h.row(i);
    double* dhr = d_h.row(i);
    for (int o = 0; o < d; ++o) {
      grads.fusion_w[o] += d_logit * rr[o];
      const double d_pre = d_logit * params.fusion_w[o] * (1.0 - rr[o] * rr[o]);
      grads.mlp2_b[o] += d_pre;
      double* gw = grads.mlp2_w.row(o);
      const double* wrow = params.mlp2_w.row(o);
      for (int j = 0; j < d; ++j) {
        gw[j] += d_pre * hr[j];
        dhr[j] += d_pre * wrow[j];
      }
      for (int j = 0; j < d; ++j) {
        gw[d + j] += d_pre * trace.h_hat[j];
        d_h_hat[j] += d_pre * wrow[d + j];
      }
    }
  }

  // MLP_1 pooling; gradients reach only the rows the frozen top-k selected.
  Matrix d_h_tilde(m, d);
  if (guided) {
    std::vector<double> d_vec(static_cast<std::size_t>(params.k) * d, 0.0);
    for (int o = 0; o < d; ++o) {
      const double d_pre = d_h_hat[o] * (1.0 - trace.h_hat[o] * trace.h_hat[o]);
      grads.mlp1_b[o] += d_pre;
      double* gw = grads.mlp1_w.row(o);
      const double* wrow = params.mlp1_w.row(o);
      for (std::size_t j = 0; j < d_vec.size(); ++j) {
        gw[j] += d_pre * trace.h_top.data[j];
        d_vec[j] += d_pre * wrow[j];
      }
    }
    for (std::size_t rrow = 0; rrow < trace.topk.size(); ++rrow) {
      double* dst = d_h_tilde.row(trace.topk[rrow]);
      const double* src = d_vec.data() + rrow * d;
      for (int j = 0; j < d; ++j) dst[j] += src[j];
    }
  }

  // Intro head (task-2 loss).
  for (int i = 0; i < m; ++i) {
    const double d_logit = scale * (1.0 - params.alpha) * (trace.intro_probs[i] - intro_labels[i]) / m;
    grads.intro_head_b += d_logit;
    const double* hr = h_tilde.row(i);
    double* dhr = d_h_tilde.row(i);
    for (int j = 0; j < d; ++j) {
      grads.intro_head_w[j] += d_logit * hr[j];
      dhr[j] += d_logit * params.intro_head_w[j];
    }
  }

  encoder_backward(params.intro_encoder, trace.intro_enc, d_h_tilde, grads.intro_encoder);
  encoder_backward(params.source_encoder, trace.src_enc, d_h, grads.source_encoder);
  return grads;
}

std::vector<double> score_document(const ModelParams& params, const Provider& provider,
                                   const Document& doc) {
  const Matrix x_src = document_matrix(provider, doc);
  Matrix x_intro;
  if (params.mode != ModelMode::ext) x_intro = intro_matrix(provider, doc);
  const ForwardTrace trace = model_forward(params, x_src, x_intro);
  return trace.probs;
}

namespace {

json tensors_to_json(const ModelParams& params) {
  json out = json::object();
  for_each_tensor(const_cast<ModelParams&>(params),
                  [&](const std::string& name, double* data, std::size_t len) {
                    out[name] = std::vector<double>(data, data + len);
                  });
  return out;
}

void tensors_from_json(const json& j, ModelParams& params) {
  for_each_tensor(params, [&](const std::string& name, double* data, std::size_t len) {
    const auto& arr = j.at(name);
    if (arr.size() != len)
      throw std::runtime_error("checkpoint tensor '" + name + "' has wrong length");
    for (std::size_t i = 0; i < len; ++i) data[i] = arr[i].get<double>();
  });
}

}  // namespace

void save_checkpoint(const ModelParams& params, const Provider& provider,
                     const std::string& path) {
  json j;
  j["format"] = "introsumm-checkpoint";
  j["version"] = 1;
  j["mode"] = to_string(params.mode);
  j["dim"] = params.dim;
  j["k"] = params.k;
  j["alpha"] = params.alpha;
  j["provider_fingerprint"] = to_hex(provider.fingerprint());
  j["provider"] = provider.serialize();
  j["tensors"] = tensors_to_json(params);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  json j;
  in >> j;
  if (j.value("format", std::string()) != "introsumm-checkpoint")
    throw std::runtime_error("not an introsumm checkpoint: " + path);
  Checkpoint ckpt;
  ckpt.provider = Provider::deserialize(j.at("provider").get<std::string>());
  const std::string fp = j.at("provider_fingerprint").get<std::string>();
  if (fp != to_hex(ckpt.provider.fingerprint()))
    throw std::runtime_error("checkpoint provider fingerprint mismatch");
  Rng rng(1);
  ckpt.params = init_model(model_mode_from_string(j.at("mode").get<std::string>()),
                           j.at("dim").get<int>(), j.at("k").get<int>(),
                           j.at("alpha").get<double>(), rng);
  tensors_from_json(j.at("tensors"), ckpt.params);
  ckpt.provider_source = "embedded";
  return ckpt;
}

namespace {

struct AdamState {
  std::vector<double> m, v;
};

class AdamOptimizer {
 public:
  AdamOptimizer(double lr) : lr_(lr) {}

  void step(ModelParams& params, ModelParams& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    std::vector<std::pair<double*, std::size_t>> param_slots;
    std::vector<std::pair<double*, std::size_t>> grad_slots;
    for_each_tensor(params, [&](const std::string&, double* d, std::size_t len) {
      param_slots.push_back({d, len});
    });
    for_each_tensor(grads, [&](const std::string&, double* d, std::size_t len) {
      grad_slots.push_back({d, len});
    });
    if (state_.empty()) {
      state_.resize(param_slots.size());
      for (std::size_t i = 0; i < param_slots.size(); ++i) {
        state_[i].m.assign(param_slots[i].second, 0.0);
        state_[i].v.assign(param_slots[i].second, 0.0);
      }
    }
    for (std::size_t s = 0; s < param_slots.size(); ++s) {
      double* p = param_slots[s].first;
      const double* g = grad_slots[s].first;
      AdamState& st = state_[s];
      for (std::size_t i = 0; i < param_slots[s].second; ++i) {
        st.m[i] = beta1_ * st.m[i] + (1.0 - beta1_) * g[i];
        st.v[i] = beta2_ * st.v[i] + (1.0 - beta2_) * g[i] * g[i];
        p[i] -= lr_ * (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + eps_);
      }
    }
  }

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::vector<AdamState> state_;
};

struct TrainItem {
  const Document* doc = nullptr;
  Matrix x_src, x_intro;
  std::vector<double> labels, intro_labels;
};

double validation_rouge2(const ModelParams& params, const Provider& provider,
                         const CorpusSplit& val_split, int budget_words) {
  if (val_split.documents.empty()) return 0.0;
  const int n = static_cast<int>(val_split.documents.size());
  std::vector<double> r2(n, 0.0);
  for_each_index(n, Exec::parallel, [&](int i) {
    const Document& doc = val_split.documents[i];
    try {
      const std::vector<double> scores = score_document(params, provider, doc);
      const Summary summary = trigram_blocked_select(scores, doc, Budget{budget_words});
      TokenSeq cand;
      for (int idx : summary.selected) {
        const auto& toks = doc.sentences[idx].tokens;
        cand.insert(cand.end(), toks.begin(), toks.end());
      }
      r2[i] = rouge_n(cand, flatten_tokens(doc.abstract_sentences), 2).f1;
    } catch (const std::exception&) {
      r2[i] = 0.0;  // a document a degenerate model cannot score counts as zero
    }
  });
  double sum = 0.0;
  for (double v : r2) sum += v;
  return sum / n;
}

}  // namespace

TrainResult train(const CorpusSplit& train_split, const CorpusSplit& val_split,
                  const std::map<std::string, LabelSet>& labels, const Provider& provider,
                  const TrainConfig& config) {
  Rng rng(config.seed);
  TrainResult result;
  ModelParams params = init_model(config.mode, provider.dim(), config.k, config.alpha, rng);

  std::vector<TrainItem> items;
  for (const Document& doc : train_split.documents) {
    auto it = labels.find(doc.id);
    if (it == labels.end()) {
      result.diagnostics.push_back("doc " + doc.id + ": no labels, skipped");
      continue;
    }
    TrainItem item;
    item.doc = &doc;
    item.x_src = document_matrix(provider, doc);
    item.labels.assign(doc.size(), 0.0);
    for (int idx : it->second.intro_positive) item.labels[idx] = 1.0;
    for (int idx : it->second.body_positive) item.labels[idx] = 1.0;
    if (config.mode != ModelMode::ext) {
      item.x_intro = intro_matrix(provider, doc);
      item.intro_labels.assign(doc.intro_indices.size(), 0.0);
      for (std::size_t j = 0; j < doc.intro_indices.size(); ++j)
        if (std::binary_search(it->second.intro_positive.begin(),
                               it->second.intro_positive.end(), doc.intro_indices[j]))
          item.intro_labels[j] = 1.0;
    }
    items.push_back(std::move(item));
  }
  if (items.empty()) {
    result.best = params;
    return result;
  }

  auto validate = [&](int step) {
    const double r2 = validation_rouge2(params, provider, val_split, config.val_budget_words);
    if (result.log.empty() || result.log.back().step != step) {
      TrainLogEntry entry;
      entry.step = step;
      entry.val_r2 = r2;
      result.log.push_back(entry);
    } else {
      result.log.back().val_r2 = r2;
    }
    if (result.best_step < 0 || r2 > result.best_val_r2) {
      result.best_val_r2 = r2;
      result.best = params;
      result.best_step = step;
    }
  };

  result.best_step = -1;
  if (config.max_steps <= 0) {
    result.best = params;
    result.best_step = 0;
    return result;
  }
  validate(0);

  AdamOptimizer optimizer(config.learning_rate);
  std::vector<int> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();  // forces a shuffle on first use
  for (int step = 1; step <= config.max_steps; ++step) {
    if (cursor >= order.size()) {
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.next_int(static_cast<int>(i))]);
      cursor = 0;
    }
    const TrainItem& item = items[order[cursor++]];
    ForwardTrace trace;
    LossParts parts;
    try {
      trace = model_forward(params, item.x_src, item.x_intro);
      parts = trace_loss(params, trace, item.labels, item.intro_labels);
    } catch (const std::exception& e) {
      result.diagnostics.push_back("step " + std::to_string(step) + ": " + e.what() +
                                   "; aborting with last good checkpoint");
      break;
    }
    if (!std::isfinite(parts.total)) {
      result.diagnostics.push_back("step " + std::to_string(step) +
                                   ": non-finite loss; aborting with last good checkpoint");
      break;
    }
    ModelParams grads = model_backward(params, trace, item.labels, item.intro_labels);
    optimizer.step(params, grads);
    TrainLogEntry entry;
    entry.step = step;
    entry.l_t1 = parts.l_t1;
    entry.l_t2 = parts.l_t2;
    entry.total = parts.total;
    result.log.push_back(entry);
    if (step % config.val_interval == 0 || step == config.max_steps) validate(step);
  }
  return result;
}

}  // namespace introsumm
