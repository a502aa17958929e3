#include "introsumm/represent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "introsumm/common.hpp"
#include "json.hpp"

namespace introsumm {

using nlohmann::json;

Rng::Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}

std::uint64_t Rng::next_u64() {
  // splitmix64
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

int Rng::next_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

bool is_stopword(const std::string& token) {
  static const std::set<std::string> kStopwords = {
      "a",    "an",   "the",  "and",   "or",    "but",  "if",    "then",  "than", "that",
      "this", "these", "those", "is",   "are",   "was",  "were",  "be",    "been", "being",
      "am",   "do",   "does", "did",   "have",  "has",  "had",   "i",     "you",  "he",
      "she",  "it",   "we",   "they",  "of",    "in",   "on",    "at",    "by",   "for",
      "with", "to",   "from", "as",    "into",  "about", "not",  "no",    "so",   "such",
      "can",  "could", "will", "would", "may",  "might", "shall", "should", "its", "their",
      "our",  "your", "his",  "her"};
  return kStopwords.count(token) > 0;
}

Provider fit_tfidf(const CorpusSplit& train, int lexical_dims) {
  if (lexical_dims < 1) throw std::invalid_argument("fit_tfidf: lexical_dims must be >= 1");
  Provider provider;
  provider.kind = Provider::Kind::tfidf;
  provider.lexical_dims = lexical_dims;
  std::map<std::string, int> df;
  long total_sentences = 0;
  for (const Document& doc : train.documents) {
    for (const Sentence& sent : doc.sentences) {
      ++total_sentences;
      std::set<std::string> seen;
      for (const std::string& tok : sent.tokens) {
        if (is_stopword(tok)) continue;
        if (seen.insert(tok).second) ++df[tok];
      }
    }
  }
  if (df.empty()) throw std::runtime_error("fit_tfidf: empty vocabulary after stopword filtering");
  for (const auto& [token, count] : df)
    provider.idf[token] = std::log(static_cast<double>(total_sentences) / count) + 1.0;
  return provider;
}

namespace {

std::string external_key(const std::string& id, int index) {
  return id + '\x1f' + std::to_string(index);
}

void l2_normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm <= 0.0) return;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
}

const Section& section_of(const Document& doc, int index) {
  for (const Section& sec : doc.sections)
    if (index >= sec.begin && index < sec.end) return sec;
  throw std::logic_error("sentence index outside all sections");
}

}  // namespace

Provider load_external(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  Provider provider;
  provider.kind = Provider::Kind::external;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object())
      throw std::runtime_error("embedding file line " + std::to_string(lineno) + ": malformed");
    if (rec.contains("_meta")) continue;
    const std::string id = rec.at("id").get<std::string>();
    const int index = rec.at("sentence_index").get<int>();
    std::vector<double> vec = rec.at("vector").get<std::vector<double>>();
    if (provider.external_dim == 0) provider.external_dim = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != provider.external_dim)
      throw std::runtime_error("embedding file line " + std::to_string(lineno) +
                               ": inconsistent vector dimension");
    provider.table[external_key(id, index)] = std::move(vec);
  }
  if (provider.table.empty()) throw std::runtime_error("embedding file is empty: " + path);
  return provider;
}

void save_external(const Provider& provider, const std::string& path) {
  if (provider.kind != Provider::Kind::external)
    throw std::invalid_argument("save_external: provider is not external");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embedding file: " + path);
  // Canonical order for byte-stable files.
  std::vector<std::string> keys;
  keys.reserve(provider.table.size());
  for (const auto& [key, vec] : provider.table) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  for (const std::string& key : keys) {
    const auto sep = key.find('\x1f');
    json rec;
    rec["id"] = key.substr(0, sep);
    rec["sentence_index"] = std::stoi(key.substr(sep + 1));
    rec["vector"] = provider.table.at(key);
    out << rec.dump() << '\n';
  }
}

std::string Provider::serialize() const {
  json j;
  if (kind == Kind::tfidf) {
    j["kind"] = "tfidf";
    j["lexical_dims"] = lexical_dims;
    j["idf"] = idf;  // std::map keeps key order canonical
  } else {
    j["kind"] = "external";
    j["dim"] = external_dim;
    json table_json = json::object();
    std::vector<std::string> keys;
    keys.reserve(table.size());
    for (const auto& [key, vec] : table) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    for (const std::string& key : keys) table_json[key] = table.at(key);
    j["table"] = std::move(table_json);
  }
  return j.dump();
}

Provider Provider::deserialize(const std::string& payload) {
  json j = json::parse(payload);
  Provider provider;
  if (j.at("kind") == "tfidf") {
    provider.kind = Kind::tfidf;
    provider.lexical_dims = j.at("lexical_dims").get<int>();
    provider.idf = j.at("idf").get<std::map<std::string, double>>();
  } else {
    provider.kind = Kind::external;
    provider.external_dim = j.at("dim").get<int>();
    for (const auto& [key, vec] : j.at("table").items())
      provider.table[key] = vec.get<std::vector<double>>();
  }
  return provider;
}

std::uint64_t Provider::fingerprint() const { return fnv1a64(serialize()); }

std::vector<double> sentence_vector(const Provider& provider, const Document& doc, int index) {
  const Sentence& sent = doc.sentences.at(index);
  if (provider.kind == Provider::Kind::external) {
    auto it = provider.table.find(external_key(doc.id, index));
    if (it == provider.table.end())
      throw std::runtime_error("no external embedding for (id=" + doc.id +
                               ", index=" + std::to_string(index) + ")");
    return it->second;
  }
  std::vector<double> vec(provider.lexical_dims + 2, 0.0);
  std::map<std::string, int> counts;
  for (const std::string& tok : sent.tokens)
    if (!is_stopword(tok)) ++counts[tok];
  const double len = static_cast<double>(sent.tokens.size());
  for (const auto& [token, count] : counts) {
    auto it = provider.idf.find(token);
    if (it == provider.idf.end()) continue;  // vocabulary is training-split only
    const int slot = static_cast<int>(fnv1a64(token) % provider.lexical_dims);
    vec[slot] += (count / len) * it->second;
  }
  double norm = 0.0;
  for (int i = 0; i < provider.lexical_dims; ++i) norm += vec[i] * vec[i];
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (int i = 0; i < provider.lexical_dims; ++i) vec[i] /= norm;
  }
  const Section& sec = section_of(doc, index);
  vec[provider.lexical_dims] = static_cast<double>(index + 1) / doc.size();
  vec[provider.lexical_dims + 1] =
      static_cast<double>(index - sec.begin + 1) / (sec.end - sec.begin);
  l2_normalize(vec);
  return vec;
}

Matrix document_matrix(const Provider& provider, const Document& doc) {
  Matrix m(doc.size(), provider.dim());
  for (int i = 0; i < doc.size(); ++i) {
    const std::vector<double> v = sentence_vector(provider, doc, i);
    std::copy(v.begin(), v.end(), m.row(i));
  }
  return m;
}

Matrix intro_matrix(const Provider& provider, const Document& doc) {
  Matrix m(static_cast<int>(doc.intro_indices.size()), provider.dim());
  for (std::size_t r = 0; r < doc.intro_indices.size(); ++r) {
    const std::vector<double> v = sentence_vector(provider, doc, doc.intro_indices[r]);
    std::copy(v.begin(), v.end(), m.row(static_cast<int>(r)));
  }
  return m;
}

EncoderParams make_encoder(int dim) {
  EncoderParams p;
  p.dim = dim;
  p.w_in = Matrix(dim, dim);
  p.b_in.assign(dim, 0.0);
  p.w_q = Matrix(dim, dim);
  p.w_k = Matrix(dim, dim);
  p.w_v = Matrix(dim, dim);
  p.w_o = Matrix(dim, dim);
  p.w_ff1 = Matrix(dim, 4 * dim);
  p.b_ff1.assign(4 * dim, 0.0);
  p.w_ff2 = Matrix(4 * dim, dim);
  p.b_ff2.assign(dim, 0.0);
  p.ln1_gain.assign(dim, 1.0);
  p.ln1_off.assign(dim, 0.0);
  p.ln2_gain.assign(dim, 1.0);
  p.ln2_off.assign(dim, 0.0);
  return p;
}

namespace {

void glorot_fill(Matrix& m, Rng& rng) {
  const double bound = std::sqrt(6.0 / (m.rows + m.cols));
  for (double& v : m.data) v = rng.next_uniform(-bound, bound);
}

}  // namespace

EncoderParams init_encoder(int dim, Rng& rng) {
  EncoderParams p = make_encoder(dim);
  glorot_fill(p.w_in, rng);
  glorot_fill(p.w_q, rng);
  glorot_fill(p.w_k, rng);
  glorot_fill(p.w_v, rng);
  glorot_fill(p.w_o, rng);
  glorot_fill(p.w_ff1, rng);
  glorot_fill(p.w_ff2, rng);
  return p;
}

void for_each_tensor(EncoderParams& params, const std::string& prefix, const ParamVisitor& fn) {
  auto mat = [&](const char* name, Matrix& m) { fn(prefix + name, m.data.data(), m.data.size()); };
  auto vec = [&](const char* name, std::vector<double>& v) { fn(prefix + name, v.data(), v.size()); };
  mat("w_in", params.w_in);
  vec("b_in", params.b_in);
  mat("w_q", params.w_q);
  mat("w_k", params.w_k);
  mat("w_v", params.w_v);
  mat("w_o", params.w_o);
  mat("w_ff1", params.w_ff1);
  vec("b_ff1", params.b_ff1);
  mat("w_ff2", params.w_ff2);
  vec("b_ff2", params.b_ff2);
  vec("ln1_gain", params.ln1_gain);
  vec("ln1_off", params.ln1_off);
  vec("ln2_gain", params.ln2_gain);
  vec("ln2_off", params.ln2_off);
}

namespace {

constexpr double kLnEps = 1e-5;

void softmax_rows(Matrix& m) {
  for (int i = 0; i < m.rows; ++i) {
    double* r = m.row(i);
    double mx = r[0];
    for (int j = 1; j < m.cols; ++j) mx = std::max(mx, r[j]);
    double sum = 0.0;
    for (int j = 0; j < m.cols; ++j) {
      r[j] = std::exp(r[j] - mx);
      sum += r[j];
    }
    for (int j = 0; j < m.cols; ++j) r[j] /= sum;
  }
}

// y = gain ⊙ xhat + off, xhat = (x − mean)/sqrt(var + eps); stores xhat and
// 1/sqrt(var+eps) for the backward pass.
void layernorm_rows(const Matrix& x, const std::vector<double>& gain,
                    const std::vector<double>& off, Matrix& y, Matrix& xhat,
                    std::vector<double>& invstd) {
  const int d = x.cols;
  y = Matrix(x.rows, d);
  xhat = Matrix(x.rows, d);
  invstd.assign(x.rows, 0.0);
  for (int i = 0; i < x.rows; ++i) {
    const double* xr = x.row(i);
    double mean = 0.0;
    for (int j = 0; j < d; ++j) mean += xr[j];
    mean /= d;
    double var = 0.0;
    for (int j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= d;
    const double is = 1.0 / std::sqrt(var + kLnEps);
    invstd[i] = is;
    double* yr = y.row(i);
    double* hr = xhat.row(i);
    for (int j = 0; j < d; ++j) {
      hr[j] = (xr[j] - mean) * is;
      yr[j] = gain[j] * hr[j] + off[j];
    }
  }
}

void layernorm_backward_rows(const Matrix& dy, const Matrix& xhat,
                             const std::vector<double>& invstd, const std::vector<double>& gain,
                             Matrix& dx, std::vector<double>& dgain, std::vector<double>& doff) {
  const int d = dy.cols;
  dx = Matrix(dy.rows, d);
  for (int i = 0; i < dy.rows; ++i) {
    const double* dyr = dy.row(i);
    const double* hr = xhat.row(i);
    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
    for (int j = 0; j < d; ++j) {
      const double dxh = dyr[j] * gain[j];
      mean_dxhat += dxh;
      mean_dxhat_xhat += dxh * hr[j];
    }
    mean_dxhat /= d;
    mean_dxhat_xhat /= d;
    double* dxr = dx.row(i);
    for (int j = 0; j < d; ++j) {
      const double dxh = dyr[j] * gain[j];
      dxr[j] = (dxh - mean_dxhat - hr[j] * mean_dxhat_xhat) * invstd[i];
    }
    for (int j = 0; j < d; ++j) {
      dgain[j] += dyr[j] * hr[j];
      doff[j] += dyr[j];
    }
  }
}

std::vector<double> column_sums(const Matrix& m) {
  std::vector<double> out(m.cols, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    for (int j = 0; j < m.cols; ++j) out[j] += r[j];
  }
  return out;
}

void accumulate(std::vector<double>& dst, const std::vector<double>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void accumulate(Matrix& dst, const Matrix& src) {
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

}  // namespace

EncoderTrace encode_traced(const EncoderParams& params, const Matrix& x) {
  if (x.rows < 1) throw std::invalid_argument("encode: need at least one sentence");
  if (x.cols != params.dim) throw std::invalid_argument("encode: input dimension mismatch");
  if (!all_finite(x)) throw std::runtime_error("encode: non-finite input");
  EncoderTrace t;
  t.x = x;
  t.z = matmul(x, params.w_in);
  add_row_vector(t.z, params.b_in);
  t.q = matmul(t.z, params.w_q);
  t.k = matmul(t.z, params.w_k);
  t.v = matmul(t.z, params.w_v);
  t.attn = matmul_nt(t.q, t.k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(params.dim));
  for (double& s : t.attn.data) s *= scale;
  softmax_rows(t.attn);
  t.ctx = matmul(t.attn, t.v);
  Matrix attn_out = matmul(t.ctx, params.w_o);
  accumulate(attn_out, t.z);  // residual
  layernorm_rows(attn_out, params.ln1_gain, params.ln1_off, t.y1, t.xhat1, t.invstd1);
  Matrix ff = matmul(t.y1, params.w_ff1);
  add_row_vector(ff, params.b_ff1);
  for (double& v : ff.data) v = std::tanh(v);
  t.t_ff = ff;
  Matrix ff_out = matmul(t.t_ff, params.w_ff2);
  add_row_vector(ff_out, params.b_ff2);
  accumulate(ff_out, t.y1);  // residual
  layernorm_rows(ff_out, params.ln2_gain, params.ln2_off, t.y2, t.xhat2, t.invstd2);
  if (!all_finite(t.y2)) throw std::runtime_error("encode: non-finite activation");
  return t;
}

Matrix encode(const EncoderParams& params, const Matrix& x) {
  return encode_traced(params, x).y2;
}

void encoder_backward(const EncoderParams& params, const EncoderTrace& trace, const Matrix& d_out,
                      EncoderParams& grads) {
  // LN2
  Matrix d_res2;
  layernorm_backward_rows(d_out, trace.xhat2, trace.invstd2, params.ln2_gain, d_res2,
                          grads.ln2_gain, grads.ln2_off);
  // FF sublayer: res2 = y1 + tanh(y1·W1 + b1)·W2 + b2
  Matrix d_y1 = d_res2;  // residual branch
  accumulate(grads.w_ff2, matmul_tn(trace.t_ff, d_res2));
  accumulate(grads.b_ff2, column_sums(d_res2));
  Matrix d_act = matmul_nt(d_res2, params.w_ff2);
  for (std::size_t i = 0; i < d_act.data.size(); ++i)
    d_act.data[i] *= 1.0 - trace.t_ff.data[i] * trace.t_ff.data[i];
  accumulate(grads.w_ff1, matmul_tn(trace.y1, d_act));
  accumulate(grads.b_ff1, column_sums(d_act));
  accumulate(d_y1, matmul_nt(d_act, params.w_ff1));
  // LN1
  Matrix d_res1;
  layernorm_backward_rows(d_y1, trace.xhat1, trace.invstd1, params.ln1_gain, d_res1,
                          grads.ln1_gain, grads.ln1_off);
  // Attention sublayer: res1 = z + (attn·v)·Wo
  Matrix d_z = d_res1;  // residual branch
  accumulate(grads.w_o, matmul_tn(trace.ctx, d_res1));
  Matrix d_ctx = matmul_nt(d_res1, params.w_o);
  Matrix d_attn = matmul_nt(d_ctx, trace.v);
  Matrix d_v = matmul_tn(trace.attn, d_ctx);
  // softmax rows
  Matrix d_scores(d_attn.rows, d_attn.cols);
  for (int i = 0; i < d_attn.rows; ++i) {
    const double* ar = trace.attn.row(i);
    const double* dr = d_attn.row(i);
    double dot = 0.0;
    for (int j = 0; j < d_attn.cols; ++j) dot += ar[j] * dr[j];
    double* sr = d_scores.row(i);
    for (int j = 0; j < d_attn.cols; ++j) sr[j] = ar[j] * (dr[j] - dot);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(params.dim));
  for (double& v : d_scores.data) v *= scale;
  Matrix d_q = matmul(d_scores, trace.k);
  Matrix d_k = matmul_tn(d_scores, trace.q);
  accumulate(grads.w_q, matmul_tn(trace.z, d_q));
  accumulate(grads.w_k, matmul_tn(trace.z, d_k));
  accumulate(grads.w_v, matmul_tn(trace.z, d_v));
  accumulate(d_z, matmul_nt(d_q, params.w_q));
  accumulate(d_z, matmul_nt(d_k, params.w_k));
  accumulate(d_z, matmul_nt(d_v, params.w_v));
  // input projection
  accumulate(grads.w_in, matmul_tn(trace.x, d_z));
  accumulate(grads.b_in, column_sums(d_z));
}

}  // namespace introsumm
