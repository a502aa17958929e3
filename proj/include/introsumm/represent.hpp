#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "introsumm/corpus.hpp"
#include "introsumm/matrix.hpp"

namespace introsumm {

/// Deterministic [0,1) stream; avoids std::uniform_real_distribution so the
/// same seed gives the same floats on any libstdc++.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  double next_unit();                 // [0,1)
  double next_uniform(double lo, double hi);
  int next_int(int n);                // [0,n)
};

/// Sentence-representation provider: a TF-IDF featurizer fit on the training
/// split, or a table of precomputed external embeddings.
struct Provider {
  enum class Kind { tfidf, external };
  Kind kind = Kind::tfidf;

  // tfidf: hashed lexical block of `lexical_dims` plus 2 positional features.
  int lexical_dims = 126;
  std::map<std::string, double> idf;

  // external
  int external_dim = 0;
  std::unordered_map<std::string, std::vector<double>> table;

  int dim() const { return kind == Kind::tfidf ? lexical_dims + 2 : external_dim; }
  std::string serialize() const;
  static Provider deserialize(const std::string& payload);
  std::uint64_t fingerprint() const;
};

Provider fit_tfidf(const CorpusSplit& train, int lexical_dims);
Provider load_external(const std::string& path);
void save_external(const Provider& provider, const std::string& path);

bool is_stopword(const std::string& token);

std::vector<double> sentence_vector(const Provider& provider, const Document& doc, int index);
Matrix document_matrix(const Provider& provider, const Document& doc);  // n×d
Matrix intro_matrix(const Provider& provider, const Document& doc);     // m×d

/// One trainable encoder block: input projection, self-attention over the
/// sentence positions (no masking), position-wise feed-forward, residual
/// connections with layer normalization after each sublayer.
struct EncoderParams {
  int dim = 0;
  Matrix w_in;
  std::vector<double> b_in;
  Matrix w_q, w_k, w_v, w_o;
  Matrix w_ff1;
  std::vector<double> b_ff1;  // d -> 4d
  Matrix w_ff2;
  std::vector<double> b_ff2;  // 4d -> d
  std::vector<double> ln1_gain, ln1_off, ln2_gain, ln2_off;
};

EncoderParams make_encoder(int dim);                 // zero weights, unit LN gains
EncoderParams init_encoder(int dim, Rng& rng);       // Glorot-uniform matrices

using ParamVisitor = std::function<void(const std::string&, double*, std::size_t)>;
void for_each_tensor(EncoderParams& params, const std::string& prefix, const ParamVisitor& fn);

struct EncoderTrace {
  Matrix x, z, q, k, v, attn, ctx;     // attn: n×n softmax rows
  Matrix y1, xhat1, y2, xhat2, t_ff;   // t_ff: n×4d tanh activations
  std::vector<double> invstd1, invstd2;
  const Matrix& output() const { return y2; }
};

EncoderTrace encode_traced(const EncoderParams& params, const Matrix& x);
Matrix encode(const EncoderParams& params, const Matrix& x);

/// Accumulates parameter gradients for dL/d(output) into `grads`.
void encoder_backward(const EncoderParams& params, const EncoderTrace& trace, const Matrix& d_out,
                      EncoderParams& grads);

}  // namespace introsumm
