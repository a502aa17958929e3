#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "introsumm/represent.hpp"
#include "support/grad_check.hpp"
#include "support/reference_impls.hpp"

using namespace introsumm;

namespace {

Document one_section_doc(const std::vector<std::string>& texts) {
  Document doc;
  doc.id = "d";
  Section sec;
  sec.heading = "Introduction";
  sec.begin = 0;
  for (const auto& t : texts) {
    Sentence s;
    s.index = doc.size();
    s.text = t;
    s.tokens = tokenize(t);
    doc.sentences.push_back(s);
  }
  sec.end = doc.size();
  doc.sections = {sec};
  Sentence a;
  a.index = 0;
  a.text = "ref.";
  a.tokens = tokenize(a.text);
  doc.abstract_sentences = {a};
  doc.intro_indices = partition_intro(doc.sections);
  return doc;
}

CorpusSplit one_doc_split(const std::vector<std::string>& texts) {
  CorpusSplit split;
  split.name = "train";
  split.documents = {one_section_doc(texts)};
  return split;
}

}  // namespace

TEST_CASE("tfidf vector matches a hand computation for 'cat cat dog'") {
  // One sentence, two vocabulary words. idf = log(1/1)+1 = 1 for both, so the
  // lexical block before normalization is (2/3, 1/3) at the two hash slots.
  const CorpusSplit split = one_doc_split({"cat cat dog."});
  const Provider provider = fit_tfidf(split, 16);
  const std::vector<double> vec = sentence_vector(provider, split.documents[0], 0);
  REQUIRE(static_cast<int>(vec.size()) == 18);
  const int slot_a = static_cast<int>(fnv1a64(std::string("cat")) % 16);
  const int slot_b = static_cast<int>(fnv1a64(std::string("dog")) % 16);
  REQUIRE(slot_a != slot_b);
  // After lexical L2 normalization: a -> (2/3)/sqrt(4/9+1/9), b -> (1/3)/...
  const double denom = std::sqrt(4.0 / 9.0 + 1.0 / 9.0);
  const double lex_a = (2.0 / 3.0) / denom;
  const double lex_b = (1.0 / 3.0) / denom;
  // Then the full vector [lex, pos1=1, pos2=1] is re-normalized.
  const double full = std::sqrt(lex_a * lex_a + lex_b * lex_b + 1.0 + 1.0);
  CHECK(vec[slot_a] == doctest::Approx(lex_a / full).epsilon(1e-12));
  CHECK(vec[slot_b] == doctest::Approx(lex_b / full).epsilon(1e-12));
  CHECK(vec[slot_a] > vec[slot_b]);  // tf 2/3 dominates
  CHECK(vec[16] == doctest::Approx(1.0 / full));
  CHECK(vec[17] == doctest::Approx(1.0 / full));
}

TEST_CASE("featurization is deterministic; identical sentences share lexical structure") {
  const CorpusSplit split = one_doc_split({"same words here.", "same words here."});
  const Provider provider = fit_tfidf(split, 32);
  const auto v0 = sentence_vector(provider, split.documents[0], 0);
  const auto v0_again = sentence_vector(provider, split.documents[0], 0);
  CHECK(v0 == v0_again);
  // Identical texts at different positions: lexical blocks proportional
  // (positional features change only the overall normalization).
  const auto v1 = sentence_vector(provider, split.documents[0], 1);
  int anchor = 0;
  for (int i = 0; i < 32; ++i)
    if (std::fabs(v0[i]) > std::fabs(v0[anchor])) anchor = i;
  REQUIRE(v0[anchor] != 0.0);
  for (int i = 0; i < 32; ++i)
    CHECK(v0[i] * v1[anchor] == doctest::Approx(v1[i] * v0[anchor]).epsilon(1e-12));
}

TEST_CASE("all-stopword sentence keeps only positional features") {
  const CorpusSplit split = one_doc_split({"it is the and of.", "content words survive."});
  const Provider provider = fit_tfidf(split, 16);
  const auto vec = sentence_vector(provider, split.documents[0], 0);
  for (int i = 0; i < 16; ++i) CHECK(vec[i] == 0.0);
  CHECK(vec[16] > 0.0);
  CHECK(vec[17] > 0.0);
  const double norm = std::sqrt(vec[16] * vec[16] + vec[17] * vec[17]);
  CHECK(norm == doctest::Approx(1.0));
}

TEST_CASE("fit_tfidf with an all-stopword corpus is fatal") {
  CHECK_THROWS(fit_tfidf(one_doc_split({"the of and."}), 8));
}

TEST_CASE("external provider: lookups, missing keys, bit-exact round trip") {
  Provider provider;
  provider.kind = Provider::Kind::external;
  provider.external_dim = 3;
  Rng rng(3);
  for (int i = 0; i < 3; ++i) {
    std::vector<double> v = {rng.next_uniform(-1, 1), rng.next_uniform(-1, 1),
                             rng.next_uniform(-1, 1)};
    provider.table["d\x1f" + std::to_string(i)] = v;
  }
  const std::string path = "test_external_tmp.jsonl";
  save_external(provider, path);
  const Provider loaded = load_external(path);
  std::remove(path.c_str());
  REQUIRE(loaded.external_dim == 3);
  REQUIRE(loaded.table.size() == 3);
  for (const auto& [key, vec] : provider.table) {
    const auto& got = loaded.table.at(key);
    for (int j = 0; j < 3; ++j) CHECK(got[j] == vec[j]);  // bit-exact
  }
  const Document doc = one_section_doc({"x.", "y.", "z.", "w."});
  CHECK_NOTHROW(sentence_vector(loaded, doc, 0));
  CHECK_THROWS_WITH_AS(sentence_vector(loaded, doc, 3),
                       doctest::Contains("index=3"), std::runtime_error);
}

TEST_CASE("encoder attention on a single row is exactly 1") {
  Rng rng(21);
  const EncoderParams params = init_encoder(6, rng);
  Matrix x(1, 6);
  for (double& v : x.data) v = rng.next_uniform(-1, 1);
  const EncoderTrace trace = encode_traced(params, x);
  REQUIRE(trace.attn.rows == 1);
  CHECK(trace.attn(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("attention rows sum to one") {
  Rng rng(22);
  const EncoderParams params = init_encoder(8, rng);
  Matrix x(5, 8);
  for (double& v : x.data) v = rng.next_uniform(-2, 2);
  const EncoderTrace trace = encode_traced(params, x);
  for (int i = 0; i < trace.attn.rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < trace.attn.cols; ++j) sum += trace.attn(i, j);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("encode is permutation-equivariant without positional features") {
  Rng rng(23);
  const EncoderParams params = init_encoder(5, rng);
  Matrix x(3, 5);
  for (double& v : x.data) v = rng.next_uniform(-1, 1);
  const Matrix y = encode(params, x);
  const int perm[3] = {2, 0, 1};
  Matrix xp(3, 5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) xp(i, j) = x(perm[i], j);
  const Matrix yp = encode(params, xp);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(yp(i, j) == doctest::Approx(y(perm[i], j)).epsilon(1e-10));
}

TEST_CASE("zero input with zero offsets yields the layer-norm offsets") {
  EncoderParams params = make_encoder(4);
  Matrix x(3, 4);  // all zeros
  const Matrix y = encode(params, x);
  for (double v : y.data) CHECK(v == doctest::Approx(0.0));
  params.ln2_off = {0.5, -1.0, 2.0, 0.25};
  const Matrix y2 = encode(params, x);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) CHECK(y2(i, j) == doctest::Approx(params.ln2_off[j]));
}

TEST_CASE("encode rejects non-finite input") {
  Rng rng(2);
  const EncoderParams params = init_encoder(4, rng);
  Matrix x(2, 4);
  x(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(encode(params, x));
}

TEST_CASE("encoder gradients match central finite differences") {
  Rng rng(31);
  EncoderParams params = init_encoder(6, rng);
  Matrix x(3, 6);
  for (double& v : x.data) v = rng.next_uniform(-1, 1);
  // Fixed random projection turns the output matrix into a scalar loss.
  Matrix weights(3, 6);
  for (double& v : weights.data) v = rng.next_uniform(-1, 1);
  auto loss = [&]() {
    const Matrix y = encode(params, x);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.data.size(); ++i) acc += y.data[i] * weights.data[i];
    return acc;
  };
  EncoderParams grads = make_encoder(6);
  for (double& v : grads.ln1_gain) v = 0.0;
  for (double& v : grads.ln2_gain) v = 0.0;
  const EncoderTrace trace = encode_traced(params, x);
  encoder_backward(params, trace, weights, grads);
  const auto report = gradcheck::check(params, grads, loss);
  CAPTURE(report.worst_name);
  CHECK(report.max_rel_err < 1e-4);
  CHECK(report.checked > 400);
}
