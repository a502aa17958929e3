#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "introsumm/represent.hpp"
#include "introsumm/summarize.hpp"
#include "support/reference_impls.hpp"

using namespace introsumm;

namespace {

Document doc_of(const std::vector<std::string>& texts) {
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

bool shares_trigram(const Sentence& a, const Sentence& b) {
  auto tris = [](const Sentence& s) {
    std::set<std::string> out;
    for (std::size_t i = 0; i + 2 < s.tokens.size(); ++i)
      out.insert(s.tokens[i] + "|" + s.tokens[i + 1] + "|" + s.tokens[i + 2]);
    return out;
  };
  const auto ta = tris(a);
  for (const auto& t : tris(b))
    if (ta.count(t)) return true;
  return false;
}

}  // namespace

TEST_CASE("identical top sentences: the second is blocked") {
  const Document doc = doc_of({"the same exact sentence here.", "the same exact sentence here.",
                               "something different entirely now."});
  const Summary s = trigram_blocked_select({0.9, 0.8, 0.7}, doc, Budget{100});
  CHECK(s.selected == std::vector<int>{0, 2});
}

TEST_CASE("two-token sentences carry no trigrams and are never blocked") {
  const Document doc = doc_of({"tiny one.", "tiny one.", "tiny one."});
  const Summary s = trigram_blocked_select({0.9, 0.8, 0.7}, doc, Budget{100});
  CHECK(s.selected == std::vector<int>{0, 1, 2});
}

TEST_CASE("greedy walk skips a blocked middle sentence") {
  const Document doc = doc_of({"alpha beta gamma delta.", "alpha beta gamma epsilon.",
                               "fresh words only here."});
  const Summary s = trigram_blocked_select({0.9, 0.8, 0.7}, doc, Budget{100});
  // Sentence 1 shares the trigram (alpha,beta,gamma) with sentence 0.
  CHECK(s.selected == std::vector<int>{0, 2});
}

TEST_CASE("budget semantics") {
  const Document doc = doc_of({"one two three four five.", "six seven eight nine ten.",
                               "eleven twelve thirteen fourteen fifteen."});
  SUBCASE("stops before exceeding the budget") {
    const Summary s = trigram_blocked_select({0.9, 0.8, 0.7}, doc, Budget{10});
    CHECK(s.selected == std::vector<int>{0, 1});
    CHECK(s.word_count == 10);
  }
  SUBCASE("the first sentence is admitted even over budget") {
    const Summary s = trigram_blocked_select({0.9, 0.8, 0.7}, doc, Budget{3});
    CHECK(s.selected == std::vector<int>{0});
    CHECK(s.word_count == 5);
  }
  SUBCASE("selection is rendered in document order") {
    const Summary s = trigram_blocked_select({0.1, 0.2, 0.9}, doc, Budget{10});
    CHECK(s.selected == std::vector<int>{1, 2});
    CHECK(s.text == "six seven eight nine ten. eleven twelve thirteen fourteen fifteen.");
  }
}

TEST_CASE("monotone budget: larger budgets keep earlier selections") {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const Document doc = refimpl::random_document(rng, "m");
    std::vector<double> scores(doc.size());
    for (double& v : scores) v = rng.next_unit();
    std::vector<int> prev;
    for (int budget : {5, 10, 20, 40, 80}) {
      const Summary s = trigram_blocked_select(scores, doc, Budget{budget});
      std::set<int> cur(s.selected.begin(), s.selected.end());
      for (int idx : prev) CHECK(cur.count(idx));
      prev = s.selected;
    }
  }
}

TEST_CASE("no emitted summary contains a shared trigram pair") {
  Rng rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    const Document doc = refimpl::random_document(rng, "t");
    std::vector<double> scores(doc.size());
    for (double& v : scores) v = rng.next_unit();
    const Summary s = trigram_blocked_select(scores, doc, Budget{60});
    for (std::size_t i = 0; i < s.selected.size(); ++i)
      for (std::size_t j = i + 1; j < s.selected.size(); ++j)
        CHECK(!shares_trigram(doc.sentences[s.selected[i]], doc.sentences[s.selected[j]]));
    // Indices strictly increasing.
    for (std::size_t i = 1; i < s.selected.size(); ++i)
      CHECK(s.selected[i] > s.selected[i - 1]);
  }
}

TEST_CASE("lexrank fixtures") {
  SUBCASE("single sentence selects itself") {
    const Document doc = doc_of({"only one sentence."});
    const Summary s = lexrank(doc, Budget{50});
    CHECK(s.selected == std::vector<int>{0});
  }
  SUBCASE("identical pair receives equal, maximal centrality") {
    const Document doc = doc_of({"shared topic words appear.", "shared topic words appear.",
                                 "unrelated isolated content block."});
    const std::vector<double> scores = lexrank_scores(doc);
    CHECK(scores[0] == doctest::Approx(scores[1]).epsilon(1e-12));
    CHECK(scores[0] >= scores[2] - 1e-12);
  }
  SUBCASE("a weighted hub outranks weakly connected sentences") {
    // Sentences 0/1 are identical, 2 half-overlaps them, 3 is isolated; the
    // identical pair carries the most centrality mass.
    const Document doc =
        doc_of({"alpha beta gamma delta.", "alpha beta gamma delta.",
                "alpha beta epsilon zeta.", "unrelated isolated content block."});
    const std::vector<double> scores = lexrank_scores(doc);
    CHECK(scores[0] == doctest::Approx(scores[1]).epsilon(1e-12));
    CHECK(scores[0] > scores[2]);
    CHECK(scores[0] > scores[3]);
  }
  SUBCASE("centrality sums to one") {
    Rng rng(17);
    const Document doc = refimpl::random_document(rng, "l");
    const std::vector<double> scores = lexrank_scores(doc);
    double sum = 0.0;
    for (double v : scores) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("hand power iteration on a 3x3 graph") {
    // Two identical sentences plus one below-threshold outlier: transition
    // matrix rows are [.5,.5,0],[.5,.5,0],[0,0,1]; iterate by hand.
    const Document doc = doc_of({"shared topic words appear.", "shared topic words appear.",
                                 "unrelated isolated content block."});
    std::vector<double> s = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    const double d = 0.85;
    for (int it = 0; it < 300; ++it) {
      std::vector<double> next(3);
      next[0] = (1 - d) / 3 + d * (s[0] * 0.5 + s[1] * 0.5);
      next[1] = (1 - d) / 3 + d * (s[0] * 0.5 + s[1] * 0.5);
      next[2] = (1 - d) / 3 + d * s[2];
      s = next;
    }
    const std::vector<double> scores = lexrank_scores(doc);
    for (int i = 0; i < 3; ++i) CHECK(scores[i] == doctest::Approx(s[i]).epsilon(1e-6));
  }
}

TEST_CASE("lexrank and lsa are deterministic") {
  Rng rng(18);
  const Document doc = refimpl::random_document(rng, "det");
  CHECK(lexrank_scores(doc) == lexrank_scores(doc));
  CHECK(lsa_scores(doc) == lsa_scores(doc));
}

TEST_CASE("jacobi eigensolver reconstructs a random symmetric matrix") {
  Rng rng(19);
  const int n = 8;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a[i][j] = a[j][i] = rng.next_uniform(-1, 1);
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> v;
  detail::symmetric_eigen(a, eigenvalues, v);
  // Descending order.
  for (int t = 1; t < n; ++t) CHECK(eigenvalues[t - 1] >= eigenvalues[t] - 1e-12);
  // V Λ Vᵀ reproduces A; VᵀV = I.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double rec = 0.0, dot = 0.0;
      for (int t = 0; t < n; ++t) {
        rec += v[i][t] * eigenvalues[t] * v[j][t];
        dot += v[t][i] * v[t][j];
      }
      CHECK(rec == doctest::Approx(a[i][j]).epsilon(1e-8));
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("lsa fixtures") {
  SUBCASE("single sentence selects itself") {
    const Document doc = doc_of({"just one."});
    const Summary s = lsa_summarize(doc, Budget{50});
    CHECK(s.selected == std::vector<int>{0});
  }
  SUBCASE("orthogonal sentences score by their term-weight norm") {
    // Closed form: the Gram matrix is diagonal, so each sentence's score is
    // the norm of its log-tf column; more distinct terms wins.
    const Document doc = doc_of({"aa bb cc dd.", "xx yy."});
    const std::vector<double> scores = lsa_scores(doc);
    CHECK(scores[0] == doctest::Approx(std::sqrt(4.0)).epsilon(1e-9));
    CHECK(scores[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(scores[0] > scores[1]);
  }
  SUBCASE("duplicated tokens raise the log-tf weight") {
    const Document doc = doc_of({"aa aa aa.", "bb."});
    const std::vector<double> scores = lsa_scores(doc);
    CHECK(scores[0] == doctest::Approx(1.0 + std::log(3.0)).epsilon(1e-9));
    CHECK(scores[1] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("summarize_split applies the scorer per document") {
  Rng rng(20);
  CorpusSplit split;
  split.name = "test";
  for (int i = 0; i < 6; ++i)
    split.documents.push_back(refimpl::random_document(rng, "s-" + std::to_string(i)));
  auto scorer = [](const Document& doc) {
    std::vector<double> s(doc.size());
    for (int i = 0; i < doc.size(); ++i) s[i] = 1.0 / (1 + i);
    return s;
  };
  const auto serial = summarize_split(split, scorer, Budget{30}, Exec::serial);
  const auto parallel = summarize_split(split, scorer, Budget{30}, Exec::parallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].selected == parallel[i].selected);
    CHECK(serial[i].text == parallel[i].text);
  }
}
