#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "introsumm/evalstat.hpp"
#include "introsumm/represent.hpp"
#include "support/reference_impls.hpp"

using namespace introsumm;

namespace {

CorpusSplit tiny_split(int docs, std::uint64_t seed) {
  Rng rng(seed);
  CorpusSplit split;
  split.name = "test";
  for (int i = 0; i < docs; ++i)
    split.documents.push_back(refimpl::random_document(rng, "e-" + std::to_string(i)));
  return split;
}

Prediction full_abstract_copy(const Document& doc) {
  // A prediction that reproduces the abstract needs sentences whose tokens
  // match; random_document plants abstract copies in half the sentences, so
  // instead evaluate with the abstract rendered as the only "sentence".
  Prediction pred;
  pred.id = doc.id;
  for (int i = 0; i < doc.size(); ++i) pred.selected.push_back(i);
  return pred;
}

}  // namespace

TEST_CASE("evaluate: predictions identical to abstracts give mean F1 of 1") {
  CorpusSplit split;
  split.name = "test";
  Rng rng(3);
  // Build documents whose first sentence IS the abstract text.
  for (int i = 0; i < 3; ++i) {
    Document doc = refimpl::random_document(rng, "x-" + std::to_string(i));
    std::string abs_text;
    for (const auto& s : doc.abstract_sentences) abs_text += s.text + " ";
    doc.sentences[0].text = abs_text;
    doc.sentences[0].tokens = tokenize(abs_text);
    split.documents.push_back(doc);
  }
  std::vector<Prediction> preds;
  for (const Document& doc : split.documents) {
    Prediction p;
    p.id = doc.id;
    p.selected = {0};
    preds.push_back(p);
  }
  const SystemReport report = evaluate(preds, split);
  CHECK(report.mean.mean_f1 == doctest::Approx(1.0));
}

TEST_CASE("evaluate: empty predictions give all zeros") {
  const CorpusSplit split = tiny_split(2, 4);
  std::vector<Prediction> preds;
  for (const Document& doc : split.documents) {
    Prediction p;
    p.id = doc.id;
    preds.push_back(p);
  }
  const SystemReport report = evaluate(preds, split);
  CHECK(report.mean.mean_f1 == doctest::Approx(0.0));
  CHECK(report.mean.r1.f1 == doctest::Approx(0.0));
}

TEST_CASE("evaluate: corpus mean is the average of per-document reports") {
  const CorpusSplit split = tiny_split(2, 5);
  std::vector<Prediction> preds;
  for (const Document& doc : split.documents) preds.push_back(full_abstract_copy(doc));
  const SystemReport report = evaluate(preds, split);
  REQUIRE(report.per_doc.size() == 2);
  double sum_mean = 0.0, sum_r2 = 0.0;
  for (const auto& [id, r] : report.per_doc) {
    sum_mean += r.mean_f1;
    sum_r2 += r.r2.f1;
  }
  CHECK(report.mean.mean_f1 == doctest::Approx(sum_mean / 2).epsilon(1e-12));
  CHECK(report.mean.r2.f1 == doctest::Approx(sum_r2 / 2).epsilon(1e-12));
}

TEST_CASE("evaluate: missing and extra ids are fatal and named") {
  const CorpusSplit split = tiny_split(2, 6);
  std::vector<Prediction> preds;
  Prediction p;
  p.id = split.documents[0].id;
  preds.push_back(p);
  Prediction stranger;
  stranger.id = "not-in-corpus";
  preds.push_back(stranger);
  CHECK_THROWS_WITH_AS(evaluate(preds, split), doctest::Contains("not-in-corpus"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(evaluate(preds, split),
                       doctest::Contains(split.documents[1].id.c_str()), std::runtime_error);
}

TEST_CASE("paired t-test fixtures") {
  SUBCASE("identical systems: t = 0, p = 1") {
    const std::vector<double> a = {0.4, 0.6, 0.5, 0.7};
    const TTestResult r = paired_t_test(a, a);
    CHECK(r.t_stat == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
    CHECK(!r.significant);
  }
  SUBCASE("dof-2 closed form: diffs {1,2,3}") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    const std::vector<double> b = {0.0, 0.0, 0.0};
    const TTestResult r = paired_t_test(a, b);
    CHECK(r.dof == 2);
    CHECK(r.t_stat == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-9));
    // Closed form at dof 2: p = 1 − t/sqrt(t² + 2).
    const double t = 2.0 * std::sqrt(3.0);
    CHECK(r.p_value == doctest::Approx(1.0 - t / std::sqrt(t * t + 2.0)).epsilon(1e-9));
    CHECK(r.p_value == doctest::Approx(0.0742).epsilon(1e-2));
    CHECK(!r.significant);  // 0.0742 > 0.05
  }
  SUBCASE("sign flip mirrors t and keeps p") {
    const std::vector<double> a = {1.0, 2.0, 3.5, 0.5};
    const std::vector<double> b = {0.2, 1.1, 2.0, 0.9};
    const TTestResult ab = paired_t_test(a, b);
    const TTestResult ba = paired_t_test(b, a);
    CHECK(ab.t_stat == doctest::Approx(-ba.t_stat));
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
  }
  SUBCASE("zero variance, nonzero mean: significant with p -> 0") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    const std::vector<double> b = {0.5, 1.5, 2.5};
    const TTestResult r = paired_t_test(a, b);
    CHECK(r.p_value == doctest::Approx(0.0));
    CHECK(r.significant);
    CHECK(std::isinf(r.t_stat));
  }
  SUBCASE("degenerate inputs are rejected") {
    CHECK_THROWS(paired_t_test({1.0}, {2.0}));
    CHECK_THROWS(paired_t_test({1.0, 2.0}, {1.0}));
  }
}

TEST_CASE("p-value decreases monotonically with a growing positive shift") {
  Rng rng(7);
  std::vector<double> a(10), b(10);
  for (int i = 0; i < 10; ++i) {
    b[i] = rng.next_unit();
    a[i] = b[i] + 0.05 + 0.02 * rng.next_unit();  // positive mean difference
  }
  double prev_p = 1.1;
  for (double shift = 0.0; shift < 0.5; shift += 0.05) {
    std::vector<double> shifted = a;
    for (double& v : shifted) v += shift;
    const TTestResult r = paired_t_test(shifted, b);
    CHECK(r.p_value < prev_p);
    prev_p = r.p_value;
  }
}

TEST_CASE("incomplete beta agrees with Simpson quadrature") {
  // Independent oracle: integrate x^(a-1) (1-x)^(b-1) / B(a,b) numerically.
  auto quadrature = [](double a, double b, double x) {
    const int steps = 20000;
    auto f = [&](double u) {
      if (u <= 0.0 || u >= 1.0) return 0.0;
      return std::pow(u, a - 1.0) * std::pow(1.0 - u, b - 1.0);
    };
    const double h = x / steps;
    double acc = f(0.0) + f(x);
    for (int i = 1; i < steps; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
    const double integral = acc * h / 3.0;
    const double whole = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    return integral / whole;
  };
  // Integrands with a,b >= 1 only: Simpson cannot absorb the endpoint
  // singularities of smaller parameters (the dof-1 fixture covers those).
  for (const auto& [a, b, x] : std::vector<std::tuple<double, double, double>>{
           {1.0, 0.5, 0.142857}, {2.5, 1.5, 0.3}, {5.0, 5.0, 0.5}, {3.0, 2.0, 0.7}}) {
    CHECK(stats::incomplete_beta(a, b, x) == doctest::Approx(quadrature(a, b, x)).epsilon(1e-5));
  }
  CHECK(stats::incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(stats::incomplete_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("two-sided t tail matches the dof-1 Cauchy closed form") {
  // dof 1: p = 1 − (2/π)·atan(|t|).
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const double expect = 1.0 - 2.0 / M_PI * std::atan(t);
    CHECK(stats::t_two_sided_p(t, 1) == doctest::Approx(expect).epsilon(1e-9));
  }
}
