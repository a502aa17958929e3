#include "introsumm/evalstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace introsumm {

namespace stats {

namespace {

// Lanczos-style series from the classic betacf/gammln pair.
double log_gamma(double x) {
  static const double cof[6] = {76.18009172947146,  -86.50532032941677, 24.01409824083091,
                                -1.231739572450155, 0.1208650973866179e-2, -0.5395239384953e-5};
  double y = x;
  double tmp = x + 5.5;
  tmp -= (x + 0.5) * std::log(tmp);
  double ser = 1.000000000190015;
  for (int j = 0; j < 6; ++j) ser += cof[j] / ++y;
  return -tmp + std::log(2.5066282746310005 * ser / x);
}

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-14;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                          b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, int dof) {
  if (dof < 1) throw std::invalid_argument("t_two_sided_p: dof must be >= 1");
  if (std::isinf(t)) return 0.0;
  const double nu = static_cast<double>(dof);
  return incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

}  // namespace stats

SystemReport evaluate(const std::vector<Prediction>& predictions, const CorpusSplit& corpus,
                      Exec exec) {
  std::map<std::string, const Document*> by_id;
  for (const Document& doc : corpus.documents) by_id[doc.id] = &doc;
  std::vector<std::string> missing, extra;
  std::set<std::string> predicted;
  for (const Prediction& pred : predictions) {
    predicted.insert(pred.id);
    if (!by_id.count(pred.id)) extra.push_back(pred.id);
  }
  for (const auto& [id, doc] : by_id)
    if (!predicted.count(id)) missing.push_back(id);
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "evaluate: prediction/corpus id mismatch;";
    if (!missing.empty()) msg += " missing: " + join(missing, ",");
    if (!extra.empty()) msg += " extra: " + join(extra, ",");
    throw std::runtime_error(msg);
  }

  const int n = static_cast<int>(predictions.size());
  std::vector<RougeReport> reports(n);
  for_each_index(n, exec, [&](int i) {
    const Prediction& pred = predictions[i];
    const Document& doc = *by_id.at(pred.id);
    TokenSeq cand;
    for (int idx : pred.selected) {
      if (idx < 0 || idx >= doc.size()) continue;  // defect is reported below, serially
      const auto& toks = doc.sentences[idx].tokens;
      cand.insert(cand.end(), toks.begin(), toks.end());
    }
    reports[i] = rouge_report(cand, flatten_tokens(doc.abstract_sentences));
  });
  for (int i = 0; i < n; ++i)
    for (int idx : predictions[i].selected)
      if (idx < 0 || idx >= by_id.at(predictions[i].id)->size())
        throw std::runtime_error("evaluate: prediction for doc " + predictions[i].id +
                                 " selects out-of-range sentence " + std::to_string(idx));

  SystemReport report;
  for (int i = 0; i < n; ++i) report.per_doc[predictions[i].id] = reports[i];
  auto add = [](RougeScore& acc, const RougeScore& s) {
    acc.precision += s.precision;
    acc.recall += s.recall;
    acc.f1 += s.f1;
  };
  for (const auto& [id, r] : report.per_doc) {
    add(report.mean.r1, r.r1);
    add(report.mean.r2, r.r2);
    add(report.mean.rl, r.rl);
    report.mean.mean_f1 += r.mean_f1;
  }
  if (n > 0) {
    auto scale = [n](RougeScore& s) {
      s.precision /= n;
      s.recall /= n;
      s.f1 /= n;
    };
    scale(report.mean.r1);
    scale(report.mean.r2);
    scale(report.mean.rl);
    report.mean.mean_f1 /= n;
  }
  return report;
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                          double level) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: length mismatch");
  const int n = static_cast<int>(a.size());
  if (n < 2) throw std::invalid_argument("paired_t_test: need at least 2 pairs");
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= n;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = (a[i] - b[i]) - mean;
    var += d * d;
  }
  var /= (n - 1);
  TTestResult result;
  result.dof = n - 1;
  result.level = level;
  if (var == 0.0) {
    if (mean == 0.0) {
      result.t_stat = 0.0;
      result.p_value = 1.0;
    } else {
      // Zero variance with nonzero mean: the difference is a constant.
      result.t_stat = mean > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
      result.p_value = 0.0;
    }
  } else {
    result.t_stat = mean / std::sqrt(var / n);
    result.p_value = stats::t_two_sided_p(result.t_stat, result.dof);
  }
  result.significant = result.p_value < level;
  return result;
}

}  // namespace introsumm
