#include "introsumm/rouge.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace introsumm {

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  if (denom <= 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

namespace {

// n-gram key: tokens joined by an unprintable separator.
std::unordered_map<std::string, int> ngram_counts(const TokenSeq& tokens, int n) {
  std::unordered_map<std::string, int> counts;
  const int total = static_cast<int>(tokens.size()) - n + 1;
  for (int i = 0; i < total; ++i) {
    std::string key = tokens[i];
    for (int j = 1; j < n; ++j) {
      key += '\x1f';
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

RougeScore rouge_n(const TokenSeq& candidate, const TokenSeq& reference, int n) {
  if (n < 1) throw std::invalid_argument("rouge_n: order must be >= 1");
  const long cand_total = static_cast<long>(candidate.size()) - n + 1;
  const long ref_total = static_cast<long>(reference.size()) - n + 1;
  RougeScore score;
  if (cand_total <= 0 || ref_total <= 0) return score;
  const auto cand_counts = ngram_counts(candidate, n);
  const auto ref_counts = ngram_counts(reference, n);
  long common = 0;
  for (const auto& [key, count] : cand_counts) {
    auto it = ref_counts.find(key);
    if (it != ref_counts.end()) common += std::min(count, it->second);
  }
  score.precision = static_cast<double>(common) / static_cast<double>(cand_total);
  score.recall = static_cast<double>(common) / static_cast<double>(ref_total);
  score.f1 = f1_score(score.precision, score.recall);
  return score;
}

RougeScore rouge_l(const TokenSeq& candidate, const TokenSeq& reference) {
  RougeScore score;
  const int nc = static_cast<int>(candidate.size());
  const int nr = static_cast<int>(reference.size());
  if (nc == 0 || nr == 0) return score;
  // Two-row LCS dynamic program.
  std::vector<int> prev(nr + 1, 0), cur(nr + 1, 0);
  for (int i = 1; i <= nc; ++i) {
    for (int j = 1; j <= nr; ++j) {
      if (candidate[i - 1] == reference[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const int lcs = prev[nr];
  score.precision = static_cast<double>(lcs) / nc;
  score.recall = static_cast<double>(lcs) / nr;
  score.f1 = f1_score(score.precision, score.recall);
  return score;
}

RougeReport rouge_report(const TokenSeq& candidate, const TokenSeq& reference) {
  RougeReport report;
  report.r1 = rouge_n(candidate, reference, 1);
  report.r2 = rouge_n(candidate, reference, 2);
  report.rl = rouge_l(candidate, reference);
  report.mean_f1 = (report.r1.f1 + report.r2.f1 + report.rl.f1) / 3.0;
  return report;
}

}  // namespace introsumm
