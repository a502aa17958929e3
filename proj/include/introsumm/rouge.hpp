#pragma once

#include <string>
#include <vector>

namespace introsumm {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RougeReport {
  RougeScore r1, r2, rl;
  double mean_f1 = 0.0;
};

using TokenSeq = std::vector<std::string>;

/// Clipped (multiset) n-gram overlap. Empty-side denominators yield zeros.
RougeScore rouge_n(const TokenSeq& candidate, const TokenSeq& reference, int n);

/// Sentence-flattened longest common subsequence.
RougeScore rouge_l(const TokenSeq& candidate, const TokenSeq& reference);

/// R1/R2/RL plus their unweighted mean F1, both sides flattened to one token
/// sequence. No stemming, no stopword removal; tokens as from tokenize().
RougeReport rouge_report(const TokenSeq& candidate, const TokenSeq& reference);

double f1_score(double precision, double recall);

}  // namespace introsumm
