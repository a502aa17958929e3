#pragma once

#include <map>
#include <string>
#include <vector>

#include "introsumm/common.hpp"
#include "introsumm/corpus.hpp"
#include "introsumm/rouge.hpp"

namespace introsumm {

struct LabelSet {
  std::vector<int> intro_positive;  // sorted by document order
  std::vector<int> body_positive;   // sorted, disjoint from intro_indices
  std::vector<double> gains;        // per-step gains, stage-1 steps then stage-2 steps
};

struct LabelConfig {
  int body_budget = 15;  // 15 arXiv-style, 20 PubMed-style
  // When true the budget counts stage-1 positives too; default reads the
  // fixed length as a stage-2 quantity.
  bool budget_includes_stage1 = false;
};

struct LabelStats {
  double mean_intro_positive = 0.0;
  double mean_body_positive = 0.0;
  int documents = 0;
};

struct LabelCorpusResult {
  std::map<std::string, LabelSet> labels;
  LabelStats stats;
  std::vector<std::string> diagnostics;
};

/// Selection objective: mean of ROUGE-2 F1 and ROUGE-L F1.
double oracle_score(const TokenSeq& candidate, const TokenSeq& reference);

/// Gain of adding `candidate` to `selected` (flattened in document order)
/// against `reference`.
double greedy_gain(const std::vector<Sentence>& selected, const Sentence& candidate,
                   const std::vector<Sentence>& reference);

/// Stage 1: greedy over the intro sentences against the abstract; stops at
/// the first step without a strictly positive gain. Equal gains resolve to
/// the smaller document index.
std::vector<int> label_stage1(const Document& doc, std::vector<double>* gains = nullptr,
                              std::vector<std::string>* diagnostics = nullptr);

/// Stage 2: greedy over non-intro sentences against the stage-1 sentences,
/// capped by the budget. Empty stage 1 yields an empty result.
std::vector<int> label_stage2(const Document& doc, const std::vector<int>& stage1,
                              const LabelConfig& config, std::vector<double>* gains = nullptr,
                              std::vector<std::string>* diagnostics = nullptr);

LabelSet label_document(const Document& doc, const LabelConfig& config,
                        std::vector<std::string>* diagnostics = nullptr);

LabelCorpusResult label_corpus(const CorpusSplit& split, const LabelConfig& config,
                               Exec exec = Exec::parallel);

}  // namespace introsumm
