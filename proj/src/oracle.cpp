#include "introsumm/oracle.hpp"

#include <algorithm>

namespace introsumm {

double oracle_score(const TokenSeq& candidate, const TokenSeq& reference) {
  const double r2 = rouge_n(candidate, reference, 2).f1;
  const double rl = rouge_l(candidate, reference).f1;
  return (r2 + rl) / 2.0;
}

namespace {

TokenSeq flatten_selection(const Document& doc, const std::vector<int>& sorted_indices) {
  TokenSeq out;
  for (int idx : sorted_indices) {
    const auto& toks = doc.sentences[idx].tokens;
    out.insert(out.end(), toks.begin(), toks.end());
  }
  return out;
}

// Greedy maximization of oracle_score over `candidates`. Candidates are
// scanned in increasing document order and replaced only on strictly greater
// gain, which realizes the smallest-index tie-break.
std::vector<int> greedy_select(const Document& doc, const std::vector<int>& candidates,
                               const TokenSeq& reference, int max_positives,
                               std::vector<double>* gains) {
  std::vector<int> selected;  // kept sorted: flattening is document-order
  std::vector<char> taken(doc.size(), 0);
  double current = 0.0;
  while (max_positives < 0 || static_cast<int>(selected.size()) < max_positives) {
    int best = -1;
    double best_gain = 0.0;
    for (int c : candidates) {
      if (taken[c]) continue;
      std::vector<int> trial = selected;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
      const double gain = oracle_score(flatten_selection(doc, trial), reference) - current;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    if (best < 0) break;  // no strictly positive gain left
    selected.insert(std::upper_bound(selected.begin(), selected.end(), best), best);
    taken[best] = 1;
    current += best_gain;
    if (gains) gains->push_back(best_gain);
  }
  return selected;
}

}  // namespace

double greedy_gain(const std::vector<Sentence>& selected, const Sentence& candidate,
                   const std::vector<Sentence>& reference) {
  std::vector<Sentence> with = selected;
  with.push_back(candidate);
  auto by_index = [](const Sentence& a, const Sentence& b) { return a.index < b.index; };
  std::sort(with.begin(), with.end(), by_index);
  std::vector<Sentence> base = selected;
  std::sort(base.begin(), base.end(), by_index);
  const TokenSeq ref = flatten_tokens(reference);
  return oracle_score(flatten_tokens(with), ref) - oracle_score(flatten_tokens(base), ref);
}

std::vector<int> label_stage1(const Document& doc, std::vector<double>* gains,
                              std::vector<std::string>* diagnostics) {
  if (doc.abstract_sentences.empty()) {
    if (diagnostics)
      diagnostics->push_back("doc " + doc.id + ": empty abstract, no stage-1 labels");
    return {};
  }
  const TokenSeq reference = flatten_tokens(doc.abstract_sentences);
  return greedy_select(doc, doc.intro_indices, reference, -1, gains);
}

std::vector<int> label_stage2(const Document& doc, const std::vector<int>& stage1,
                              const LabelConfig& config, std::vector<double>* gains,
                              std::vector<std::string>* diagnostics) {
  if (stage1.empty()) {
    if (diagnostics)
      diagnostics->push_back("doc " + doc.id + ": empty stage 1, no stage-2 labels");
    return {};
  }
  int budget = config.body_budget;
  if (config.budget_includes_stage1) budget -= static_cast<int>(stage1.size());
  if (budget <= 0) return {};
  std::vector<int> sorted_stage1 = stage1;
  std::sort(sorted_stage1.begin(), sorted_stage1.end());
  const TokenSeq reference = flatten_selection(doc, sorted_stage1);
  return greedy_select(doc, doc.body_indices(), reference, budget, gains);
}

LabelSet label_document(const Document& doc, const LabelConfig& config,
                        std::vector<std::string>* diagnostics) {
  LabelSet labels;
  labels.intro_positive = label_stage1(doc, &labels.gains, diagnostics);
  labels.body_positive = label_stage2(doc, labels.intro_positive, config, &labels.gains,
                                      diagnostics);
  return labels;
}

LabelCorpusResult label_corpus(const CorpusSplit& split, const LabelConfig& config, Exec exec) {
  const int n = static_cast<int>(split.documents.size());
  std::vector<LabelSet> slots(n);
  std::vector<std::vector<std::string>> diags(n);
  for_each_index(n, exec, [&](int i) {
    try {
      slots[i] = label_document(split.documents[i], config, &diags[i]);
    } catch (const std::exception& e) {
      diags[i].push_back("doc " + split.documents[i].id + ": labeling failed: " + e.what());
    }
  });
  LabelCorpusResult result;
  double intro_sum = 0.0, body_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    result.labels[split.documents[i].id] = std::move(slots[i]);
    const LabelSet& ls = result.labels[split.documents[i].id];
    intro_sum += static_cast<double>(ls.intro_positive.size());
    body_sum += static_cast<double>(ls.body_positive.size());
    for (auto& d : diags[i]) result.diagnostics.push_back(std::move(d));
  }
  result.stats.documents = n;
  if (n > 0) {
    result.stats.mean_intro_positive = intro_sum / n;
    result.stats.mean_body_positive = body_sum / n;
  }
  return result;
}

}  // namespace introsumm
