#pragma once

#include <functional>
#include <string>
#include <vector>

#include "introsumm/common.hpp"
#include "introsumm/corpus.hpp"

namespace introsumm {

struct Summary {
  std::vector<int> selected;  // strictly increasing document order
  std::string text;
  int word_count = 0;
};

struct Budget {
  int max_words = 600;
};

/// Greedy score-descending selection with trigram blocking: a candidate
/// sharing any word trigram with the current selection is skipped; the loop
/// stops at the first admissible sentence that would exceed the budget. The
/// very first sentence is admitted even if it alone exceeds the budget.
Summary trigram_blocked_select(const std::vector<double>& scores, const Document& doc,
                               const Budget& budget);

/// Eigenvector-centrality ranking over the TF-IDF cosine graph (threshold
/// 0.1, damping 0.85), then trigram-blocked selection.
Summary lexrank(const Document& doc, const Budget& budget);
std::vector<double> lexrank_scores(const Document& doc);

/// SVD topic scoring of the log-tf term–sentence matrix (Steinberger–Ježek),
/// then trigram-blocked selection.
Summary lsa_summarize(const Document& doc, const Budget& budget);
std::vector<double> lsa_scores(const Document& doc, int max_topics = 10);

/// Batch helper: summaries for every document of a split from a per-document
/// scoring callback.
std::vector<Summary> summarize_split(const CorpusSplit& split,
                                     const std::function<std::vector<double>(const Document&)>& scorer,
                                     const Budget& budget, Exec exec = Exec::parallel);

namespace detail {
/// Cyclic Jacobi eigendecomposition of a symmetric matrix; returns
/// eigenvalues (descending) and matching eigenvectors as columns.
void symmetric_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                     std::vector<std::vector<double>>& eigenvectors);
}  // namespace detail

}  // namespace introsumm
