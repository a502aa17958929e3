#include "introsumm/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace introsumm {

namespace {

std::vector<std::string> sentence_trigrams(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  if (tokens.size() < 3) return out;
  for (std::size_t i = 0; i + 2 < tokens.size(); ++i)
    out.push_back(tokens[i] + '\x1f' + tokens[i + 1] + '\x1f' + tokens[i + 2]);
  return out;
}

}  // namespace

Summary trigram_blocked_select(const std::vector<double>& scores, const Document& doc,
                               const Budget& budget) {
  if (static_cast<int>(scores.size()) != doc.size())
    throw std::invalid_argument("trigram_blocked_select: scores length != document size");
  if (budget.max_words < 1) throw std::invalid_argument("trigram_blocked_select: budget < 1");
  std::vector<int> order(doc.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  std::unordered_set<std::string> selected_trigrams;
  std::vector<int> selected;
  int words = 0;
  for (int idx : order) {
    const Sentence& sent = doc.sentences[idx];
    const std::vector<std::string> tris = sentence_trigrams(sent.tokens);
    bool blocked = false;
    for (const std::string& t : tris)
      if (selected_trigrams.count(t)) {
        blocked = true;
        break;
      }
    if (blocked) continue;
    const int w = count_words(sent.text);
    if (!selected.empty() && words + w > budget.max_words) break;
    selected.push_back(idx);
    words += w;
    for (const std::string& t : tris) selected_trigrams.insert(t);
  }
  std::sort(selected.begin(), selected.end());
  Summary summary;
  summary.selected = selected;
  std::vector<std::string> texts;
  texts.reserve(selected.size());
  for (int idx : selected) texts.push_back(doc.sentences[idx].text);
  summary.text = join(texts, " ");
  summary.word_count = words;
  return summary;
}

namespace {

// Document-local TF-IDF vectors as sparse token->weight maps.
std::vector<std::map<std::string, double>> local_tfidf(const Document& doc) {
  std::map<std::string, int> df;
  for (const Sentence& sent : doc.sentences) {
    std::set<std::string> seen(sent.tokens.begin(), sent.tokens.end());
    for (const std::string& tok : seen) ++df[tok];
  }
  const double n = static_cast<double>(doc.size());
  std::vector<std::map<std::string, double>> vecs(doc.size());
  for (int i = 0; i < doc.size(); ++i) {
    std::map<std::string, int> counts;
    for (const std::string& tok : doc.sentences[i].tokens) ++counts[tok];
    for (const auto& [tok, count] : counts) {
      const double idf = std::log(n / df[tok]) + 1.0;
      vecs[i][tok] = (static_cast<double>(count) / doc.sentences[i].tokens.size()) * idf;
    }
  }
  return vecs;
}

double cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [tok, w] : a) na += w * w;
  for (const auto& [tok, w] : b) nb += w * w;
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& big = a.size() <= b.size() ? b : a;
  for (const auto& [tok, w] : small) {
    auto it = big.find(tok);
    if (it != big.end()) dot += w * it->second;
  }
  return dot / std::sqrt(na * nb);
}

constexpr double kLexRankThreshold = 0.1;
constexpr double kLexRankDamping = 0.85;
constexpr double kLexRankTolerance = 1e-8;
constexpr int kLexRankMaxIterations = 200;

}  // namespace

std::vector<double> lexrank_scores(const Document& doc) {
  const int n = doc.size();
  if (n < 1) throw std::invalid_argument("lexrank: empty document");
  if (n == 1) return {1.0};
  const auto vecs = local_tfidf(doc);
  // Row-stochastic transition matrix over the thresholded similarity graph.
  std::vector<double> sim(static_cast<std::size_t>(n) * n, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = i == j ? 1.0 : cosine(vecs[i], vecs[j]);
      if (s < kLexRankThreshold) s = 0.0;
      sim[static_cast<std::size_t>(i) * n + j] = s;
      sim[static_cast<std::size_t>(j) * n + i] = s;
    }
  }
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) row_sum += sim[static_cast<std::size_t>(i) * n + j];
    if (row_sum <= 0.0) {
      for (int j = 0; j < n; ++j) sim[static_cast<std::size_t>(i) * n + j] = 1.0 / n;
    } else {
      for (int j = 0; j < n; ++j) sim[static_cast<std::size_t>(i) * n + j] /= row_sum;
    }
  }
  std::vector<double> scores(n, 1.0 / n), next(n, 0.0);
  for (int iter = 0; iter < kLexRankMaxIterations; ++iter) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += scores[i] * sim[static_cast<std::size_t>(i) * n + j];
      next[j] = (1.0 - kLexRankDamping) / n + kLexRankDamping * acc;
    }
    double delta = 0.0;
    for (int j = 0; j < n; ++j) delta += std::fabs(next[j] - scores[j]);
    scores.swap(next);
    if (delta < kLexRankTolerance) break;
  }
  return scores;
}

Summary lexrank(const Document& doc, const Budget& budget) {
  return trigram_blocked_select(lexrank_scores(doc), doc, budget);
}

namespace detail {

void symmetric_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                     std::vector<std::vector<double>>& eigenvectors) {
  const int n = static_cast<int>(a.size());
  eigenvectors.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = eigenvectors[i][p], viq = eigenvectors[i][q];
          eigenvectors[i][p] = c * vip - s * viq;
          eigenvectors[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  eigenvalues.resize(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a[i][i];
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return diag[x] > diag[y]; });
  std::vector<std::vector<double>> sorted_vecs(n, std::vector<double>(n, 0.0));
  for (int col = 0; col < n; ++col) {
    eigenvalues[col] = diag[order[col]];
    for (int rowi = 0; rowi < n; ++rowi) sorted_vecs[rowi][col] = eigenvectors[rowi][order[col]];
  }
  eigenvectors.swap(sorted_vecs);
}

}  // namespace detail

std::vector<double> lsa_scores(const Document& doc, int max_topics) {
  const int n = doc.size();
  if (n < 1) throw std::invalid_argument("lsa: empty document");
  // Log-tf term–sentence weights, kept sparse per sentence.
  std::vector<std::map<std::string, double>> cols(n);
  bool any_term = false;
  for (int i = 0; i < n; ++i) {
    std::map<std::string, int> counts;
    for (const std::string& tok : doc.sentences[i].tokens) ++counts[tok];
    for (const auto& [tok, count] : counts) {
      cols[i][tok] = 1.0 + std::log(static_cast<double>(count));
      any_term = true;
    }
  }
  if (!any_term) return std::vector<double>(n, 1.0 / n);  // rank-0 fallback
  // Gram matrix G = AᵀA shares the singular structure of the term–sentence
  // matrix: G = V Σ² Vᵀ.
  std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double dot = 0.0;
      const auto& small = cols[i].size() <= cols[j].size() ? cols[i] : cols[j];
      const auto& big = cols[i].size() <= cols[j].size() ? cols[j] : cols[i];
      for (const auto& [tok, w] : small) {
        auto it = big.find(tok);
        if (it != big.end()) dot += w * it->second;
      }
      gram[i][j] = dot;
      gram[j][i] = dot;
    }
  }
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> v;
  detail::symmetric_eigen(std::move(gram), eigenvalues, v);
  const int topics = std::min(n, max_topics);
  std::vector<double> scores(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int t = 0; t < topics; ++t) {
      const double sigma_sq = std::max(eigenvalues[t], 0.0);  // σ_t²
      acc += sigma_sq * v[i][t] * v[i][t];                    // (σ_t · v_{t,i})²
    }
    scores[i] = std::sqrt(acc);
  }
  return scores;
}

Summary lsa_summarize(const Document& doc, const Budget& budget) {
  return trigram_blocked_select(lsa_scores(doc), doc, budget);
}

std::vector<Summary> summarize_split(
    const CorpusSplit& split, const std::function<std::vector<double>(const Document&)>& scorer,
    const Budget& budget, Exec exec) {
  const int n = static_cast<int>(split.documents.size());
  std::vector<Summary> out(n);
  std::vector<std::string> errors(n);
  for_each_index(n, exec, [&](int i) {
    try {
      out[i] = trigram_blocked_select(scorer(split.documents[i]), split.documents[i], budget);
    } catch (const std::exception& e) {
      errors[i] = e.what();  // exceptions must not escape the parallel region
    }
  });
  for (int i = 0; i < n; ++i)
    if (!errors[i].empty())
      throw std::runtime_error("summarize failed for doc " + split.documents[i].id + ": " +
                               errors[i]);
  return out;
}

}  // namespace introsumm
