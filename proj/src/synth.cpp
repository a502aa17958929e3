#include "introsumm/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "introsumm/common.hpp"

namespace introsumm {

namespace {

std::string render(std::vector<std::string> words) {
  if (!words.empty()) words.front()[0] = static_cast<char>(std::toupper(words.front()[0]));
  return join(words, " ") + ".";
}

// Filler pools are prefix-disjoint: "w" for document sentences, "a" for
// abstracts, so only planted keyphrases carry abstract overlap.
std::vector<std::string> filler_sentence(Rng& rng, int len, const char* prefix) {
  std::vector<std::string> words;
  words.reserve(len);
  for (int i = 0; i < len; ++i) words.push_back(prefix + std::to_string(rng.next_int(200)));
  return words;
}

// Inserts `phrase` as a contiguous run at `reps` spots of a filler sentence.
std::vector<std::string> pointer_sentence(Rng& rng, int len, const std::vector<std::string>& phrase,
                                          int reps, const std::string& marker, int marker_reps,
                                          const char* prefix) {
  std::vector<std::string> words = filler_sentence(rng, len, prefix);
  int cursor = 1;  // vary the neighborhood so pointer pairs share no trigram
  for (int r = 0; r < reps && cursor + static_cast<int>(phrase.size()) < len; ++r) {
    for (std::size_t j = 0; j < phrase.size(); ++j) words[cursor + j] = phrase[j];
    cursor += static_cast<int>(phrase.size()) + 1 + rng.next_int(2);
  }
  for (int r = 0; r < marker_reps; ++r) words[len - 1 - r] = marker;
  return words;
}

void shuffle_ints(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.next_int(static_cast<int>(i))]);
}

}  // namespace

Document make_planted_document(const SynthConfig& config, const std::string& id, Rng& rng,
                               PlantedTruth& truth) {
  const int len = config.sentence_len;
  const int reps = static_cast<int>(std::lround(3.0 * config.signal));
  const int cue_reps = std::min(reps, 2);

  // Topic keyphrases come from a fixed global vocabulary and every document
  // uses all of them, with a fresh random half marked salient. Balanced
  // assignment means no classifier can tell a pointed-to body sentence from
  // a distractor without reading which topics this document's introduction
  // flags — the capability the guidance path is supposed to supply.
  const int topics = config.pointers + config.distractors;
  std::vector<std::vector<std::string>> keyphrases(topics);
  std::vector<int> topic_ids(topics);
  for (int i = 0; i < topics; ++i) topic_ids[i] = i;
  shuffle_ints(topic_ids, rng);
  for (int t = 0; t < topics; ++t) {
    // Spaced ids keep the marker tokens hash-dispersed at the default
    // featurizer widths.
    keyphrases[t] = {"kp" + std::to_string(topic_ids[t] * 26) + "a",
                     "kp" + std::to_string(topic_ids[t] * 26) + "b"};
  }

  Document doc;
  doc.id = id;

  // Topic presentation order: the shuffled intro fixes it, and the abstract
  // and the planted body sentences follow the same relative order. Papers
  // elaborate topics in the order the introduction raises them; ROUGE-L is
  // order-sensitive, so the oracle needs this consistency too.
  std::vector<int> intro_order(config.pointers + config.distractors);
  for (std::size_t i = 0; i < intro_order.size(); ++i) intro_order[i] = static_cast<int>(i);
  shuffle_ints(intro_order, rng);
  std::vector<int> salient_sequence, distractor_sequence;
  for (int slot : intro_order) {
    if (slot < config.pointers)
      salient_sequence.push_back(slot);
    else
      distractor_sequence.push_back(slot);
  }

  for (int t : salient_sequence) {
    Sentence s;
    s.index = static_cast<int>(doc.abstract_sentences.size());
    s.text = render(pointer_sentence(rng, len, keyphrases[t], reps, "", 0, "a"));
    s.tokens = tokenize(s.text);
    doc.abstract_sentences.push_back(std::move(s));
  }

  Section intro_sec;
  intro_sec.heading = "1 Introduction";
  intro_sec.begin = 0;
  for (int slot : intro_order) {
    const bool salient = slot < config.pointers;
    Sentence s;
    s.index = doc.size();
    s.text = render(pointer_sentence(rng, len, keyphrases[slot], reps, salient ? "cue" : "",
                                     salient ? cue_reps : 0, "w"));
    s.tokens = tokenize(s.text);
    if (salient) truth.salient_intro.push_back(s.index);
    doc.sentences.push_back(std::move(s));
  }
  intro_sec.end = doc.size();
  doc.sections.push_back(intro_sec);

  // Body layout: random positions for pointer-bearing sentences, but their
  // topic order follows the intro.
  const int body_total = config.pointers + config.distractors + config.noise_body;
  std::vector<int> positions(body_total);
  for (int i = 0; i < body_total; ++i) positions[i] = i;
  shuffle_ints(positions, rng);
  std::vector<int> planted_pos(positions.begin(), positions.begin() + config.pointers);
  std::vector<int> distractor_pos(positions.begin() + config.pointers,
                                  positions.begin() + config.pointers + config.distractors);
  std::sort(planted_pos.begin(), planted_pos.end());
  std::sort(distractor_pos.begin(), distractor_pos.end());
  std::vector<int> topic_at(body_total, -1);
  for (int i = 0; i < config.pointers; ++i) topic_at[planted_pos[i]] = salient_sequence[i];
  for (int q = 0; q < config.distractors; ++q)
    topic_at[distractor_pos[q]] = distractor_sequence[q];

  const int half = body_total / 2;
  for (int part = 0; part < 2; ++part) {
    Section sec;
    sec.heading = part == 0 ? "2 Method" : "3 Results";
    sec.begin = doc.size();
    const int lo = part == 0 ? 0 : half;
    const int hi = part == 0 ? half : body_total;
    for (int i = lo; i < hi; ++i) {
      Sentence s;
      s.index = doc.size();
      if (topic_at[i] >= 0)
        s.text = render(pointer_sentence(rng, len, keyphrases[topic_at[i]], reps, "", 0, "w"));
      else
        s.text = render(filler_sentence(rng, len, "w"));
      s.tokens = tokenize(s.text);
      if (topic_at[i] >= 0 && topic_at[i] < config.pointers)
        truth.planted_body.push_back(s.index);
      doc.sentences.push_back(std::move(s));
    }
    sec.end = doc.size();
    doc.sections.push_back(sec);
  }
  std::sort(truth.salient_intro.begin(), truth.salient_intro.end());
  std::sort(truth.planted_body.begin(), truth.planted_body.end());
  doc.intro_indices = partition_intro(doc.sections);
  return doc;
}

namespace {

// Zipf-weighted background vocabulary shared by all arxiv-mode documents.
const std::vector<double>& zipf_cdf() {
  static const std::vector<double> cdf = [] {
    std::vector<double> c(5000);
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      total += 1.0 / std::pow(static_cast<double>(i + 1), 1.1);
      c[i] = total;
    }
    for (double& v : c) v /= total;
    return c;
  }();
  return cdf;
}

std::string zipf_word(Rng& rng) {
  const auto& cdf = zipf_cdf();
  const double u = rng.next_unit();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return "t" + std::to_string(it - cdf.begin());
}

std::vector<std::string> background_sentence(Rng& rng, int len) {
  std::vector<std::string> words;
  words.reserve(len);
  for (int i = 0; i < len; ++i) words.push_back(zipf_word(rng));
  return words;
}

}  // namespace

Document make_arxiv_document(const std::string& id, Rng& rng) {
  const int topics = 5;
  // Each topic contributes a key phrase restated across sections, the way
  // papers restate their contributions; that recurrence is what a centrality
  // ranker clusters on, and the abstract paraphrases the same statements.
  std::vector<std::vector<std::string>> phrases(topics);
  for (auto& phrase : phrases) {
    const int plen = 5 + rng.next_int(3);
    for (int i = 0; i < plen; ++i)
      phrase.push_back("x" + std::to_string(rng.next_int(4000)));
  }

  auto topic_sentence = [&](int topic, int len) {
    std::vector<std::string> words = background_sentence(rng, len);
    const auto& phrase = phrases[topic];
    const int pos = 1 + rng.next_int(std::max(1, len - static_cast<int>(phrase.size()) - 1));
    for (std::size_t j = 0; j < phrase.size(); ++j) words[pos + j] = phrase[j];
    return words;
  };
  auto noise_sentence = [&]() {
    // Papers mix typical sentences with the occasional very long one; the
    // long ones are what an unnormalized term-weight ranker overvalues.
    const int len = rng.next_int(100) < 15 ? 30 + rng.next_int(16) : 12 + rng.next_int(14);
    return background_sentence(rng, len);
  };

  Document doc;
  doc.id = id;
  for (int t = 0; t < topics; ++t) {
    Sentence s;
    s.index = t;
    s.text = render(topic_sentence(t, 15 + rng.next_int(6)));
    s.tokens = tokenize(s.text);
    doc.abstract_sentences.push_back(std::move(s));
  }

  struct Part {
    const char* heading;
    int base, spread, mentions;
  };
  const Part parts[6] = {{"1 Introduction", 10, 5, topics}, {"2 Related Work", 28, 12, 4},
                         {"3 Method", 28, 12, 4},           {"4 Experiments", 28, 12, 4},
                         {"5 Results", 28, 12, 4},          {"6 Conclusion", 8, 4, 2}};
  int next_topic = 0;
  for (const Part& part : parts) {
    Section sec;
    sec.heading = part.heading;
    sec.begin = doc.size();
    const int count = part.base + rng.next_int(part.spread);
    std::vector<char> is_mention(count, 0);
    for (int m = 0; m < part.mentions; ++m) is_mention[rng.next_int(count)] = 1;
    for (int i = 0; i < count; ++i) {
      std::vector<std::string> words;
      if (is_mention[i]) {
        words = topic_sentence(next_topic % topics, 14 + rng.next_int(10));
        ++next_topic;
      } else {
        words = noise_sentence();
      }
      Sentence s;
      s.index = doc.size();
      s.text = render(std::move(words));
      s.tokens = tokenize(s.text);
      doc.sentences.push_back(std::move(s));
    }
    sec.end = doc.size();
    doc.sections.push_back(sec);
  }
  doc.intro_indices = partition_intro(doc.sections);
  return doc;
}

SynthCorpus generate_synthetic(const SynthConfig& config) {
  if (config.train_docs < 0 || config.val_docs < 0 || config.test_docs < 0)
    throw std::invalid_argument("generate_synthetic: negative split size");
  SynthCorpus corpus;
  corpus.train.name = "train";
  corpus.validation.name = "validation";
  corpus.test.name = "test";
  Rng rng(config.seed);
  auto fill = [&](CorpusSplit& split, int count) {
    for (int i = 0; i < count; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s-%04d", split.name.c_str(), i);
      if (config.mode == "planted") {
        PlantedTruth truth;
        split.documents.push_back(make_planted_document(config, buf, rng, truth));
        corpus.truth[buf] = std::move(truth);
      } else if (config.mode == "arxiv") {
        split.documents.push_back(make_arxiv_document(buf, rng));
      } else {
        throw std::invalid_argument("unknown synth mode: " + config.mode);
      }
    }
  };
  fill(corpus.train, config.train_docs);
  fill(corpus.validation, config.val_docs);
  fill(corpus.test, config.test_docs);
  return corpus;
}

}  // namespace introsumm
