#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "introsumm/corpus.hpp"
#include "introsumm/represent.hpp"

namespace introsumm {

/// Planted-pointer corpus: every intro sentence carries a two-token
/// keyphrase shared with exactly one body sentence. Salient intro sentences
/// additionally carry a cue marker and their keyphrases appear in the
/// abstract, so the pointed body sentences overlap the abstract and are the
/// ground-truth positives. Distractor pointers originate from non-salient
/// intro sentences and lead to body sentences with no abstract overlap.
struct SynthConfig {
  std::string mode = "planted";  // planted | arxiv
  int train_docs = 500;
  int val_docs = 100;
  int test_docs = 100;
  double signal = 1.0;  // marker density knob; 0 omits keyphrases entirely
  std::uint64_t seed = 7;

  // planted-mode geometry
  int pointers = 4;     // salient intro -> planted body pairs
  int distractors = 4;  // non-salient intro -> distractor body pairs
  int noise_body = 40;
  int sentence_len = 10;
};

struct PlantedTruth {
  std::vector<int> salient_intro;
  std::vector<int> planted_body;
};

struct SynthCorpus {
  CorpusSplit train, validation, test;
  std::map<std::string, PlantedTruth> truth;  // planted mode only
};

SynthCorpus generate_synthetic(const SynthConfig& config);

Document make_planted_document(const SynthConfig& config, const std::string& id, Rng& rng,
                               PlantedTruth& truth);
Document make_arxiv_document(const std::string& id, Rng& rng);

}  // namespace introsumm
