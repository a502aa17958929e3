#pragma once

#include <string>
#include <vector>

namespace introsumm {

struct Sentence {
  int index = 0;                    // 0-based position within the whole document
  std::string text;                 // raw string
  std::vector<std::string> tokens;  // lowercased word tokens, never empty once admitted
};

/// Contiguous sentence range [begin, end) of one section.
struct Section {
  std::string heading;
  int begin = 0;
  int end = 0;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<Section> sections;
  std::vector<Sentence> abstract_sentences;
  std::vector<int> intro_indices;  // sentence range of the partitioning rule's section

  int size() const { return static_cast<int>(sentences.size()); }
  bool is_intro(int index) const;
  std::vector<int> body_indices() const;
};

struct CorpusSplit {
  std::string name;  // train / validation / test
  std::vector<Document> documents;
};

struct LoadReport {
  std::vector<std::string> diagnostics;
  int parsed = 0;
  int skipped = 0;
};

/// Lowercase tokens split on non-alphanumeric runs; pure-digit tokens kept.
/// Shared by ROUGE, features and trigram blocking so the metric and the
/// model see the same units.
std::vector<std::string> tokenize(const std::string& text);

/// Sentence range of the first section whose normalized heading contains one
/// of the intro keywords; falls back to the first section.
std::vector<int> partition_intro(const std::vector<Section>& sections);
std::vector<int> partition_intro(const std::vector<Section>& sections,
                                 const std::vector<std::string>& keywords);

/// Rule-based splitter for raw text: terminal punctuation followed by
/// whitespace and a capital, with an abbreviation guard list. Only used when
/// a record carries unsegmented text.
std::vector<std::string> segment_sentences(const std::string& raw_text);

/// Line-delimited records {id, sections:[{heading, sentences|text}], abstract}.
/// Malformed lines and degenerate documents are recorded in `report`, never
/// abort the load. Unreadable file throws.
CorpusSplit load_corpus(const std::string& path, const std::string& split_name,
                        LoadReport* report = nullptr);

std::string document_to_json(const Document& doc);
void save_corpus(const CorpusSplit& split, const std::string& path,
                 const std::string& meta_line = "");

std::vector<std::string> flatten_tokens(const std::vector<Sentence>& sentences);

}  // namespace introsumm
