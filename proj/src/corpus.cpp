#include "introsumm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "introsumm/common.hpp"
#include "json.hpp"

namespace introsumm {

using nlohmann::json;

bool Document::is_intro(int index) const {
  return std::binary_search(intro_indices.begin(), intro_indices.end(), index);
}

std::vector<int> Document::body_indices() const {
  std::vector<int> out;
  out.reserve(sentences.size());
  for (int i = 0; i < size(); ++i)
    if (!is_intro(i)) out.push_back(i);
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

namespace {

const std::vector<std::string> kIntroKeywords = {"introduction", "overview", "motivation",
                                                 "motivations", "background"};

// Strips leading numbering ("1.", "1.2", "I.", "IV)") and whitespace,
// lowercases the rest.
std::string normalize_heading(const std::string& heading) {
  std::size_t i = 0;
  auto is_roman = [](char c) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return c == 'i' || c == 'v' || c == 'x';
  };
  while (i < heading.size()) {
    unsigned char c = static_cast<unsigned char>(heading[i]);
    if (std::isspace(c) || std::isdigit(c) || c == '.' || c == ')' || c == ':') {
      ++i;
      continue;
    }
    // A roman-numeral prefix only counts as numbering when followed by '.' or ')'.
    std::size_t j = i;
    while (j < heading.size() && is_roman(heading[j])) ++j;
    if (j > i && j < heading.size() && (heading[j] == '.' || heading[j] == ')')) {
      i = j;
      continue;
    }
    break;
  }
  return lower_copy(heading.substr(i));
}

}  // namespace

std::vector<int> partition_intro(const std::vector<Section>& sections) {
  return partition_intro(sections, kIntroKeywords);
}

std::vector<int> partition_intro(const std::vector<Section>& sections,
                                 const std::vector<std::string>& keywords) {
  if (sections.empty()) throw std::invalid_argument("partition_intro: no sections");
  const Section* chosen = nullptr;
  for (const Section& sec : sections) {
    const std::string h = normalize_heading(sec.heading);
    for (const std::string& kw : keywords) {
      if (h.find(kw) != std::string::npos) {
        chosen = &sec;
        break;
      }
    }
    if (chosen) break;
  }
  if (!chosen) chosen = &sections.front();  // headingless fallback: first section
  std::vector<int> out;
  out.reserve(chosen->end - chosen->begin);
  for (int i = chosen->begin; i < chosen->end; ++i) out.push_back(i);
  return out;
}

namespace {

const std::set<std::string>& abbreviation_guards() {
  static const std::set<std::string> guards = {
      "fig",  "figs", "eq",  "eqs",  "sec", "secs", "tab", "no",  "al",   "etc",
      "dr",   "mr",   "mrs", "ms",   "prof", "st",  "vs",  "cf",  "resp", "ca",
      "e.g",  "i.e",  "approx"};
  return guards;
}

// The word immediately before a period, lowercased, with inner periods kept
// ("e.g" from "e.g.").
std::string word_before(const std::string& text, std::size_t dot) {
  std::size_t end = dot;
  std::size_t begin = end;
  while (begin > 0) {
    unsigned char c = static_cast<unsigned char>(text[begin - 1]);
    if (std::isspace(c) || c == '(' || c == ')' || c == '"') break;
    --begin;
  }
  std::string w = lower_copy(text.substr(begin, end - begin));
  while (!w.empty() && w.back() == '.') w.pop_back();
  return w;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<std::string> segment_sentences(const std::string& raw_text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  const std::size_t n = raw_text.size();
  for (std::size_t i = 0; i < n; ++i) {
    char c = raw_text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    // Require whitespace then an uppercase letter after the terminal.
    std::size_t j = i + 1;
    while (j < n && (raw_text[j] == '.' || raw_text[j] == '"' || raw_text[j] == ')')) ++j;
    if (j >= n) continue;
    if (!std::isspace(static_cast<unsigned char>(raw_text[j]))) continue;
    std::size_t k = j;
    while (k < n && std::isspace(static_cast<unsigned char>(raw_text[k]))) ++k;
    if (k >= n || !std::isupper(static_cast<unsigned char>(raw_text[k]))) continue;
    if (c == '.' && abbreviation_guards().count(word_before(raw_text, i)) > 0) continue;
    std::string piece = trim(raw_text.substr(start, j - start));
    if (!piece.empty()) out.push_back(piece);
    start = k;
  }
  std::string tail = trim(raw_text.substr(start));
  if (!tail.empty()) out.push_back(tail);
  return out;
}

namespace {

// Admits a sentence only if it tokenizes to something.
bool append_sentence(std::vector<Sentence>& dst, const std::string& text) {
  std::vector<std::string> toks = tokenize(text);
  if (toks.empty()) return false;
  Sentence s;
  s.index = static_cast<int>(dst.size());
  s.text = text;
  s.tokens = std::move(toks);
  dst.push_back(std::move(s));
  return true;
}

bool parse_document(const json& rec, Document& doc, std::string& error) {
  if (!rec.is_object()) {
    error = "record is not an object";
    return false;
  }
  if (!rec.contains("id") || !rec["id"].is_string()) {
    error = "missing string field 'id'";
    return false;
  }
  if (!rec.contains("sections") || !rec["sections"].is_array()) {
    error = "missing array field 'sections'";
    return false;
  }
  if (!rec.contains("abstract") || !rec["abstract"].is_array()) {
    error = "missing array field 'abstract'";
    return false;
  }
  doc.id = rec["id"].get<std::string>();
  for (const json& jsec : rec["sections"]) {
    if (!jsec.is_object()) {
      error = "section is not an object";
      return false;
    }
    Section sec;
    sec.heading = jsec.value("heading", std::string());
    sec.begin = doc.size();
    if (jsec.contains("sentences") && jsec["sentences"].is_array()) {
      for (const json& js : jsec["sentences"]) {
        if (!js.is_string()) {
          error = "section sentence is not a string";
          return false;
        }
        append_sentence(doc.sentences, js.get<std::string>());
      }
    } else if (jsec.contains("text") && jsec["text"].is_string()) {
      for (const std::string& piece : segment_sentences(jsec["text"].get<std::string>()))
        append_sentence(doc.sentences, piece);
    } else {
      error = "section has neither 'sentences' nor 'text'";
      return false;
    }
    sec.end = doc.size();
    if (sec.end > sec.begin) doc.sections.push_back(std::move(sec));
  }
  for (const json& js : rec["abstract"]) {
    if (!js.is_string()) {
      error = "abstract sentence is not a string";
      return false;
    }
    append_sentence(doc.abstract_sentences, js.get<std::string>());
  }
  if (doc.sentences.empty()) {
    error = "document has zero sentences";
    return false;
  }
  if (doc.abstract_sentences.empty()) {
    error = "document has empty abstract";
    return false;
  }
  doc.intro_indices = partition_intro(doc.sections);
  return true;
}

}  // namespace

CorpusSplit load_corpus(const std::string& path, const std::string& split_name,
                        LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  CorpusSplit split;
  split.name = split_name;
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  std::set<std::string> seen_ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      rep.diagnostics.push_back("line " + std::to_string(lineno) + ": malformed JSON");
      continue;
    }
    if (rec.is_object() && rec.contains("_meta")) continue;  // provenance header
    Document doc;
    std::string error;
    if (!parse_document(rec, doc, error)) {
      rep.diagnostics.push_back("line " + std::to_string(lineno) + ": " + error + "; skipped");
      ++rep.skipped;
      continue;
    }
    if (!seen_ids.insert(doc.id).second) {
      rep.diagnostics.push_back("line " + std::to_string(lineno) + ": duplicate id '" + doc.id +
                                "'; skipped");
      ++rep.skipped;
      continue;
    }
    ++rep.parsed;
    split.documents.push_back(std::move(doc));
  }
  return split;
}

std::string document_to_json(const Document& doc) {
  json rec;
  rec["id"] = doc.id;
  json sections = json::array();
  for (const Section& sec : doc.sections) {
    json jsec;
    jsec["heading"] = sec.heading;
    json sents = json::array();
    for (int i = sec.begin; i < sec.end; ++i) sents.push_back(doc.sentences[i].text);
    jsec["sentences"] = std::move(sents);
    sections.push_back(std::move(jsec));
  }
  rec["sections"] = std::move(sections);
  json abs = json::array();
  for (const Sentence& s : doc.abstract_sentences) abs.push_back(s.text);
  rec["abstract"] = std::move(abs);
  return rec.dump();
}

void save_corpus(const CorpusSplit& split, const std::string& path, const std::string& meta_line) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  if (!meta_line.empty()) out << meta_line << '\n';
  for (const Document& doc : split.documents) out << document_to_json(doc) << '\n';
}

std::vector<std::string> flatten_tokens(const std::vector<Sentence>& sentences) {
  std::vector<std::string> out;
  for (const Sentence& s : sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

}  // namespace introsumm
