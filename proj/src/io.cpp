#include "introsumm/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace introsumm {

using nlohmann::json;

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for hashing: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64(buf.str());
}

std::string make_meta_line(const std::string& subcommand,
                           const std::map<std::string, std::string>& config,
                           const std::vector<std::string>& input_paths) {
  json meta;
  meta["tool"] = "introsumm";
  meta["subcommand"] = subcommand;
  meta["config"] = config;
  json inputs = json::object();
  for (const std::string& path : input_paths) inputs[path] = to_hex(hash_file(path));
  meta["inputs"] = std::move(inputs);
  json line;
  line["_meta"] = std::move(meta);
  return line.dump();
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

// Yields parsed non-meta records of a JSONL file.
template <class Fn>
void for_each_record(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded())
      throw std::runtime_error(path + " line " + std::to_string(lineno) + ": malformed JSON");
    if (rec.is_object() && rec.contains("_meta")) continue;
    fn(rec);
  }
}

}  // namespace

void write_labels(const std::string& path, const std::map<std::string, LabelSet>& labels,
                  const std::string& meta_line) {
  std::ofstream out = open_out(path);
  if (!meta_line.empty()) out << meta_line << '\n';
  for (const auto& [id, set] : labels) {
    json rec;
    rec["id"] = id;
    rec["intro_positive"] = set.intro_positive;
    rec["body_positive"] = set.body_positive;
    rec["gains"] = set.gains;
    out << rec.dump() << '\n';
  }
}

std::map<std::string, LabelSet> read_labels(const std::string& path) {
  std::map<std::string, LabelSet> labels;
  for_each_record(path, [&](const json& rec) {
    LabelSet set;
    set.intro_positive = rec.at("intro_positive").get<std::vector<int>>();
    set.body_positive = rec.at("body_positive").get<std::vector<int>>();
    if (rec.contains("gains")) set.gains = rec.at("gains").get<std::vector<double>>();
    labels[rec.at("id").get<std::string>()] = std::move(set);
  });
  return labels;
}

void write_predictions(const std::string& path, const std::vector<Prediction>& predictions,
                       const std::string& meta_line) {
  std::ofstream out = open_out(path);
  if (!meta_line.empty()) out << meta_line << '\n';
  for (const Prediction& pred : predictions) {
    json rec;
    rec["id"] = pred.id;
    rec["selected"] = pred.selected;
    rec["text"] = pred.text;
    out << rec.dump() << '\n';
  }
}

std::vector<Prediction> read_predictions(const std::string& path) {
  std::vector<Prediction> out;
  for_each_record(path, [&](const json& rec) {
    Prediction pred;
    pred.id = rec.at("id").get<std::string>();
    pred.selected = rec.at("selected").get<std::vector<int>>();
    pred.text = rec.value("text", std::string());
    out.push_back(std::move(pred));
  });
  return out;
}

void write_train_log(const std::string& path, const std::vector<TrainLogEntry>& log,
                     const std::string& meta_line) {
  std::ofstream out = open_out(path);
  if (!meta_line.empty()) out << meta_line << '\n';
  for (const TrainLogEntry& entry : log) {
    json rec;
    rec["step"] = entry.step;
    if (entry.step > 0) {
      rec["l_t1"] = entry.l_t1;
      rec["l_t2"] = entry.l_t2;
      rec["total"] = entry.total;
    }
    if (entry.val_r2) rec["val_r2"] = *entry.val_r2;
    out << rec.dump() << '\n';
  }
}

}  // namespace introsumm
