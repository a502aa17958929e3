#include "introsumm/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "introsumm/corpus.hpp"
#include "introsumm/evalstat.hpp"
#include "introsumm/io.hpp"
#include "introsumm/model.hpp"
#include "introsumm/oracle.hpp"
#include "introsumm/represent.hpp"
#include "introsumm/rouge.hpp"
#include "introsumm/summarize.hpp"
#include "introsumm/synth.hpp"
#include "json.hpp"

namespace introsumm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string split_path(const std::string& corpus_dir, const std::string& split) {
  return (fs::path(corpus_dir) / (split + ".jsonl")).string();
}

CorpusSplit load_split_checked(const std::string& corpus_dir, const std::string& split) {
  LoadReport report;
  CorpusSplit out = load_corpus(split_path(corpus_dir, split), split, &report);
  for (const std::string& diag : report.diagnostics) std::cerr << "warning: " << diag << '\n';
  return out;
}

std::string format_score(const char* name, const RougeScore& s) {
  std::ostringstream os;
  os << name << " P=" << s.precision << " R=" << s.recall << " F1=" << s.f1;
  return os.str();
}

void print_report(const std::string& label, const RougeReport& r) {
  std::cout << label << ": " << format_score("R1", r.r1) << " | " << format_score("R2", r.r2)
            << " | " << format_score("RL", r.rl) << " | meanF1=" << r.mean_f1 << '\n';
}

struct SynthOptions {
  SynthConfig config;
  std::string out_dir;
};

int run_synth(const SynthOptions& opt) {
  const SynthCorpus corpus = generate_synthetic(opt.config);
  fs::create_directories(opt.out_dir);
  std::map<std::string, std::string> cfg = {
      {"mode", opt.config.mode},
      {"train", std::to_string(opt.config.train_docs)},
      {"val", std::to_string(opt.config.val_docs)},
      {"test", std::to_string(opt.config.test_docs)},
      {"signal", std::to_string(opt.config.signal)},
      {"seed", std::to_string(opt.config.seed)},
      {"pointers", std::to_string(opt.config.pointers)},
      {"distractors", std::to_string(opt.config.distractors)}};
  const std::string meta = make_meta_line("synth", cfg, {});
  for (const CorpusSplit* split : {&corpus.train, &corpus.validation, &corpus.test})
    save_corpus(*split, split_path(opt.out_dir, split->name), meta);
  if (opt.config.mode == "planted") {
    std::ofstream truth(fs::path(opt.out_dir) / "planted_truth.jsonl");
    truth << meta << '\n';
    for (const auto& [id, t] : corpus.truth) {
      json rec;
      rec["id"] = id;
      rec["salient_intro"] = t.salient_intro;
      rec["planted_body"] = t.planted_body;
      truth << rec.dump() << '\n';
    }
  }
  std::cout << "synth: wrote " << corpus.train.documents.size() << "/"
            << corpus.validation.documents.size() << "/" << corpus.test.documents.size()
            << " documents to " << opt.out_dir << '\n';
  return 0;
}

struct IngestOptions {
  std::string input, split, out_dir;
};

int run_ingest(const IngestOptions& opt) {
  LoadReport report;
  const CorpusSplit split = load_corpus(opt.input, opt.split, &report);
  fs::create_directories(opt.out_dir);
  const std::string meta =
      make_meta_line("ingest", {{"input", opt.input}, {"split", opt.split}}, {opt.input});
  save_corpus(split, split_path(opt.out_dir, opt.split), meta);
  for (const std::string& diag : report.diagnostics) std::cerr << "warning: " << diag << '\n';
  std::cout << "ingest: parsed " << report.parsed << " documents, skipped " << report.skipped
            << " (" << report.diagnostics.size() << " diagnostics)\n";
  return 0;
}

struct LabelOptions {
  std::string corpus_dir, split = "train", out;
  LabelConfig config;
  bool serial = false;
};

int run_label(const LabelOptions& opt) {
  const CorpusSplit split = load_split_checked(opt.corpus_dir, opt.split);
  const LabelCorpusResult result =
      label_corpus(split, opt.config, opt.serial ? Exec::serial : Exec::parallel);
  for (const std::string& diag : result.diagnostics) std::cerr << "warning: " << diag << '\n';
  const std::string meta = make_meta_line(
      "label",
      {{"corpus", opt.corpus_dir},
       {"split", opt.split},
       {"budget", std::to_string(opt.config.body_budget)},
       {"budget_includes_stage1", opt.config.budget_includes_stage1 ? "true" : "false"}},
      {split_path(opt.corpus_dir, opt.split)});
  write_labels(opt.out, result.labels, meta);
  std::cout << "label: " << result.stats.documents << " documents, mean intro positives "
            << result.stats.mean_intro_positive << ", mean body positives "
            << result.stats.mean_body_positive << '\n';
  return 0;
}

struct TrainOptions {
  std::string corpus_dir, train_split = "train", val_split = "validation";
  std::string labels_path, out_ckpt, out_log;
  std::string provider = "tfidf";
  std::string embeddings;
  std::string mode = "tstr";
  int dims = 128;
  TrainConfig config;
};

int run_train(const TrainOptions& opt) {
  const CorpusSplit train_split = load_split_checked(opt.corpus_dir, opt.train_split);
  const CorpusSplit val_split = load_split_checked(opt.corpus_dir, opt.val_split);
  const auto labels = read_labels(opt.labels_path);
  Provider provider;
  if (opt.provider == "tfidf") {
    if (opt.dims < 3) throw std::runtime_error("--dims must be at least 3");
    provider = fit_tfidf(train_split, opt.dims - 2);
  } else if (opt.provider == "external") {
    if (opt.embeddings.empty()) throw std::runtime_error("--embeddings required with external");
    provider = load_external(opt.embeddings);
  } else {
    throw std::runtime_error("unknown provider: " + opt.provider);
  }
  TrainConfig config = opt.config;
  config.mode = model_mode_from_string(opt.mode);
  const TrainResult result = train(train_split, val_split, labels, provider, config);
  for (const std::string& diag : result.diagnostics) std::cerr << "warning: " << diag << '\n';
  std::vector<std::string> inputs = {split_path(opt.corpus_dir, opt.train_split),
                                     split_path(opt.corpus_dir, opt.val_split), opt.labels_path};
  std::map<std::string, std::string> cfg = {
      {"mode", opt.mode},
      {"provider", opt.provider},
      {"dims", std::to_string(opt.dims)},
      {"k", std::to_string(config.k)},
      {"alpha", std::to_string(config.alpha)},
      {"lr", std::to_string(config.learning_rate)},
      {"steps", std::to_string(config.max_steps)},
      {"val_interval", std::to_string(config.val_interval)},
      {"val_budget", std::to_string(config.val_budget_words)},
      {"seed", std::to_string(config.seed)}};
  save_checkpoint(result.best, provider, opt.out_ckpt);
  if (!opt.out_log.empty())
    write_train_log(opt.out_log, result.log, make_meta_line("train", cfg, inputs));
  std::cout << "train: best validation R2 " << result.best_val_r2 << " at step "
            << result.best_step << "; checkpoint " << opt.out_ckpt << '\n';
  return 0;
}

struct SummarizeOptions {
  std::string corpus_dir, split = "test", out;
  std::string model = "lexrank";
  std::string ckpt;
  int budget = 600;
  bool serial = false;
};

int run_summarize(const SummarizeOptions& opt) {
  const CorpusSplit split = load_split_checked(opt.corpus_dir, opt.split);
  const Budget budget{opt.budget};
  const Exec exec = opt.serial ? Exec::serial : Exec::parallel;
  std::function<std::vector<double>(const Document&)> scorer;
  std::vector<std::string> inputs = {split_path(opt.corpus_dir, opt.split)};
  Checkpoint ckpt;
  if (opt.model == "lexrank") {
    scorer = [](const Document& doc) { return lexrank_scores(doc); };
  } else if (opt.model == "lsa") {
    scorer = [](const Document& doc) { return lsa_scores(doc); };
  } else {
    std::string path = opt.model;
    if (opt.model == "ext" || opt.model == "tstr" || opt.model == "noguide" ||
        opt.model == "ckpt") {
      if (opt.ckpt.empty())
        throw std::runtime_error("--ckpt is required with --model " + opt.model);
      path = opt.ckpt;
    }
    ckpt = load_checkpoint(path);
    if (opt.model != "ckpt" && opt.model != path && to_string(ckpt.params.mode) != opt.model)
      throw std::runtime_error("checkpoint mode is " + to_string(ckpt.params.mode) +
                               ", not " + opt.model);
    inputs.push_back(path);
    scorer = [&ckpt](const Document& doc) {
      return score_document(ckpt.params, ckpt.provider, doc);
    };
  }
  const std::vector<Summary> summaries = summarize_split(split, scorer, budget, exec);
  std::vector<Prediction> predictions(summaries.size());
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    predictions[i].id = split.documents[i].id;
    predictions[i].selected = summaries[i].selected;
    predictions[i].text = summaries[i].text;
  }
  const std::string meta = make_meta_line("summarize",
                                          {{"model", opt.model},
                                           {"corpus", opt.corpus_dir},
                                           {"split", opt.split},
                                           {"budget", std::to_string(opt.budget)}},
                                          inputs);
  write_predictions(opt.out, predictions, meta);
  std::cout << "summarize: wrote " << predictions.size() << " summaries to " << opt.out << '\n';
  return 0;
}

struct EvalOptions {
  std::vector<std::string> preds;
  std::string corpus_dir, split = "test";
  double level = 0.05;
};

int run_eval(const EvalOptions& opt) {
  const CorpusSplit split = load_split_checked(opt.corpus_dir, opt.split);
  std::vector<SystemReport> reports;
  for (const std::string& path : opt.preds) {
    reports.push_back(evaluate(read_predictions(path), split));
    print_report(path, reports.back().mean);
  }
  if (reports.size() == 2) {
    std::vector<std::string> ids;
    for (const auto& [id, r] : reports[0].per_doc) ids.push_back(id);
    auto metric_series = [&](const SystemReport& rep, auto getter) {
      std::vector<double> out;
      out.reserve(ids.size());
      for (const std::string& id : ids) out.push_back(getter(rep.per_doc.at(id)));
      return out;
    };
    struct MetricDef {
      const char* name;
      double (*get)(const RougeReport&);
    };
    const MetricDef metrics[] = {
        {"R1_F1", [](const RougeReport& r) { return r.r1.f1; }},
        {"R2_F1", [](const RougeReport& r) { return r.r2.f1; }},
        {"RL_F1", [](const RougeReport& r) { return r.rl.f1; }},
        {"mean_F1", [](const RougeReport& r) { return r.mean_f1; }},
    };
    for (const MetricDef& metric : metrics) {
      const TTestResult t = paired_t_test(metric_series(reports[0], metric.get),
                                          metric_series(reports[1], metric.get), opt.level);
      std::cout << "t-test " << metric.name << ": t=" << t.t_stat << " dof=" << t.dof
                << " p=" << t.p_value << (t.significant ? " significant" : " not-significant")
                << " at level " << opt.level << '\n';
    }
  }
  return 0;
}

struct RougeOptions {
  std::string cand, ref;
};

TokenSeq tokens_of_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  TokenSeq tokens;
  std::string line;
  while (std::getline(in, line)) {
    const TokenSeq toks = tokenize(line);
    tokens.insert(tokens.end(), toks.begin(), toks.end());
  }
  return tokens;
}

int run_rouge(const RougeOptions& opt) {
  const RougeReport report = rouge_report(tokens_of_file(opt.cand), tokens_of_file(opt.ref));
  print_report("rouge", report);
  return 0;
}

}  // namespace

int run(std::vector<std::string> args) {
  CLI::App app{"introsumm: intro-guided extended extractive summarization toolkit"};
  app.require_subcommand(1);

  SynthOptions synth_opt;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--mode", synth_opt.config.mode, "planted|arxiv")->capture_default_str();
  synth_cmd->add_option("--train", synth_opt.config.train_docs)->capture_default_str();
  synth_cmd->add_option("--val", synth_opt.config.val_docs)->capture_default_str();
  synth_cmd->add_option("--test", synth_opt.config.test_docs)->capture_default_str();
  synth_cmd->add_option("--signal", synth_opt.config.signal)->capture_default_str();
  synth_cmd->add_option("--seed", synth_opt.config.seed)->capture_default_str();
  synth_cmd->add_option("--pointers", synth_opt.config.pointers)->capture_default_str();
  synth_cmd->add_option("--distractors", synth_opt.config.distractors)->capture_default_str();
  synth_cmd->add_option("--noise", synth_opt.config.noise_body)->capture_default_str();
  synth_cmd->add_option("--sentence-len", synth_opt.config.sentence_len)->capture_default_str();
  synth_cmd->add_option("--out", synth_opt.out_dir, "Output directory")->required();

  IngestOptions ingest_opt;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Load and canonicalize a corpus file");
  ingest_cmd->add_option("--input", ingest_opt.input)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--split", ingest_opt.split)->required();
  ingest_cmd->add_option("--out", ingest_opt.out_dir)->required();

  LabelOptions label_opt;
  CLI::App* label_cmd = app.add_subcommand("label", "Two-stage greedy oracle labeling");
  label_cmd->add_option("--corpus", label_opt.corpus_dir)->envname("INTROSUMM_DATA_DIR")->required();
  label_cmd->add_option("--split", label_opt.split)->capture_default_str();
  label_cmd->add_option("--budget", label_opt.config.body_budget)->capture_default_str();
  label_cmd->add_flag("--budget-includes-stage1", label_opt.config.budget_includes_stage1);
  label_cmd->add_flag("--serial", label_opt.serial, "Disable per-document parallelism");
  label_cmd->add_option("--out", label_opt.out)->required();

  TrainOptions train_opt;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the TSTR scorer");
  train_cmd->add_option("--corpus", train_opt.corpus_dir)->envname("INTROSUMM_DATA_DIR")->required();
  train_cmd->add_option("--train-split", train_opt.train_split)->capture_default_str();
  train_cmd->add_option("--val-split", train_opt.val_split)->capture_default_str();
  train_cmd->add_option("--labels", train_opt.labels_path)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--provider", train_opt.provider, "tfidf|external")->capture_default_str();
  train_cmd->add_option("--embeddings", train_opt.embeddings);
  train_cmd->add_option("--dims", train_opt.dims, "Representation dimension")->capture_default_str();
  train_cmd->add_option("--mode", train_opt.mode, "tstr|ext|noguide")->capture_default_str();
  train_cmd->add_option("--k", train_opt.config.k)->capture_default_str();
  train_cmd->add_option("--alpha", train_opt.config.alpha)->capture_default_str();
  train_cmd->add_option("--lr", train_opt.config.learning_rate)->capture_default_str();
  train_cmd->add_option("--steps", train_opt.config.max_steps)->capture_default_str();
  train_cmd->add_option("--val-interval", train_opt.config.val_interval)->capture_default_str();
  train_cmd->add_option("--val-budget", train_opt.config.val_budget_words)->capture_default_str();
  train_cmd->add_option("--seed", train_opt.config.seed)->capture_default_str();
  train_cmd->add_option("--out", train_opt.out_ckpt)->required();
  train_cmd->add_option("--log", train_opt.out_log);

  SummarizeOptions summ_opt;
  CLI::App* summ_cmd = app.add_subcommand("summarize", "Generate summaries");
  summ_cmd->add_option("--model", summ_opt.model, "lexrank|lsa|ext|tstr|noguide|<ckpt path>")
      ->capture_default_str();
  summ_cmd->add_option("--ckpt", summ_opt.ckpt, "Checkpoint path for model names");
  summ_cmd->add_option("--corpus", summ_opt.corpus_dir)->envname("INTROSUMM_DATA_DIR")->required();
  summ_cmd->add_option("--split", summ_opt.split)->capture_default_str();
  summ_cmd->add_option("--budget", summ_opt.budget, "Word budget")->capture_default_str();
  summ_cmd->add_flag("--serial", summ_opt.serial, "Disable per-document parallelism");
  summ_cmd->add_option("--out", summ_opt.out)->required();

  EvalOptions eval_opt;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions, compare two systems");
  eval_cmd->add_option("--pred", eval_opt.preds)->required()->expected(1, 2);
  eval_cmd->add_option("--corpus", eval_opt.corpus_dir)->envname("INTROSUMM_DATA_DIR")->required();
  eval_cmd->add_option("--split", eval_opt.split)->capture_default_str();
  eval_cmd->add_option("--level", eval_opt.level)->capture_default_str();

  RougeOptions rouge_opt;
  CLI::App* rouge_cmd = app.add_subcommand("rouge", "ROUGE report for two text files");
  rouge_cmd->add_option("--cand", rouge_opt.cand)->required()->check(CLI::ExistingFile);
  rouge_cmd->add_option("--ref", rouge_opt.ref)->required()->check(CLI::ExistingFile);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help text or the parse error
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth_cmd) return run_synth(synth_opt);
    if (*ingest_cmd) return run_ingest(ingest_opt);
    if (*label_cmd) return run_label(label_opt);
    if (*train_cmd) return run_train(train_opt);
    if (*summ_cmd) return run_summarize(summ_opt);
    if (*eval_cmd) return run_eval(eval_opt);
    if (*rouge_cmd) return run_rouge(rouge_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace introsumm
