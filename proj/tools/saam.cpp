// saam: command-line front end.
//
//   saam prepare   corpus -> train/dev/test splits + vocabulary
//   saam train     config + prepared data -> checkpoint + history
//   saam eval      checkpoint + split -> metric report
//   saam attribute checkpoint + corpus -> per-sentence attribution dump
//   saam snippets  checkpoint + corpus -> per-aspect extreme sentences
//   saam selftest  gradient checks and head oracles
//   saam synth     synthetic separable-aspect corpus
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "saam/saam.hpp"

#ifndef SAAM_VERSION
#define SAAM_VERSION "0.1.0"
#endif

namespace fs = std::filesystem;
using saam::ojson;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunManifest {
  std::string command;
  ojson config = ojson::object();
  std::uint64_t seed = 0;
  ojson inputs = ojson::object();
  ojson outputs = ojson::object();
  ojson counts = ojson::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const fs::path& path) const {
    ojson j;
    j["command"] = command;
    j["version"] = SAAM_VERSION;
    j["seed"] = seed;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    if (!counts.empty()) j["counts"] = counts;
    j["duration_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text(path, j.dump(2) + "\n");
  }

  static void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw saam::DataError("cannot write " + path.string());
    out << text;
  }
};

void write_text(const fs::path& path, const std::string& text) { RunManifest::write_text(path, text); }

ojson read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw saam::DataError("cannot read " + path);
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw saam::ConfigError(path + ": invalid JSON (" + e.what() + ")");
  }
}

fs::path manifest_path(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

// Vocabulary beside the data file unless given explicitly.
std::string resolve_vocab(const std::string& explicit_path, const std::string& data_path) {
  if (!explicit_path.empty()) return explicit_path;
  return (fs::path(data_path).parent_path() / "vocab.tsv").string();
}

struct LoadedModel {
  saam::Checkpoint checkpoint;
  saam::SaamModel model;
  saam::Vocabulary vocab;
};

LoadedModel load_model(const std::string& ckpt_path, const std::string& vocab_path) {
  auto vocab = saam::Vocabulary::load(vocab_path);
  auto ckpt = saam::load_checkpoint(ckpt_path, vocab.hash());
  auto model = saam::model_from_checkpoint(ckpt);
  return {std::move(ckpt), std::move(model), std::move(vocab)};
}

std::vector<saam::ReviewDocument> load_docs(const std::string& path, const saam::AspectSet& aspects,
                                            const saam::Vocabulary& vocab) {
  auto corpus = saam::read_corpus(path, aspects);
  vocab.encode(corpus.docs);
  return corpus.docs;
}

// ---- prepare ----

struct PrepareArgs {
  std::string corpus, out_dir, keyword_scheme;
  std::size_t min_sentences = 4;
  std::optional<std::size_t> dev_size;
  std::uint64_t seed = 1;
  std::size_t min_freq = 1;
};

int cmd_prepare(const PrepareArgs& a) {
  RunManifest m;
  m.command = "prepare";
  m.seed = a.seed;
  auto corpus = saam::read_corpus(a.corpus);
  saam::SplitOptions opts;
  opts.min_sentences = a.min_sentences;
  opts.dev_size = a.dev_size;
  auto splits = saam::split_corpus(corpus.docs, a.seed, opts);
  if (splits.dropped_unrated > 0) {
    std::cerr << "warning: skipped " << splits.dropped_unrated << " record(s) with unrated aspects\n";
  }
  const auto vocab = saam::Vocabulary::build(splits.train, a.min_freq);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  saam::write_corpus((dir / "train.jsonl").string(), splits.train, corpus.aspects);
  saam::write_corpus((dir / "dev.jsonl").string(), splits.dev, corpus.aspects);
  saam::write_corpus((dir / "test.jsonl").string(), splits.test, corpus.aspects);
  vocab.save((dir / "vocab.tsv").string());
  m.outputs["train"] = (dir / "train.jsonl").string();
  m.outputs["dev"] = (dir / "dev.jsonl").string();
  m.outputs["test"] = (dir / "test.jsonl").string();
  m.outputs["vocab"] = (dir / "vocab.tsv").string();

  if (!a.keyword_scheme.empty()) {
    std::string labels;
    for (const auto* split : {&splits.train, &splits.dev, &splits.test})
      for (const auto& doc : *split) {
        ojson rec;
        rec["doc_id"] = doc.doc_id;
        rec["sentence_labels"] = saam::keyword_label_sentences(doc, a.keyword_scheme);
        labels += rec.dump() + "\n";
      }
    write_text(dir / "silver_labels.jsonl", labels);
    m.outputs["silver_labels"] = (dir / "silver_labels.jsonl").string();
  }

  m.config = {{"min_sentences", a.min_sentences},
              {"dev_size", a.dev_size ? ojson(*a.dev_size) : ojson(nullptr)},
              {"keyword_scheme", a.keyword_scheme},
              {"min_freq", a.min_freq}};
  m.inputs["corpus"] = a.corpus;
  m.counts = {{"records", corpus.docs.size()},
              {"train", splits.train.size()},
              {"dev", splits.dev.size()},
              {"test", splits.test.size()},
              {"dropped_short", splits.dropped_short},
              {"dropped_unrated", splits.dropped_unrated},
              {"vocabulary", vocab.size()}};
  m.write(dir / "manifest.json");
  std::cout << "train " << splits.train.size() << ", dev " << splits.dev.size() << ", test " << splits.test.size()
            << ", vocabulary " << vocab.size() << "\n";
  return kOk;
}

// ---- train ----

struct TrainArgs {
  std::string config, data_dir, out;
  std::optional<std::string> variant, encoder, optimizer;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs, batch_size, patience;
  std::optional<double> lr;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a) {
  RunManifest m;
  m.command = "train";
  ojson cfg = a.config.empty() ? ojson::object() : read_json_file(a.config);
  for (const auto& [key, value] : cfg.items()) {
    if (key != "model" && key != "train") throw saam::ConfigError("unknown config key: " + key);
  }
  ojson model_json = cfg.value("model", ojson::object());
  ojson train_json = cfg.value("train", ojson::object());
  if (a.variant) model_json["variant"] = *a.variant;
  if (a.encoder) model_json["encoder"]["kind"] = *a.encoder;
  if (a.optimizer) train_json["optimizer"] = *a.optimizer;
  if (a.seed) train_json["seed"] = *a.seed;
  if (a.epochs) train_json["max_epochs"] = *a.epochs;
  if (a.batch_size) train_json["batch_size"] = *a.batch_size;
  if (a.patience) train_json["patience"] = *a.patience;
  if (a.lr) train_json["learning_rate"] = *a.lr;

  const fs::path dir(a.data_dir);
  const auto vocab = saam::Vocabulary::load((dir / "vocab.tsv").string());
  auto train_corpus = saam::read_corpus((dir / "train.jsonl").string());
  if (train_corpus.docs.empty()) throw saam::DataError("training split is empty");
  auto dev = saam::read_corpus((dir / "dev.jsonl").string(), train_corpus.aspects).docs;
  vocab.encode(train_corpus.docs);
  vocab.encode(dev);

  // The aspect set and vocabulary size always come from the data.
  model_json["aspects"] = train_corpus.aspects.names();
  model_json["vocab_size"] = vocab.size();
  const auto model_cfg = saam::ModelConfig::from_json(model_json);
  const auto train_cfg = saam::TrainConfig::from_json(train_json);

  saam::SaamModel model(model_cfg, train_cfg.seed);
  const auto result = saam::train(model, train_corpus.docs, dev, train_cfg, [&](const saam::EpochRecord& r) {
    if (!a.quiet) {
      std::cout << "epoch " << r.epoch << "  train_loss " << saam::format_fixed(r.train_loss) << "  dev_loss "
                << saam::format_fixed(r.dev_loss) << "  dev_metric " << saam::format_fixed(r.dev_metric) << "\n";
    }
  });

  const auto ckpt = saam::make_checkpoint(model, vocab.hash(), train_cfg.to_json());
  saam::save_checkpoint(a.out, ckpt);
  const std::string history_path = a.out + ".history.json";
  write_text(history_path, saam::history_json(result).dump(2) + "\n");

  m.seed = train_cfg.seed;
  m.config = ckpt.config;
  m.inputs = {{"config", a.config}, {"data", a.data_dir}};
  m.outputs = {{"checkpoint", a.out}, {"history", history_path}};
  m.counts = {{"epochs", result.history.size()}, {"best_epoch", result.best_epoch}};
  m.write(manifest_path(a.out));
  std::cout << "best epoch " << result.best_epoch << ", dev loss " << saam::format_fixed(result.best_dev_loss) << "\n";
  return kOk;
}

// ---- eval ----

struct LabelFile {
  std::map<std::string, std::vector<std::string>> by_doc;
};

LabelFile read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw saam::DataError("cannot read labels file " + path);
  LabelFile f;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson rec;
    try {
      rec = ojson::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw saam::DataError(path + ": line " + std::to_string(n) + ": invalid JSON");
    }
    if (!rec.is_object() || !rec.contains("doc_id") || !rec.contains("sentence_labels")) {
      throw saam::DataError(path + ": line " + std::to_string(n) + ": expected doc_id and sentence_labels");
    }
    try {
      f.by_doc[rec["doc_id"].get<std::string>()] = rec["sentence_labels"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception&) {
      throw saam::DataError(path + ": line " + std::to_string(n) + ": malformed doc_id or sentence_labels");
    }
  }
  return f;
}

struct EvalArgs {
  std::string checkpoint, data, vocab, labels, out, task;
};

int cmd_eval(const EvalArgs& a) {
  RunManifest m;
  m.command = "eval";
  auto loaded = load_model(a.checkpoint, resolve_vocab(a.vocab, a.data));
  const auto& cfg = loaded.model.config();
  if (!a.task.empty()) {
    const bool cls = cfg.task() == saam::Task::kClassification;
    if ((a.task == "classification") != cls) {
      throw UsageError("--task " + a.task + " does not match the " + (cls ? "classification" : "regression") +
                       " checkpoint (" + saam::to_string(cfg.variant) + ")");
    }
  }
  auto docs = load_docs(a.data, cfg.aspects, loaded.vocab);
  if (docs.empty()) throw saam::DataError("no documents in " + a.data);
  const bool with_labels = !a.labels.empty();
  if (with_labels) {
    if (!saam::has_attribution(cfg.variant)) {
      throw UsageError("--attribution-labels needs an attribution variant, got " + saam::to_string(cfg.variant));
    }
    const auto labels = read_labels(a.labels);
    for (auto& d : docs) {
      auto it = labels.by_doc.find(d.doc_id);
      d.sentence_labels = it == labels.by_doc.end() ? std::vector<std::string>{} : it->second;
    }
  }
  const auto ev = saam::evaluate_model(loaded.model, docs, with_labels);
  const std::string text = saam::render_text(ev.report);
  std::cout << text;
  const std::string prefix = a.out.empty() ? a.data + ".metrics" : a.out;
  write_text(prefix + ".txt", text);
  write_text(prefix + ".json", saam::render_json(ev.report).dump(2) + "\n");

  m.config = loaded.checkpoint.config;
  m.inputs = {{"checkpoint", a.checkpoint}, {"data", a.data}, {"labels", a.labels}};
  m.outputs = {{"text", prefix + ".txt"}, {"json", prefix + ".json"}};
  m.counts = {{"documents", docs.size()}, {"labeled_sentences", ev.attribution.labeled}};
  m.write(manifest_path(prefix));
  return kOk;
}

// ---- attribute ----

struct AttributeArgs {
  std::string checkpoint, corpus, vocab, out;
};

int cmd_attribute(const AttributeArgs& a) {
  RunManifest m;
  m.command = "attribute";
  auto loaded = load_model(a.checkpoint, resolve_vocab(a.vocab, a.corpus));
  const auto& cfg = loaded.model.config();
  if (!saam::has_attribution(cfg.variant)) {
    throw UsageError("variant " + saam::to_string(cfg.variant) + " has no sentence attribution");
  }
  const auto docs = load_docs(a.corpus, cfg.aspects, loaded.vocab);
  const auto batch = saam::make_batch(docs, cfg.s_max, cfg.t_max);
  std::string dump;
  std::size_t sentences = 0;
  for (std::size_t b = 0; b < docs.size(); ++b) {
    const auto inf = loaded.model.infer(batch.document(b));
    const auto& attr = inf.attribution;
    const auto labels = saam::extract_attribution(attr, cfg.aspects);
    for (std::size_t k = 0; k < attr.sentences(); ++k) {
      ojson rec;
      rec["doc_id"] = docs[b].doc_id;
      rec["sentence_index"] = attr.slots[k];
      rec["text"] = saam::sentence_text(docs[b], attr.slots[k]);
      ojson dist = ojson::object();
      for (std::size_t s = 0; s < attr.aspect_dist[k].size(); ++s) {
        dist[saam::slot_label(cfg.variant, cfg.aspects, s)] = attr.aspect_dist[k][s];
      }
      rec["aspect_distribution"] = dist;
      rec["score"] = attr.rating_scores[k].size() == 1 ? ojson(attr.rating_scores[k][0]) : ojson(attr.rating_scores[k]);
      rec["label"] = labels[k].label;
      rec["confidence"] = labels[k].confidence;
      rec["annotated"] = saam::render_annotated_sentence(docs[b], attr, cfg.aspects, k);
      dump += rec.dump() + "\n";
      ++sentences;
    }
  }
  write_text(a.out, dump);
  m.config = loaded.checkpoint.config;
  m.inputs = {{"checkpoint", a.checkpoint}, {"corpus", a.corpus}};
  m.outputs = {{"attribution", a.out}};
  m.counts = {{"documents", docs.size()}, {"sentences", sentences}};
  m.write(manifest_path(a.out));
  return kOk;
}

// ---- snippets ----

struct SnippetArgs {
  std::string checkpoint, corpus, vocab, out, aspect, polarity = "lowest";
  double tau = saam::kDefaultTau;
  std::optional<std::size_t> top_k;
  bool expected_value = false;
};

int cmd_snippets(const SnippetArgs& a) {
  RunManifest m;
  m.command = "snippets";
  auto loaded = load_model(a.checkpoint, resolve_vocab(a.vocab, a.corpus));
  const auto& cfg = loaded.model.config();
  if (!saam::has_attribution(cfg.variant)) {
    throw UsageError("variant " + saam::to_string(cfg.variant) + " has no sentence attribution");
  }
  if (cfg.task() == saam::Task::kClassification && !a.expected_value) {
    throw UsageError("classification checkpoint: pass --expected-value to rank by expected class value");
  }
  saam::SnippetQuery q;
  q.aspect = a.aspect;
  q.polarity = saam::parse_polarity(a.polarity);
  q.tau = a.tau;
  q.top_k = a.top_k;
  cfg.aspects.index_of(a.aspect);

  const auto docs = load_docs(a.corpus, cfg.aspects, loaded.vocab);
  const auto batch = saam::make_batch(docs, cfg.s_max, cfg.t_max);
  std::string text, jsonl;
  std::size_t count = 0;
  for (std::size_t b = 0; b < docs.size(); ++b) {
    const auto inf = loaded.model.infer(batch.document(b));
    for (const auto& s : saam::extract_snippets(docs[b], inf.attribution, cfg.aspects, q)) {
      text += saam::render_snippet_line(s) + "\n";
      jsonl += saam::snippet_json(s).dump() + "\n";
      ++count;
    }
  }
  if (count == 0) std::cerr << "notice: no sentence passed tau=" << a.tau << " for aspect " << a.aspect << "\n";
  std::cout << text;
  write_text(a.out, jsonl);
  m.config = loaded.checkpoint.config;
  m.config["snippets"] = {{"aspect", a.aspect}, {"polarity", a.polarity}, {"tau", a.tau},
                          {"top_k", a.top_k ? ojson(*a.top_k) : ojson(nullptr)}, {"expected_value", a.expected_value}};
  m.inputs = {{"checkpoint", a.checkpoint}, {"corpus", a.corpus}};
  m.outputs = {{"snippets", a.out}};
  m.counts = {{"documents", docs.size()}, {"snippets", count}};
  m.write(manifest_path(a.out));
  return kOk;
}

// ---- selftest ----

struct SelftestArgs {
  std::string corrupt, manifest;
};

int cmd_selftest(const SelftestArgs& a) {
  RunManifest m;
  m.command = "selftest";
  saam::selftest::SelftestOptions opts;
  opts.corrupt_check = a.corrupt;
  const auto report = saam::selftest::run_selftest(opts);
  std::cout << saam::selftest::render_selftest(report);
  for (const auto& name : report.failures()) std::cerr << "failed check: " << name << "\n";
  if (!a.manifest.empty()) {
    m.config = {{"corrupt", a.corrupt}};
    m.counts = {{"checks", report.checks.size()}, {"failures", report.failures().size()}};
    m.write(a.manifest);
  }
  return report.passed() ? kOk : kNumeric;
}

// ---- synth ----

struct SynthArgs {
  std::string out;
  saam::SyntheticSpec spec;
};

int cmd_synth(const SynthArgs& a) {
  RunManifest m;
  m.command = "synth";
  m.seed = a.spec.seed;
  const auto corpus = saam::generate_synthetic_corpus(a.spec);
  saam::write_corpus(a.out, corpus.docs, corpus.aspects);
  m.config = {{"aspects", a.spec.num_aspects},
              {"docs", a.spec.docs},
              {"vocab_per_aspect", a.spec.vocab_per_aspect},
              {"sentences_per_aspect", a.spec.sentences_per_aspect},
              {"shared_keyword_fraction", a.spec.shared_keyword_fraction}};
  m.outputs = {{"corpus", a.out}};
  m.counts = {{"documents", corpus.docs.size()}};
  m.write(manifest_path(a.out));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment-aspect attribution models for multi-aspect review rating"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SAAM_VERSION);

  PrepareArgs prep;
  auto* p = app.add_subcommand("prepare", "split a corpus and build the vocabulary");
  p->add_option("corpus", prep.corpus, "corpus file (one JSON record per line)")->required();
  p->add_option("--out", prep.out_dir, "output directory")->required();
  p->add_option("--min-sentences", prep.min_sentences, "keep documents with at least this many sentences");
  p->add_option("--dev-size", prep.dev_size, "development set size (default min(1000, 10% of train))");
  p->add_option("--seed", prep.seed, "shuffle seed");
  p->add_option("--keyword-scheme", prep.keyword_scheme, "write silver sentence labels (scheme: beer)");
  p->add_option("--min-freq", prep.min_freq, "minimum token frequency");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a model");
  t->add_option("--config", tr.config, "JSON config with optional \"model\" and \"train\" sections");
  t->add_option("--data", tr.data_dir, "directory written by prepare")->required();
  t->add_option("--out", tr.out, "checkpoint path")->required();
  t->add_option("--variant", tr.variant, "C1, C2, R, flat-C or flat-R");
  t->add_option("--encoder", tr.encoder, "cnn, gru or mean");
  t->add_option("--optimizer", tr.optimizer, "adam or sgd");
  t->add_option("--seed", tr.seed);
  t->add_option("--epochs", tr.epochs, "maximum epochs");
  t->add_option("--batch-size", tr.batch_size);
  t->add_option("--patience", tr.patience);
  t->add_option("--lr", tr.lr, "learning rate");
  t->add_flag("--quiet", tr.quiet, "no per-epoch output");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "document-level metrics and attribution accuracy");
  e->add_option("--checkpoint", ev.checkpoint)->required();
  e->add_option("--data", ev.data, "split file")->required();
  e->add_option("--vocab", ev.vocab, "vocabulary (default: vocab.tsv beside the data)");
  e->add_option("--attribution-labels", ev.labels, "sentence labels, one {doc_id, sentence_labels} per line");
  e->add_option("--out", ev.out, "output prefix for .txt/.json reports");
  e->add_option("--task", ev.task, "expected task")->check(CLI::IsMember({"classification", "regression"}));

  AttributeArgs at;
  auto* a = app.add_subcommand("attribute", "per-sentence attribution dump");
  a->add_option("--checkpoint", at.checkpoint)->required();
  a->add_option("--corpus", at.corpus)->required();
  a->add_option("--vocab", at.vocab);
  a->add_option("--out", at.out)->required();

  SnippetArgs sn;
  auto* s = app.add_subcommand("snippets", "extreme-sentiment snippets per aspect");
  s->add_option("--checkpoint", sn.checkpoint)->required();
  s->add_option("--corpus", sn.corpus)->required();
  s->add_option("--vocab", sn.vocab);
  s->add_option("--out", sn.out)->required();
  s->add_option("--aspect", sn.aspect)->required();
  s->add_option("--polarity", sn.polarity)->check(CLI::IsMember({"lowest", "highest"}));
  s->add_option("--tau", sn.tau, "minimum attribution weight");
  s->add_option("--top-k", sn.top_k);
  s->add_flag("--expected-value", sn.expected_value, "rank classification sentences by expected class value");

  SelftestArgs st;
  auto* x = app.add_subcommand("selftest", "gradient checks and head oracles");
  x->add_option("--corrupt", st.corrupt, "scale the gradient of the named check (fixture)");
  x->add_option("--manifest", st.manifest, "write a run manifest here");

  SynthArgs sy;
  auto* y = app.add_subcommand("synth", "generate a synthetic corpus");
  y->add_option("--out", sy.out)->required();
  y->add_option("--aspects", sy.spec.num_aspects);
  y->add_option("--docs", sy.spec.docs);
  y->add_option("--seed", sy.spec.seed);
  y->add_option("--vocab-per-aspect", sy.spec.vocab_per_aspect);
  y->add_option("--sentences-per-aspect", sy.spec.sentences_per_aspect);
  y->add_option("--overlap", sy.spec.shared_keyword_fraction, "fraction of keywords drawn from a shared pool");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    if (*p) return cmd_prepare(prep);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*a) return cmd_attribute(at);
    if (*s) return cmd_snippets(sn);
    if (*x) return cmd_selftest(st);
    if (*y) return cmd_synth(sy);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const saam::ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const saam::NumericError& err) {
    std::cerr << "numeric error: " << err.what() << "\n";
    return kNumeric;
  } catch (const std::exception& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return kData;
  }
  return kUsage;
}
