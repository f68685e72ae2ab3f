#pragma once

// Line-delimited JSON corpus files. One document per line:
//   {"doc_id": "...", "text": "..." | "sentences": [...], "overall": 4,
//    "aspects": {"Room": 3, ...}, "sentence_labels": [...]}

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "saam/errors.hpp"
#include "saam/text/document.hpp"
#include "saam/text/tokenizer.hpp"

namespace saam {

using ojson = nlohmann::ordered_json;

struct Corpus {
  AspectSet aspects;
  std::vector<ReviewDocument> docs;
};

namespace detail {

inline double parse_rating(const ojson& v, const std::string& what, std::size_t line) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw DataError("line " + std::to_string(line) + ": " + what + " is not a number");
  return v.get<double>();
}

}  // namespace detail

// Builds a document from sentence strings; sentences that tokenize to nothing
// are dropped together with their labels.
inline void set_sentences(ReviewDocument& doc, const std::vector<std::string>& sentences,
                          const std::vector<std::string>& labels = {}) {
  doc.sentence_texts.clear();
  doc.tokens.clear();
  doc.token_ids.clear();
  doc.sentence_labels.clear();
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto toks = text::tokenize(sentences[i]);
    if (toks.empty()) continue;
    doc.sentence_texts.push_back(sentences[i]);
    doc.tokens.push_back(std::move(toks));
    if (!labels.empty()) doc.sentence_labels.push_back(labels[i]);
  }
}

inline ReviewDocument parse_record(const ojson& rec, const AspectSet& aspects, std::size_t line) {
  const auto where = "line " + std::to_string(line) + ": ";
  if (!rec.is_object()) throw DataError(where + "record is not an object");
  ReviewDocument doc;
  if (!rec.contains("doc_id") || !rec["doc_id"].is_string()) throw DataError(where + "missing string field doc_id");
  doc.doc_id = rec["doc_id"].get<std::string>();
  if (!rec.contains("overall")) throw DataError(where + "missing field overall");
  doc.overall_rating = detail::parse_rating(rec["overall"], "overall", line);
  if (!std::isfinite(doc.overall_rating)) throw DataError(where + "overall rating is null");

  std::vector<std::string> labels;
  if (rec.contains("sentence_labels")) {
    if (!rec["sentence_labels"].is_array()) throw DataError(where + "sentence_labels must be a list");
    for (const auto& l : rec["sentence_labels"]) {
      if (!l.is_string()) throw DataError(where + "sentence_labels entries must be strings");
      labels.push_back(l.get<std::string>());
    }
  }
  std::vector<std::string> sentences;
  if (rec.contains("sentences")) {
    if (!rec["sentences"].is_array()) throw DataError(where + "sentences must be a list");
    for (const auto& s : rec["sentences"]) {
      if (!s.is_string()) throw DataError(where + "sentences entries must be strings");
      sentences.push_back(s.get<std::string>());
    }
    if (!labels.empty() && labels.size() != sentences.size()) {
      throw DataError(where + "sentence_labels length differs from sentences");
    }
  } else if (rec.contains("text")) {
    if (!rec["text"].is_string()) throw DataError(where + "text must be a string");
    sentences = text::split_sentences(rec["text"].get<std::string>());
    if (!labels.empty() && labels.size() != sentences.size()) {
      throw DataError(where + "sentence_labels length differs from segmented text");
    }
  } else {
    throw DataError(where + "record needs text or sentences");
  }
  set_sentences(doc, sentences, labels);

  doc.aspect_ratings.assign(aspects.size(), std::numeric_limits<double>::quiet_NaN());
  if (rec.contains("aspects")) {
    if (!rec["aspects"].is_object()) throw DataError(where + "aspects must be an object");
    for (std::size_t j = 0; j < aspects.size(); ++j) {
      const auto& name = aspects.name(j);
      if (rec["aspects"].contains(name)) {
        doc.aspect_ratings[j] = detail::parse_rating(rec["aspects"][name], "aspect " + name, line);
      }
    }
  }
  return doc;
}

inline ojson record_json(const ReviewDocument& doc, const AspectSet& aspects) {
  ojson rec;
  rec["doc_id"] = doc.doc_id;
  rec["sentences"] = doc.sentence_texts;
  rec["overall"] = doc.overall_rating;
  ojson asp = ojson::object();
  for (std::size_t j = 0; j < aspects.size(); ++j) {
    const double r = j < doc.aspect_ratings.size() ? doc.aspect_ratings[j] : std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(r)) {
      asp[aspects.name(j)] = r;
    } else {
      asp[aspects.name(j)] = nullptr;
    }
  }
  rec["aspects"] = asp;
  if (!doc.sentence_labels.empty()) rec["sentence_labels"] = doc.sentence_labels;
  return rec;
}

// Reads a corpus. When `aspects` is not given, the aspect order is taken
// from the first record's "aspects" object.
inline Corpus read_corpus_stream(std::istream& in, std::optional<AspectSet> aspects = std::nullopt) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson rec;
    try {
      rec = ojson::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
    }
    if (!aspects) {
      if (!rec.is_object() || !rec.contains("aspects") || !rec["aspects"].is_object() || rec["aspects"].empty()) {
        throw DataError("line " + std::to_string(line_no) + ": cannot infer aspect set from record");
      }
      std::vector<std::string> names;
      for (const auto& [k, v] : rec["aspects"].items()) names.push_back(k);
      aspects = AspectSet(names);
    }
    corpus.docs.push_back(parse_record(rec, *aspects, line_no));
  }
  if (aspects) corpus.aspects = *aspects;
  return corpus;
}

inline Corpus read_corpus(const std::string& path, std::optional<AspectSet> aspects = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read corpus file " + path);
  try {
    return read_corpus_stream(in, std::move(aspects));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline std::string serialize_corpus(const std::vector<ReviewDocument>& docs, const AspectSet& aspects) {
  std::ostringstream os;
  for (const auto& d : docs) os << record_json(d, aspects).dump() << '\n';
  return os.str();
}

inline void write_corpus(const std::string& path, const std::vector<ReviewDocument>& docs, const AspectSet& aspects) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path);
  out << serialize_corpus(docs, aspects);
}

}  // namespace saam
