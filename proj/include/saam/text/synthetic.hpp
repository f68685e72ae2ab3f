#pragma once

// Synthetic multi-aspect review corpus with known sentence-level truth.
//
// Every sentence talks about exactly one aspect: it mixes keywords from that
// aspect's vocabulary with one sentiment token "sent_<r>_<k>" whose rating r
// equals the document's rating for that aspect. Overall = rounded mean of
// the aspect ratings.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "saam/errors.hpp"
#include "saam/rng.hpp"
#include "saam/text/corpus_io.hpp"
#include "saam/text/document.hpp"

namespace saam {

struct SyntheticSpec {
  std::size_t num_aspects = 2;
  std::size_t vocab_per_aspect = 6;
  std::size_t docs = 100;
  std::uint64_t seed = 1;
  std::size_t sentences_per_aspect = 1;
  std::size_t keywords_per_sentence = 2;
  std::size_t sentiment_variants = 3;
  int min_rating = 1;
  int max_rating = 5;
  // Probability that a keyword slot is filled from the pool shared by all
  // aspects instead of the sentence's own aspect vocabulary.
  double shared_keyword_fraction = 0.0;
  std::size_t shared_vocab = 6;
  // Optional explicit vocabularies / names; generated when empty.
  std::vector<std::vector<std::string>> aspect_vocabularies;
  std::vector<std::string> aspect_names;
};

inline std::string sentiment_token(int rating, std::size_t variant) {
  return "sent_" + std::to_string(rating) + "_" + std::to_string(variant);
}

inline Corpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.num_aspects == 0) throw ConfigError("synthetic corpus needs at least one aspect");
  if (spec.min_rating > spec.max_rating) throw ConfigError("synthetic corpus: min_rating > max_rating");
  if (spec.keywords_per_sentence == 0 || spec.sentiment_variants == 0) {
    throw ConfigError("synthetic corpus: keywords_per_sentence and sentiment_variants must be positive");
  }

  std::vector<std::string> names = spec.aspect_names;
  if (names.empty()) {
    for (std::size_t j = 0; j < spec.num_aspects; ++j) names.push_back("Aspect" + std::to_string(j + 1));
  }
  if (names.size() != spec.num_aspects) throw ConfigError("synthetic corpus: aspect_names size mismatch");

  auto vocabs = spec.aspect_vocabularies;
  if (vocabs.empty()) {
    for (std::size_t j = 0; j < spec.num_aspects; ++j) {
      std::vector<std::string> v;
      for (std::size_t k = 0; k < spec.vocab_per_aspect; ++k)
        v.push_back("kw" + std::to_string(j + 1) + "_" + std::to_string(k));
      vocabs.push_back(std::move(v));
    }
  }
  if (vocabs.size() != spec.num_aspects) throw ConfigError("synthetic corpus: vocabulary count mismatch");
  std::set<std::string> seen;
  for (const auto& v : vocabs) {
    if (v.empty()) throw ConfigError("synthetic corpus: empty aspect vocabulary");
    for (const auto& w : v) {
      if (!seen.insert(w).second) throw ConfigError("synthetic corpus: aspect vocabularies overlap on '" + w + "'");
    }
  }
  std::vector<std::string> shared;
  for (std::size_t k = 0; k < spec.shared_vocab; ++k) shared.push_back("common_" + std::to_string(k));

  Rng rng(spec.seed);
  Corpus corpus{AspectSet(names), {}};
  const auto rating_span = static_cast<std::size_t>(spec.max_rating - spec.min_rating + 1);
  for (std::size_t d = 0; d < spec.docs; ++d) {
    ReviewDocument doc;
    char id[32];
    std::snprintf(id, sizeof(id), "syn-%06zu", d);
    doc.doc_id = id;
    double total = 0.0;
    for (std::size_t j = 0; j < spec.num_aspects; ++j) {
      const int r = spec.min_rating + static_cast<int>(rng.index(rating_span));
      doc.aspect_ratings.push_back(r);
      total += r;
    }
    doc.overall_rating = std::round(total / static_cast<double>(spec.num_aspects));

    struct Draft {
      std::string text;
      std::string label;
    };
    std::vector<Draft> drafts;
    for (std::size_t j = 0; j < spec.num_aspects; ++j) {
      for (std::size_t s = 0; s < spec.sentences_per_aspect; ++s) {
        std::vector<std::string> words;
        for (std::size_t k = 0; k < spec.keywords_per_sentence; ++k) {
          if (!shared.empty() && rng.uniform() < spec.shared_keyword_fraction) {
            words.push_back(shared[rng.index(shared.size())]);
          } else {
            words.push_back(vocabs[j][rng.index(vocabs[j].size())]);
          }
        }
        words.push_back(sentiment_token(static_cast<int>(doc.aspect_ratings[j]), rng.index(spec.sentiment_variants)));
        rng.shuffle(std::span<std::string>(words));
        std::string text;
        for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
        drafts.push_back({text + ".", names[j]});
      }
    }
    rng.shuffle(std::span<Draft>(drafts));
    std::vector<std::string> sentences, labels;
    for (auto& dr : drafts) {
      sentences.push_back(dr.text);
      labels.push_back(dr.label);
    }
    set_sentences(doc, sentences, labels);
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace saam
