#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "saam/errors.hpp"
#include "saam/text/document.hpp"
#include "saam/text/vocabulary.hpp"

namespace saam {

// Read-only view of one document's slots inside a PaddedBatch.
struct DocumentSlots {
  std::size_t s_max = 0;
  std::size_t t_max = 0;
  std::span<const int> token_ids;          // s_max * t_max
  std::span<const std::uint8_t> token_mask;  // s_max * t_max
  std::span<const std::uint8_t> sentence_mask;  // s_max

  std::span<const int> sentence_ids(std::size_t s) const { return token_ids.subspan(s * t_max, t_max); }
  std::span<const std::uint8_t> sentence_token_mask(std::size_t s) const { return token_mask.subspan(s * t_max, t_max); }
  std::size_t real_sentences() const {
    std::size_t n = 0;
    for (auto m : sentence_mask) n += m;
    return n;
  }
};

struct PaddedBatch {
  std::size_t batch = 0;
  std::size_t s_max = 0;
  std::size_t t_max = 0;
  std::vector<int> token_ids;             // batch x s_max x t_max
  std::vector<std::uint8_t> token_mask;   // batch x s_max x t_max
  std::vector<std::uint8_t> sentence_mask;  // batch x s_max
  std::vector<double> overall;            // batch
  std::vector<double> aspects;            // batch x |A|
  std::size_t num_aspects = 0;

  DocumentSlots document(std::size_t b) const {
    const std::size_t stride = s_max * t_max;
    return DocumentSlots{s_max, t_max,
                         std::span<const int>(token_ids).subspan(b * stride, stride),
                         std::span<const std::uint8_t>(token_mask).subspan(b * stride, stride),
                         std::span<const std::uint8_t>(sentence_mask).subspan(b * s_max, s_max)};
  }

  std::span<const double> aspect_targets(std::size_t b) const {
    return std::span<const double>(aspects).subspan(b * num_aspects, num_aspects);
  }
};

// Sentences past s_max and tokens past t_max are truncated; pads carry id 0.
inline PaddedBatch make_batch(const std::vector<ReviewDocument>& docs, std::size_t s_max, std::size_t t_max) {
  if (s_max == 0 || t_max == 0) throw ConfigError("make_batch: S_max and T_max must be at least 1");
  PaddedBatch batch;
  batch.batch = docs.size();
  batch.s_max = s_max;
  batch.t_max = t_max;
  batch.num_aspects = docs.empty() ? 0 : docs.front().aspect_ratings.size();
  batch.token_ids.assign(docs.size() * s_max * t_max, Vocabulary::kPadId);
  batch.token_mask.assign(docs.size() * s_max * t_max, 0);
  batch.sentence_mask.assign(docs.size() * s_max, 0);
  for (std::size_t b = 0; b < docs.size(); ++b) {
    const auto& doc = docs[b];
    if (doc.token_ids.size() != doc.tokens.size()) {
      throw DataError("make_batch: document " + doc.doc_id + " has not been encoded with a vocabulary");
    }
    if (doc.aspect_ratings.size() != batch.num_aspects) {
      throw DataError("make_batch: document " + doc.doc_id + " has a different aspect count");
    }
    const std::size_t sentences = std::min(doc.token_ids.size(), s_max);
    for (std::size_t s = 0; s < sentences; ++s) {
      const auto& ids = doc.token_ids[s];
      const std::size_t n = std::min(ids.size(), t_max);
      for (std::size_t t = 0; t < n; ++t) {
        const std::size_t at = (b * s_max + s) * t_max + t;
        batch.token_ids[at] = ids[t];
        batch.token_mask[at] = 1;
      }
      batch.sentence_mask[b * s_max + s] = n > 0 ? 1 : 0;
    }
    batch.overall.push_back(doc.overall_rating);
    batch.aspects.insert(batch.aspects.end(), doc.aspect_ratings.begin(), doc.aspect_ratings.end());
  }
  return batch;
}

}  // namespace saam
