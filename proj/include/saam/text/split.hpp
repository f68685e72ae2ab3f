#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saam/errors.hpp"
#include "saam/rng.hpp"
#include "saam/text/document.hpp"

namespace saam {

struct SplitOptions {
  std::size_t min_sentences = 4;          // keep reviews with more than three sentences
  std::optional<std::size_t> dev_size;    // default: min(1000, 10% of train)
  double train_fraction = 0.75;
};

struct CorpusSplits {
  std::vector<ReviewDocument> train, dev, test;
  std::size_t dropped_short = 0;
  std::size_t dropped_unrated = 0;
};

inline CorpusSplits split_corpus(const std::vector<ReviewDocument>& corpus, std::uint64_t seed,
                                 const SplitOptions& options = {}) {
  CorpusSplits out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus[i];
    if (d.sentence_count() < options.min_sentences) {
      ++out.dropped_short;
    } else if (!d.all_aspects_rated()) {
      ++out.dropped_unrated;
    } else {
      kept.push_back(i);
    }
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(kept));

  const std::size_t n = kept.size();
  const auto n_train_total = static_cast<std::size_t>(static_cast<double>(n) * options.train_fraction);
  const std::size_t n_test = n - n_train_total;
  const std::size_t n_dev = options.dev_size.value_or(std::min<std::size_t>(1000, n_train_total / 10));
  if (n_test == 0 || n_train_total <= n_dev) {
    throw DataError("insufficient documents after filtering: " + std::to_string(n) + " qualifying, dev size " +
                    std::to_string(n_dev));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto& doc = corpus[kept[k]];
    if (k < n_dev) {
      out.dev.push_back(doc);
    } else if (k < n_train_total) {
      out.train.push_back(doc);
    } else {
      out.test.push_back(doc);
    }
  }
  return out;
}

}  // namespace saam
