#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "saam/errors.hpp"

namespace saam {

// Label used for sentences with no gold/silver evidence; excluded from scoring.
inline const std::string kUnlabeled = "unlabeled";
// Label for sentences that belong to no rated aspect.
inline const std::string kNoneLabel = "none";

class AspectSet {
 public:
  AspectSet() = default;
  explicit AspectSet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ConfigError("aspect set must contain at least one aspect");
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (n.empty()) throw ConfigError("aspect names must be nonempty");
      if (!seen.insert(n).second) throw ConfigError("duplicate aspect name: " + n);
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t j) const { return names_.at(j); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t j = 0; j < names_.size(); ++j)
      if (names_[j] == name) return j;
    return std::nullopt;
  }

  std::size_t index_of(const std::string& name) const {
    if (auto j = find(name)) return *j;
    throw ConfigError("unknown aspect: " + name);
  }

  bool operator==(const AspectSet&) const = default;

 private:
  std::vector<std::string> names_;
};

inline AspectSet hotel_aspects() { return AspectSet({"Value", "Room", "Location", "Cleanliness", "Service"}); }
inline AspectSet beer_aspects() { return AspectSet({"Appearance", "Taste", "Palate", "Aroma"}); }

struct ReviewDocument {
  std::string doc_id;
  std::vector<std::string> sentence_texts;
  std::vector<std::vector<std::string>> tokens;  // lowercased tokens per sentence
  std::vector<std::vector<int>> token_ids;       // filled by Vocabulary::encode
  double overall_rating = 0.0;
  std::vector<double> aspect_ratings;  // NaN marks an unrated aspect
  std::vector<std::string> sentence_labels;  // optional; empty when absent

  std::size_t sentence_count() const { return tokens.size(); }

  bool all_aspects_rated() const {
    for (double r : aspect_ratings)
      if (!std::isfinite(r)) return false;
    return true;
  }
};

}  // namespace saam
