#pragma once

// Silver sentence labels from reviewer formatting prefixes. BeerAdvocate
// reviewers often open segments with "A:" (appearance), "S:" (smell, i.e.
// aroma), "M:" (mouthfeel, i.e. palate) and "T:" (taste).

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "saam/errors.hpp"
#include "saam/text/document.hpp"

namespace saam {

inline std::string keyword_label_for_token(const std::string& first_token, const std::string& scheme) {
  if (scheme != "beer") throw ConfigError("unknown keyword scheme: " + scheme);
  if (first_token.size() != 2 || first_token[1] != ':') return kUnlabeled;
  switch (std::tolower(static_cast<unsigned char>(first_token[0]))) {
    case 'a': return "Appearance";
    case 's': return "Aroma";
    case 'm': return "Palate";
    case 't': return "Taste";
    default: return kUnlabeled;
  }
}

inline std::vector<std::string> keyword_label_sentences(const ReviewDocument& doc, const std::string& scheme = "beer") {
  if (scheme != "beer") throw ConfigError("unknown keyword scheme: " + scheme);
  std::vector<std::string> labels;
  labels.reserve(doc.tokens.size());
  for (const auto& sentence : doc.tokens) {
    labels.push_back(sentence.empty() ? kUnlabeled : keyword_label_for_token(sentence.front(), scheme));
  }
  return labels;
}

}  // namespace saam
