#pragma once

// Rule-based sentence segmentation and tokenization for review prose.
//
// Sentences end at '.', '!' or '?' followed by whitespace (or end of text).
// Tokens are lowercased runs of word characters: ASCII alphanumerics, '_',
// '\'' and any non-ASCII byte. Other punctuation separates tokens and is
// dropped, except a leading single-letter "x:" marker, which is kept as one
// token so formatting prefixes such as "A:" survive for keyword labeling.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace saam::text {

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '\'' || u >= 0x80;
}

inline char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline std::vector<std::string> split_sentences(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto piece = detail::trim(raw.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    while (j < raw.size() && (raw[j] == '.' || raw[j] == '!' || raw[j] == '?')) ++j;
    if (j == raw.size() || detail::is_space(raw[j])) {
      emit(j);
      start = j;
      i = j;
    }
  }
  if (start < raw.size()) emit(raw.size());
  return out;
}

inline std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n && detail::is_space(sentence[i])) ++i;
  // Leading "x:" prefix marker.
  if (i + 1 < n && std::isalpha(static_cast<unsigned char>(sentence[i])) && sentence[i + 1] == ':') {
    tokens.push_back({detail::lower(sentence[i]), ':'});
    i += 2;
  }
  std::string current;
  // Quote marks wrapping a word are not part of it.
  auto flush = [&] {
    const auto b = current.find_first_not_of('\'');
    if (b != std::string::npos) {
      const auto e = current.find_last_not_of('\'');
      tokens.push_back(current.substr(b, e - b + 1));
    }
    current.clear();
  };
  for (; i < n; ++i) {
    const char c = sentence[i];
    if (detail::is_word_char(c)) {
      current.push_back(detail::lower(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace saam::text
