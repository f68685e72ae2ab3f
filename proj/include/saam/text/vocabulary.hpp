#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "saam/errors.hpp"
#include "saam/text/document.hpp"
#include "saam/text/tokenizer.hpp"

namespace saam {

using Digest = std::array<std::uint8_t, 32>;

inline Digest sha256(std::string_view bytes) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
    throw DataError("sha256 computation failed");
  }
  return out;
}

inline std::string digest_hex(const Digest& d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  for (auto b : d) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xF]);
  }
  return s;
}

class Vocabulary {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnknownId = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnknownToken = "<unk>";

  Vocabulary() {
    tokens_ = {kPadToken, kUnknownToken};
    counts_ = {0, 0};
  }

  // Tokens with count >= min_frequency, by descending count then
  // lexicographically, get ids from 2 upward.
  static Vocabulary build(const std::vector<ReviewDocument>& corpus, std::size_t min_frequency = 1) {
    std::map<std::string, std::size_t> counts;
    for (const auto& doc : corpus)
      for (const auto& sentence : doc.tokens)
        for (const auto& tok : sentence) ++counts[tok];
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocabulary vocab;
    vocab.min_frequency_ = min_frequency;
    for (const auto& [tok, count] : ranked) {
      if (count < min_frequency) continue;
      vocab.insert(tok, count);
    }
    return vocab;
  }

  std::size_t size() const { return tokens_.size(); }
  std::size_t min_frequency() const { return min_frequency_; }

  int id(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnknownId : it->second;
  }
  bool contains(const std::string& token) const { return ids_.count(token) != 0; }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t count(int id) const { return counts_.at(static_cast<std::size_t>(id)); }

  std::vector<int> encode(const std::vector<std::string>& tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    return ids;
  }

  void encode(ReviewDocument& doc) const {
    doc.token_ids.clear();
    for (const auto& s : doc.tokens) doc.token_ids.push_back(encode(s));
  }

  void encode(std::vector<ReviewDocument>& docs) const {
    for (auto& d : docs) encode(d);
  }

  // token TAB id TAB count, one line per id.
  std::string serialize() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < tokens_.size(); ++i) os << tokens_[i] << '\t' << i << '\t' << counts_[i] << '\n';
    return os.str();
  }

  Digest hash() const { return sha256(serialize()); }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write vocabulary file " + path);
    out << serialize();
  }

  static Vocabulary load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read vocabulary file " + path);
    Vocabulary vocab;
    vocab.tokens_.clear();
    vocab.counts_.clear();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto t1 = line.find('\t');
      const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
      if (t2 == std::string::npos) throw DataError(path + ":" + std::to_string(line_no) + ": expected token\\tid\\tcount");
      const std::string tok = line.substr(0, t1);
      std::size_t id = 0, count = 0;
      try {
        id = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
        count = std::stoull(line.substr(t2 + 1));
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) + ": malformed id or count");
      }
      if (id != vocab.tokens_.size()) throw DataError(path + ":" + std::to_string(line_no) + ": ids must be dense and sorted");
      vocab.tokens_.push_back(tok);
      vocab.counts_.push_back(count);
      if (id >= 2) vocab.ids_[tok] = static_cast<int>(id);
    }
    if (vocab.tokens_.size() < 2 || vocab.tokens_[0] != kPadToken || vocab.tokens_[1] != kUnknownToken) {
      throw DataError(path + ": missing reserved <pad>/<unk> entries");
    }
    return vocab;
  }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_ && counts_ == other.counts_; }

 private:
  void insert(const std::string& tok, std::size_t count) {
    ids_[tok] = static_cast<int>(tokens_.size());
    tokens_.push_back(tok);
    counts_.push_back(count);
  }

  std::vector<std::string> tokens_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, int> ids_;
  std::size_t min_frequency_ = 1;
};

// Raw review text -> token ids per sentence; empty sentences are dropped.
inline std::vector<std::vector<int>> tokenize_and_split(std::string_view raw, const Vocabulary& vocab) {
  std::vector<std::vector<int>> out;
  for (const auto& sentence : text::split_sentences(raw)) {
    auto toks = text::tokenize(sentence);
    if (!toks.empty()) out.push_back(vocab.encode(toks));
  }
  return out;
}

}  // namespace saam
