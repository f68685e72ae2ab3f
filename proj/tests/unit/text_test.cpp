#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "saam/text/batch.hpp"
#include "saam/text/corpus_io.hpp"
#include "saam/text/keyword_labels.hpp"
#include "saam/text/split.hpp"
#include "saam/text/synthetic.hpp"
#include "saam/text/tokenizer.hpp"
#include "saam/text/vocabulary.hpp"

namespace saam {
namespace {

using Strings = std::vector<std::string>;

ReviewDocument doc_from(const std::string& id, const Strings& sentences, std::size_t aspects = 2, double rating = 3) {
  ReviewDocument d;
  d.doc_id = id;
  set_sentences(d, sentences);
  d.overall_rating = rating;
  d.aspect_ratings.assign(aspects, rating);
  return d;
}

SyntheticSpec synth(std::size_t aspects, std::size_t docs, std::uint64_t seed, std::size_t per_aspect = 1,
                    double shared = 0.0) {
  SyntheticSpec s;
  s.num_aspects = aspects;
  s.docs = docs;
  s.seed = seed;
  s.sentences_per_aspect = per_aspect;
  s.shared_keyword_fraction = shared;
  return s;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("saam_text_test_" + name);
}

// ---- tokenizer ------------------------------------------------------------

TEST(Tokenizer, SplitsOnTerminalPunctuation) {
  EXPECT_EQ(text::split_sentences("Good room. Bad food!"), (Strings{"Good room.", "Bad food!"}));
  EXPECT_EQ(text::split_sentences("Really?! Yes."), (Strings{"Really?!", "Yes."}));
  EXPECT_EQ(text::split_sentences("3.5 stars overall"), (Strings{"3.5 stars overall"}));
  EXPECT_TRUE(text::split_sentences("").empty());
  EXPECT_TRUE(text::split_sentences("   \n ").empty());
}

TEST(Tokenizer, LowercasesAndDropsPunctuation) {
  EXPECT_EQ(text::tokenize("Good room."), (Strings{"good", "room"}));
  EXPECT_EQ(text::tokenize("Don't   STOP, ok"), (Strings{"don't", "stop", "ok"}));
  EXPECT_EQ(text::tokenize("'quoted' word"), (Strings{"quoted", "word"}));
  EXPECT_TRUE(text::tokenize("...!!").empty());
}

TEST(Tokenizer, KeepsLeadingPrefixMarker) {
  EXPECT_EQ(text::tokenize("A: pours amber."), (Strings{"a:", "pours", "amber"}));
  EXPECT_EQ(text::tokenize("  t:bitter"), (Strings{"t:", "bitter"}));
  // Only at the start of the sentence.
  EXPECT_EQ(text::tokenize("it is A: ok"), (Strings{"it", "is", "a", "ok"}));
}

TEST(TokenizeAndSplit, Examples) {
  ReviewDocument d = doc_from("x", {"good room", "bad food", "a: pours amber"});
  const auto vocab = Vocabulary::build({d});

  const auto two = tokenize_and_split("Good room. Bad food!", vocab);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], (std::vector<int>{vocab.id("good"), vocab.id("room")}));
  EXPECT_EQ(two[1], (std::vector<int>{vocab.id("bad"), vocab.id("food")}));

  EXPECT_TRUE(tokenize_and_split("", vocab).empty());

  const auto prefixed = tokenize_and_split("A: pours amber.", vocab);
  ASSERT_EQ(prefixed.size(), 1u);
  ASSERT_FALSE(prefixed[0].empty());
  EXPECT_EQ(vocab.token(prefixed[0][0]), "a:");
}

TEST(TokenizeAndSplit, UnknownTokensMapToOneAndEmptySentencesDrop) {
  const auto vocab = Vocabulary::build({doc_from("x", {"good"})});
  const auto out = tokenize_and_split("Good zebra. !!! ...", vocab);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (std::vector<int>{vocab.id("good"), Vocabulary::kUnknownId}));
  for (const auto& s : out)
    for (int id : s) EXPECT_NE(id, Vocabulary::kPadId);
}

// ---- vocabulary -----------------------------------------------------------

TEST(Vocabulary, FrequencyOrderedIds) {
  const std::vector<ReviewDocument> corpus{doc_from("x", {"a a b"})};
  const auto v = Vocabulary::build(corpus, 1);
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.id("a"), 2);
  EXPECT_EQ(v.id("b"), 3);
  EXPECT_EQ(v.token(0), "<pad>");
  EXPECT_EQ(v.token(1), "<unk>");
}

TEST(Vocabulary, MinFrequencyMapsRareTokensToUnknown) {
  const std::vector<ReviewDocument> corpus{doc_from("x", {"a a b"})};
  const auto v = Vocabulary::build(corpus, 2);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.id("a"), 2);
  EXPECT_FALSE(v.contains("b"));
  EXPECT_EQ(v.id("b"), Vocabulary::kUnknownId);
}

TEST(Vocabulary, TiesBrokenLexicographically) {
  const auto v = Vocabulary::build({doc_from("x", {"zeta alpha mid", "mid"})});
  EXPECT_EQ(v.id("mid"), 2);
  EXPECT_EQ(v.id("alpha"), 3);
  EXPECT_EQ(v.id("zeta"), 4);
}

TEST(Vocabulary, DeterministicRebuild) {
  const std::vector<ReviewDocument> corpus{doc_from("x", {"q w e r", "w e", "e"}), doc_from("y", {"r r q"})};
  const auto a = Vocabulary::build(corpus);
  const auto b = Vocabulary::build(corpus);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.serialize(), b.serialize());
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(Vocabulary, SaveLoadRoundTrip) {
  const auto v = Vocabulary::build({doc_from("x", {"one two two three three three"})});
  const auto path = temp_path("vocab.tsv");
  v.save(path.string());
  const auto back = Vocabulary::load(path.string());
  EXPECT_EQ(back, v);
  EXPECT_EQ(back.hash(), v.hash());
  EXPECT_EQ(back.id("three"), 2);
  std::filesystem::remove(path);
}

TEST(Vocabulary, HashChangesWithContent) {
  const auto a = Vocabulary::build({doc_from("x", {"one two"})});
  const auto b = Vocabulary::build({doc_from("x", {"one three"})});
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(digest_hex(a.hash()).size(), 64u);
}

TEST(Vocabulary, KnownSha256) {
  EXPECT_EQ(digest_hex(sha256("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Vocabulary, LoadRejectsMalformedFile) {
  const auto path = temp_path("bad_vocab.tsv");
  {
    std::ofstream out(path);
    out << "<pad>\t0\t0\n<unk>\t1\t0\nfoo\t5\t2\n";
  }
  EXPECT_THROW(Vocabulary::load(path.string()), DataError);
  {
    std::ofstream out(path);
    out << "foo\t0\t1\n";
  }
  EXPECT_THROW(Vocabulary::load(path.string()), DataError);
  std::filesystem::remove(path);
  EXPECT_THROW(Vocabulary::load(path.string()), DataError);
}

// ---- split ----------------------------------------------------------------

std::vector<ReviewDocument> qualifying_docs(std::size_t n, std::size_t sentences = 4) {
  std::vector<ReviewDocument> docs;
  for (std::size_t i = 0; i < n; ++i) {
    Strings s;
    for (std::size_t k = 0; k < sentences; ++k) s.push_back("word" + std::to_string(k));
    docs.push_back(doc_from("d" + std::to_string(i), s));
  }
  return docs;
}

TEST(Split, SeventyFiveTwentyFiveWithDev) {
  SplitOptions opt;
  opt.dev_size = 10;
  const auto s = split_corpus(qualifying_docs(100), 3, opt);
  EXPECT_EQ(s.train.size(), 65u);
  EXPECT_EQ(s.dev.size(), 10u);
  EXPECT_EQ(s.test.size(), 25u);
}

TEST(Split, DefaultDevSizeIsTenPercentOfTrain) {
  const auto s = split_corpus(qualifying_docs(200), 3);
  EXPECT_EQ(s.dev.size(), 15u);
  EXPECT_EQ(s.train.size(), 135u);
  EXPECT_EQ(s.test.size(), 50u);
}

TEST(Split, ThreeSentenceDocumentsExcluded) {
  auto docs = qualifying_docs(40);
  auto short_docs = qualifying_docs(5, 3);
  for (auto& d : short_docs) d.doc_id = "short_" + d.doc_id;
  docs.insert(docs.end(), short_docs.begin(), short_docs.end());
  SplitOptions opt;
  opt.dev_size = 3;
  const auto s = split_corpus(docs, 1, opt);
  EXPECT_EQ(s.dropped_short, 5u);
  for (const auto* part : {&s.train, &s.dev, &s.test})
    for (const auto& d : *part) EXPECT_EQ(d.doc_id.rfind("short_", 0), std::string::npos);
}

TEST(Split, UnratedAspectsExcluded) {
  auto docs = qualifying_docs(40);
  docs[7].aspect_ratings[1] = std::nan("");
  SplitOptions opt;
  opt.dev_size = 3;
  const auto s = split_corpus(docs, 1, opt);
  EXPECT_EQ(s.dropped_unrated, 1u);
  EXPECT_EQ(s.train.size() + s.dev.size() + s.test.size(), 39u);
}

TEST(Split, DeterministicBySeed) {
  const auto docs = qualifying_docs(80);
  auto ids = [](const std::vector<ReviewDocument>& v) {
    Strings out;
    for (const auto& d : v) out.push_back(d.doc_id);
    return out;
  };
  const auto a = split_corpus(docs, 11);
  const auto b = split_corpus(docs, 11);
  const auto c = split_corpus(docs, 12);
  EXPECT_EQ(ids(a.train), ids(b.train));
  EXPECT_EQ(ids(a.dev), ids(b.dev));
  EXPECT_EQ(ids(a.test), ids(b.test));
  EXPECT_NE(ids(a.train), ids(c.train));
}

TEST(Split, PartitionsFilteredCorpus) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    auto docs = qualifying_docs(57);
    docs[3] = doc_from("tiny", {"one", "two"});
    const auto s = split_corpus(docs, seed);
    std::multiset<std::string> seen;
    for (const auto* part : {&s.train, &s.dev, &s.test})
      for (const auto& d : *part) seen.insert(d.doc_id);
    std::multiset<std::string> expected;
    for (const auto& d : docs)
      if (d.doc_id != "tiny") expected.insert(d.doc_id);
    EXPECT_EQ(seen, expected) << "seed " << seed;
  }
}

TEST(Split, InsufficientDocumentsIsAnError) {
  SplitOptions opt;
  opt.dev_size = 10;
  EXPECT_THROW(split_corpus(qualifying_docs(12), 1, opt), DataError);
  EXPECT_THROW(split_corpus(qualifying_docs(10, 2), 1), DataError);
}

// ---- keyword labels -------------------------------------------------------

std::string label_of(const std::string& sentence) {
  ReviewDocument d;
  set_sentences(d, {sentence});
  const auto labels = keyword_label_sentences(d, "beer");
  return labels.empty() ? kUnlabeled : labels.front();
}

TEST(KeywordLabels, Examples) {
  EXPECT_EQ(label_of("A: pours amber"), "Appearance");
  EXPECT_EQ(label_of("S: citrus nose"), "Aroma");
  EXPECT_EQ(label_of("Great beer overall"), kUnlabeled);
  EXPECT_EQ(label_of("m: creamy"), "Palate");
  EXPECT_EQ(label_of("T: bitter"), "Taste");
}

TEST(KeywordLabels, AlignedWithSentences) {
  ReviewDocument d;
  set_sentences(d, {"A: hazy", "nice", "T: sweet", "x: odd"});
  EXPECT_EQ(keyword_label_sentences(d), (Strings{"Appearance", kUnlabeled, "Taste", kUnlabeled}));
}

TEST(KeywordLabels, DependsOnlyOnFirstToken) {
  for (const std::string first : {"a:", "s:", "m:", "t:", "x:", "great", "a"}) {
    ReviewDocument d1, d2;
    d1.tokens = {{first, "pours", "amber"}};
    d2.tokens = {{first, "t:", "completely", "different", "words"}};
    EXPECT_EQ(keyword_label_sentences(d1), keyword_label_sentences(d2)) << first;
    EXPECT_EQ(keyword_label_sentences(d1).front(), keyword_label_for_token(first, "beer"));
  }
}

TEST(KeywordLabels, UnknownSchemeRejected) {
  ReviewDocument d;
  set_sentences(d, {"A: x"});
  EXPECT_THROW(keyword_label_sentences(d, "wine"), ConfigError);
}

TEST(KeywordLabels, GoldenFixture) {
  std::ifstream in(std::string(SAAM_TEST_DATA_DIR) + "/beer_keyword_golden.tsv");
  ASSERT_TRUE(in) << "missing fixture";
  std::string line;
  std::size_t cases = 0, correct = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.rfind('\t');
    ASSERT_NE(tab, std::string::npos) << line;
    const auto got = label_of(line.substr(0, tab));
    const auto want = line.substr(tab + 1);
    EXPECT_EQ(got, want) << line;
    ++cases;
    correct += got == want;
  }
  EXPECT_GE(cases, 15u);
  EXPECT_EQ(correct, cases);
}

// ---- batching -------------------------------------------------------------

TEST(Batch, MasksAndPadding) {
  auto d = doc_from("x", {"one two three", "four"});
  const auto vocab = Vocabulary::build({d});
  vocab.encode(d);
  const auto b = make_batch({d}, 4, 5);
  EXPECT_EQ(b.sentence_mask, (std::vector<std::uint8_t>{1, 1, 0, 0}));
  const auto slots = b.document(0);
  const auto m0 = slots.sentence_token_mask(0);
  EXPECT_EQ(std::vector<std::uint8_t>(m0.begin(), m0.end()), (std::vector<std::uint8_t>{1, 1, 1, 0, 0}));
  EXPECT_EQ(slots.real_sentences(), 2u);
}

TEST(Batch, TruncatesSentencesAndTokens) {
  auto d = doc_from("x", {"s0", "s1", "s2", "s3", "s4", "s5 a b c d e f g"});
  d.sentence_texts.clear();
  auto long_doc = doc_from("y", {"a b c d e f g"});
  const auto vocab = Vocabulary::build({d, long_doc});
  vocab.encode(d);
  vocab.encode(long_doc);
  const auto b = make_batch({d}, 4, 3);
  EXPECT_EQ(b.document(0).real_sentences(), 4u);
  for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(b.document(0).sentence_ids(s)[0], vocab.id("s" + std::to_string(s)));
  const auto lb = make_batch({long_doc}, 2, 3);
  const auto ids = lb.document(0).sentence_ids(0);
  EXPECT_EQ(std::vector<int>(ids.begin(), ids.end()), (std::vector<int>{vocab.id("a"), vocab.id("b"), vocab.id("c")}));
}

TEST(Batch, MaskZeroIffPadId) {
  auto docs = generate_synthetic_corpus(synth(3, 20, 5, 2)).docs;
  const auto vocab = Vocabulary::build(docs);
  vocab.encode(docs);
  for (std::size_t t_max : {1u, 2u, 4u, 9u}) {
    const auto b = make_batch(docs, 5, t_max);
    for (std::size_t i = 0; i < b.token_ids.size(); ++i) {
      EXPECT_EQ(b.token_mask[i] == 0, b.token_ids[i] == Vocabulary::kPadId) << i;
    }
    for (std::size_t k = 0; k < docs.size(); ++k) {
      EXPECT_EQ(b.document(k).real_sentences(), std::min<std::size_t>(docs[k].sentence_count(), 5));
    }
  }
}

TEST(Batch, CarriesTargets) {
  auto d = doc_from("x", {"a"}, 3, 4);
  d.aspect_ratings = {1, 2, 5};
  Vocabulary().encode(d);
  const auto b = make_batch({d}, 1, 1);
  EXPECT_EQ(b.overall, (std::vector<double>{4}));
  const auto t = b.aspect_targets(0);
  EXPECT_EQ(std::vector<double>(t.begin(), t.end()), (std::vector<double>{1, 2, 5}));
}

TEST(Batch, Errors) {
  auto d = doc_from("x", {"a"});
  EXPECT_THROW(make_batch({d}, 0, 3), ConfigError);
  EXPECT_THROW(make_batch({d}, 2, 3), DataError);  // not encoded
}

// ---- synthetic corpus -----------------------------------------------------

TEST(Synthetic, OneSentencePerAspect) {
  const auto c = generate_synthetic_corpus(synth(2, 30, 9));
  ASSERT_EQ(c.docs.size(), 30u);
  for (const auto& d : c.docs) {
    ASSERT_EQ(d.sentence_count(), 2u);
    ASSERT_EQ(d.sentence_labels.size(), 2u);
    EXPECT_EQ(std::set<std::string>(d.sentence_labels.begin(), d.sentence_labels.end()),
              (std::set<std::string>{"Aspect1", "Aspect2"}));
  }
}

TEST(Synthetic, OverallIsRoundedMean) {
  const auto c = generate_synthetic_corpus(synth(2, 200, 4));
  bool saw_five_one = false;
  for (const auto& d : c.docs) {
    double sum = 0;
    for (double r : d.aspect_ratings) sum += r;
    EXPECT_EQ(d.overall_rating, std::round(sum / 2.0));
    if ((d.aspect_ratings[0] == 5 && d.aspect_ratings[1] == 1) || (d.aspect_ratings[0] == 1 && d.aspect_ratings[1] == 5)) {
      saw_five_one = true;
      EXPECT_EQ(d.overall_rating, 3);
    }
  }
  EXPECT_TRUE(saw_five_one);
}

TEST(Synthetic, ByteIdenticalBySeed) {
  SyntheticSpec spec = synth(3, 50, 77, 1, 0.2);
  const auto a = generate_synthetic_corpus(spec);
  const auto b = generate_synthetic_corpus(spec);
  EXPECT_EQ(serialize_corpus(a.docs, a.aspects), serialize_corpus(b.docs, b.aspects));
  spec.seed = 78;
  const auto c = generate_synthetic_corpus(spec);
  EXPECT_NE(serialize_corpus(a.docs, a.aspects), serialize_corpus(c.docs, c.aspects));
}

// The sentiment token in each sentence encodes the rating of that sentence's aspect.
TEST(Synthetic, SentimentTokenMatchesAspectRating) {
  const auto c = generate_synthetic_corpus(synth(4, 100, 42, 2));
  for (const auto& d : c.docs) {
    for (std::size_t s = 0; s < d.sentence_count(); ++s) {
      const std::size_t j = c.aspects.index_of(d.sentence_labels[s]);
      int found = 0;
      for (const auto& tok : d.tokens[s]) {
        if (tok.rfind("sent_", 0) != 0) continue;
        ++found;
        const int r = std::stoi(tok.substr(5, tok.find('_', 5) - 5));
        EXPECT_EQ(r, d.aspect_ratings[j]) << d.doc_id;
      }
      EXPECT_EQ(found, 1);
      for (const auto& tok : d.tokens[s]) {
        if (tok.rfind("kw", 0) == 0) {
          EXPECT_EQ(tok.substr(2, tok.find('_') - 2), std::to_string(j + 1));
        }
      }
    }
  }
}

TEST(Synthetic, OverlappingVocabulariesRejected) {
  SyntheticSpec spec;
  spec.aspect_vocabularies = {{"room", "bed"}, {"staff", "bed"}};
  EXPECT_THROW(generate_synthetic_corpus(spec), ConfigError);
}

// ---- corpus io ------------------------------------------------------------

TEST(CorpusIo, ReadsTextAndSentenceRecords) {
  std::istringstream in(
      R"({"doc_id":"a","text":"Nice room. Rude staff!","overall":3,"aspects":{"Room":5,"Service":1}})"
      "\n\n"
      R"({"doc_id":"b","sentences":["x y","z"],"overall":4,"aspects":{"Service":2},"sentence_labels":["Room","none"]})"
      "\n");
  const auto c = read_corpus_stream(in);
  EXPECT_EQ(c.aspects.names(), (Strings{"Room", "Service"}));
  ASSERT_EQ(c.docs.size(), 2u);
  EXPECT_EQ(c.docs[0].tokens, (std::vector<Strings>{{"nice", "room"}, {"rude", "staff"}}));
  EXPECT_EQ(c.docs[0].aspect_ratings, (std::vector<double>{5, 1}));
  EXPECT_TRUE(std::isnan(c.docs[1].aspect_ratings[0]));
  EXPECT_FALSE(c.docs[1].all_aspects_rated());
  EXPECT_EQ(c.docs[1].sentence_labels, (Strings{"Room", "none"}));
}

TEST(CorpusIo, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_corpus_stream(in, AspectSet({"A"}));
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string good = R"({"doc_id":"a","text":"x.","overall":3})";
  EXPECT_NE(message(good + "\n{not json\n").find("line 2"), std::string::npos);
  EXPECT_NE(message(good + "\n" + good + "\n" + R"({"text":"x.","overall":3})").find("line 3"), std::string::npos);
  EXPECT_NE(message(R"({"doc_id":"a","text":"x.","overall":"high"})").find("line 1"), std::string::npos);
  EXPECT_NE(message(R"({"doc_id":"a","sentences":["x"],"overall":3,"sentence_labels":["a","b"]})").find("line 1"),
            std::string::npos);
}

TEST(CorpusIo, RoundTrip) {
  const auto c = generate_synthetic_corpus(synth(2, 10, 3));
  std::istringstream in(serialize_corpus(c.docs, c.aspects));
  const auto back = read_corpus_stream(in);
  EXPECT_EQ(back.aspects, c.aspects);
  ASSERT_EQ(back.docs.size(), c.docs.size());
  for (std::size_t i = 0; i < c.docs.size(); ++i) {
    EXPECT_EQ(back.docs[i].tokens, c.docs[i].tokens);
    EXPECT_EQ(back.docs[i].sentence_labels, c.docs[i].sentence_labels);
    EXPECT_EQ(back.docs[i].aspect_ratings, c.docs[i].aspect_ratings);
  }
}

TEST(CorpusIo, MissingFile) {
  EXPECT_THROW(read_corpus("/nonexistent/corpus.jsonl"), DataError);
}

}  // namespace
}  // namespace saam
