// Copyright 2026 The StitchVox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stitchvox/stitcher.h"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "stitchvox/util.h"
#include "test_util.h"

namespace stitchvox {
namespace {

const std::vector<std::string> kWords = {"a",     "i",    "like", "apple",
                                         "the",   "cat",  "sat",  "on",
                                         "mat",   "dog",  "ran",  "home",
                                         "quick", "brown"};

class StitcherTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    bank_ = new SpokenVocabBank(test::MockBank(kWords, {"s1", "s2", "s3"}));
  }
  static void TearDownTestSuite() {
    delete bank_;
    bank_ = nullptr;
  }
  static const SpokenVocabBank& bank() { return *bank_; }

  std::string RandomSentence(std::mt19937_64& gen, size_t max_len) {
    std::uniform_int_distribution<size_t> len(1, max_len);
    std::uniform_int_distribution<size_t> pick(0, kWords.size() - 1);
    std::string s;
    for (size_t n = len(gen); n > 0; --n) {
      if (!s.empty()) s += ' ';
      s += kWords[pick(gen)];
      if (gen() % 5 == 0) s += 's';  // fuzzy variant
    }
    return s;
  }

  static SpokenVocabBank* bank_;
};
SpokenVocabBank* StitcherTest::bank_ = nullptr;

TEST_F(StitcherTest, OutputLengthMatchesFoldIdentity) {
  std::mt19937_64 gen(1);
  StitchConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const std::string sentence = RandomSentence(gen, 20);
    const StitchResult r = StitchSentence(sentence, bank(),
                                          SpeakerPolicy::UniformRandom(), cfg, i);
    size_t sum = 0;
    for (const auto& t : r.report.tokens) sum += t.num_samples;
    const size_t k = r.report.tokens.size();
    const size_t fade_n = 240;  // 10 ms at 24 kHz; every snippet is longer
    ASSERT_EQ(r.audio.size(), sum - (k - 1) * fade_n) << sentence;
    ASSERT_EQ(r.report.num_samples, r.audio.size());
  }
}

TEST_F(StitcherTest, AudioEqualsExplicitCrossfadeFold) {
  StitchConfig cfg;
  const StitchResult r = StitchSentence("the quick brown dog", bank(),
                                        SpeakerPolicy::Fixed("s2"), cfg, 5);
  PcmBuffer expected = *bank().GetSnippet("s2", "the");
  for (const char* w : {"quick", "brown", "dog"}) {
    expected = CrossfadeConcat(expected, *bank().GetSnippet("s2", w), 10.0);
  }
  EXPECT_EQ(r.audio, expected);
}

TEST_F(StitcherTest, DegenerateSentenceErrors) {
  StitchConfig cfg;
  try {
    StitchSentence("—  ,", bank(), SpeakerPolicy::UniformRandom(), cfg, 1);
    FAIL() << "expected an error";
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "no stitchable tokens");
  }
  EXPECT_THROW(StitchSentence("", bank(), SpeakerPolicy::UniformRandom(), cfg, 1),
               InvalidArgument);
}

TEST_F(StitcherTest, UnknownFixedSpeakerErrors) {
  EXPECT_THROW(StitchSentence("cat", bank(), SpeakerPolicy::Fixed("s9"),
                              StitchConfig(), 1),
               InvalidArgument);
}

TEST_F(StitcherTest, DeterministicUnderSeed) {
  StitchConfig cfg;
  cfg.distort = true;
  cfg.output_rate_hz = 16000;
  const auto a = StitchSentence("the cats sat on the mat", bank(),
                                SpeakerPolicy::UniformRandom(), cfg, 99);
  const auto b = StitchSentence("the cats sat on the mat", bank(),
                                SpeakerPolicy::UniformRandom(), cfg, 99);
  EXPECT_EQ(a.audio, b.audio);
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(StitchReportToJson(a.report), StitchReportToJson(b.report));
}

TEST_F(StitcherTest, ResolutionsOnToyVocabulary) {
  const auto r = StitchSentence("I like apples xyzzyq", bank(),
                                SpeakerPolicy::Fixed("s1"), StitchConfig(), 3);
  ASSERT_EQ(r.report.tokens.size(), 4u);
  EXPECT_EQ(r.report.tokens[0].raw, "I");
  EXPECT_EQ(r.report.tokens[0].token, "i");
  EXPECT_EQ(r.report.tokens[0].resolution.kind, MatchKind::kExact);
  EXPECT_EQ(r.report.tokens[2].resolution.matched_word, "apple");
  EXPECT_EQ(r.report.tokens[2].resolution.kind, MatchKind::kFuzzy);
  EXPECT_EQ(r.report.tokens[3].resolution.matched_word, "a");
  EXPECT_EQ(r.report.tokens[3].resolution.kind, MatchKind::kFallback);
  EXPECT_EQ(r.report.exact, 2u);
  EXPECT_EQ(r.report.fuzzy, 1u);
  EXPECT_EQ(r.report.fallback, 1u);
}

TEST_F(StitcherTest, OneSpeakerPerUtterance) {
  std::mt19937_64 gen(4);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = StitchSentence(RandomSentence(gen, 10), bank(),
                                  SpeakerPolicy::UniformRandom(), StitchConfig(),
                                  seed);
    for (const auto& t : r.report.tokens) {
      ASSERT_EQ(t.speaker_id, r.report.speaker_id);
    }
  }
}

TEST_F(StitcherTest, SpeakerDrawIsUniform) {
  std::map<std::string, int> counts;
  const int n = 10000;
  for (int seed = 0; seed < n; ++seed) {
    ++counts[ChooseSpeaker(bank(), SpeakerPolicy::UniformRandom(), seed)];
  }
  ASSERT_EQ(counts.size(), 3u);
  for (const auto& [speaker, c] : counts) {
    EXPECT_NEAR(c / static_cast<double>(n), 1.0 / 3.0, 0.03) << speaker;
  }
}

TEST_F(StitcherTest, PerTokenSpeakerMixing) {
  StitchConfig cfg;
  cfg.mix_speakers_per_token = true;
  const std::string sentence = "the cat sat on the mat the dog ran home";
  const auto r = StitchSentence(sentence, bank(), SpeakerPolicy::UniformRandom(),
                                cfg, 12);
  std::set<std::string> seen;
  for (const auto& t : r.report.tokens) seen.insert(t.speaker_id);
  EXPECT_GT(seen.size(), 1u);
  // A fixed policy ignores the flag.
  const auto fixed = StitchSentence(sentence, bank(), SpeakerPolicy::Fixed("s3"),
                                    cfg, 12);
  for (const auto& t : fixed.report.tokens) EXPECT_EQ(t.speaker_id, "s3");
}

TEST_F(StitcherTest, DistortionDrawsWithinRangesAndIsolatedFromSpeaker) {
  StitchConfig plain;
  StitchConfig noisy;
  noisy.distort = true;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = StitchSentence("the quick brown dog", bank(),
                                  SpeakerPolicy::UniformRandom(), plain, seed);
    const auto b = StitchSentence("the quick brown dog", bank(),
                                  SpeakerPolicy::UniformRandom(), noisy, seed);
    EXPECT_EQ(a.report.speaker_id, b.report.speaker_id);
    EXPECT_FALSE(a.report.distortion.has_value());
    ASSERT_TRUE(b.report.distortion.has_value());
    const DistortionParams& d = *b.report.distortion;
    EXPECT_GE(d.tempo, 0.9);
    EXPECT_LT(d.tempo, 1.1);
    EXPECT_GE(d.speed, 0.95);
    EXPECT_LT(d.speed, 1.05);
    EXPECT_GE(d.echo_delay_ms, 50.0);
    EXPECT_LT(d.echo_delay_ms, 150.0);
    EXPECT_GE(d.echo_decay, 0.2);
    EXPECT_LT(d.echo_decay, 0.4);
    // Length follows the chain: tempo, then speed, then echo tail.
    double len = std::round(a.audio.size() / d.tempo);
    len = std::round(len / d.speed);
    len += std::round(d.echo_delay_ms * 24000 / 1000.0);
    EXPECT_NEAR(static_cast<double>(b.audio.size()), len, 2.0);
  }
}

TEST_F(StitcherTest, OutputRateResamplesLast) {
  StitchConfig cfg;
  const auto native = StitchSentence("the cat", bank(), SpeakerPolicy::Fixed("s1"),
                                     cfg, 0);
  cfg.output_rate_hz = 16000;
  const auto low = StitchSentence("the cat", bank(), SpeakerPolicy::Fixed("s1"),
                                  cfg, 0);
  EXPECT_EQ(low.audio.sample_rate_hz(), 16000);
  EXPECT_EQ(low.report.sample_rate_hz, 16000);
  EXPECT_EQ(low.audio, Resample(native.audio, 16000));
}

TEST_F(StitcherTest, ExpandsNumbersWhenAsked) {
  const SpokenVocabBank b = test::MockBank({"a", "two", "cats"}, {"s1"});
  StitchConfig cfg;
  cfg.expand_numbers = true;
  const auto r = StitchSentence("2 cats", b, SpeakerPolicy::Fixed("s1"), cfg, 0);
  ASSERT_EQ(r.report.tokens.size(), 2u);
  EXPECT_EQ(r.report.tokens[0].resolution.kind, MatchKind::kExact);
  EXPECT_EQ(r.report.tokens[0].token, "two");
}

TEST_F(StitcherTest, InvalidConfigRejected) {
  StitchConfig cfg;
  cfg.fade_ms = -1.0;
  EXPECT_THROW(StitchSentence("cat", bank(), SpeakerPolicy::Fixed("s1"), cfg, 0),
               InvalidArgument);
  cfg = StitchConfig();
  cfg.distort_ranges.tempo = {1.2, 1.1};
  EXPECT_THROW(cfg.Validate(), InvalidArgument);
  cfg = StitchConfig();
  cfg.filler = "zebra";
  EXPECT_THROW(StitchSentence("qqqqqq", bank(), SpeakerPolicy::Fixed("s1"), cfg, 0),
               InvalidArgument);
}

TEST_F(StitcherTest, ReportJsonShape) {
  const auto r = StitchSentence("Apples", bank(), SpeakerPolicy::Fixed("s1"),
                                StitchConfig(), 0);
  const std::string json = StitchReportToJson(r.report);
  EXPECT_NE(json.find("\"kind\":\"fuzzy\""), std::string::npos);
  EXPECT_NE(json.find("\"matched_word\":\"apple\""), std::string::npos);
  EXPECT_NE(json.find("\"distortion\":null"), std::string::npos);
}

TEST(TokenizeSentenceTest, DropsEmptyTokens) {
  const auto t = TokenizeSentence("Hello , world!  ...");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0], (std::pair<std::string, std::string>{"Hello", "hello"}));
  EXPECT_EQ(t[1], (std::pair<std::string, std::string>{"world!", "world"}));
}

}  // namespace
}  // namespace stitchvox
