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

#ifndef STITCHVOX_CODE_SWITCH_H_
#define STITCHVOX_CODE_SWITCH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stitchvox/stitcher.h"
#include "stitchvox/vocab_bank.h"

namespace stitchvox {

// Bilingual word dictionary, source word -> target word, both normalized.
class CsDictionary {
 public:
  CsDictionary(std::string source_lang, std::string target_lang)
      : source_lang_(std::move(source_lang)),
        target_lang_(std::move(target_lang)) {}

  // TSV: source<TAB>target per line, UTF-8. Blank lines and lines starting
  // with '#' are skipped. Duplicate keys keep the first occurrence.
  static CsDictionary LoadTsv(const std::filesystem::path& path,
                              std::string source_lang = "src",
                              std::string target_lang = "tgt");

  // Normalizes both sides; returns false when the key was already present.
  bool Add(std::string_view source, std::string_view target);

  // nullptr when `word` is not a key.
  const std::string* Lookup(std::string_view word) const;

  const std::string& source_lang() const { return source_lang_; }
  const std::string& target_lang() const { return target_lang_; }
  size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::string source_lang_;
  std::string target_lang_;
  std::unordered_map<std::string, std::string> entries_;
};

struct CsConfig {
  double p = 0.35;  // probability that a sentence is code-switched
  size_t n = 2;     // positions selected for switching
  // Reproduces the literal pseudo-code draw (standard normal q, switch when
  // q > p) instead of the Bernoulli(p) semantics.
  bool literal_normal_draw = false;

  void Validate() const;
};

struct CsReport {
  bool switched = false;
  double draw = 0.0;
  std::vector<size_t> selected_indices;  // sorted
  std::vector<size_t> replaced_indices;  // sorted, subset of selected

  friend bool operator==(const CsReport&, const CsReport&) = default;
};

struct TaggedToken {
  std::string text;
  bool is_target = false;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

struct CodeSwitchResult {
  std::vector<TaggedToken> tokens;
  CsReport report;
};

// With probability p, selects min(n, |tokens|) distinct positions uniformly
// without replacement and replaces those that are dictionary keys.
CodeSwitchResult CodeSwitchTokens(std::span<const std::string> tokens,
                                  const CsDictionary& dict,
                                  const CsConfig& cfg, uint64_t seed);

struct CsStitchResult {
  PcmBuffer audio;
  StitchReport report;
  CsReport cs_report;
};

// Code-switches a sentence and stitches it across a source-language and a
// target-language bank. Construction validates that both banks share a rate
// and that the target bank indexes every dictionary value. The banks and
// dictionary must outlive the stitcher.
class CsStitcher {
 public:
  CsStitcher(const SpokenVocabBank& source, const SpokenVocabBank& target,
             const CsDictionary& dict);

  CsStitchResult Stitch(std::string_view sentence, const CsConfig& cs_cfg,
                        const StitchConfig& stitch_cfg,
                        const SpeakerPolicy& policy, uint64_t seed) const;

  const CsDictionary& dictionary() const { return *dict_; }

 private:
  const SpokenVocabBank* source_;
  const SpokenVocabBank* target_;
  const CsDictionary* dict_;
};

// One-shot form keyed by language tag; `banks` must contain the
// dictionary's source and target languages.
CsStitchResult CsStitch(std::string_view sentence,
                        const std::map<std::string, const SpokenVocabBank*>& banks,
                        const CsDictionary& dict, const CsConfig& cs_cfg,
                        const StitchConfig& stitch_cfg,
                        const SpeakerPolicy& policy, uint64_t seed);

}  // namespace stitchvox

#endif  // STITCHVOX_CODE_SWITCH_H_
