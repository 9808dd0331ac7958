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

#ifndef STITCHVOX_MATCHER_H_
#define STITCHVOX_MATCHER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace stitchvox {

inline constexpr double kDefaultFuzzyThreshold = 0.6;
inline constexpr size_t kDefaultLengthWindow = 3;
inline constexpr std::string_view kDefaultFiller = "a";

// Lowercases ASCII letters and strips leading/trailing punctuation from the
// set . , ! ? ; : " ' ( ) [ ] and the em/en dashes. Interior apostrophes and
// hyphens survive. An empty result means the token should be dropped.
std::string NormalizeToken(std::string_view raw);

// Spells out a run of ASCII digits as English words ("42" -> "forty two").
// Returns an empty vector when `token` is not all digits or is too long.
std::vector<std::string> NumberToWords(std::string_view token);

// Edit distance over Unicode code points.
size_t Levenshtein(std::u32string_view a, std::u32string_view b);

// 1 - lev(a, b) / max(|a|, |b|); 1.0 for two empty strings.
double Similarity(std::string_view a, std::string_view b);

enum class MatchKind { kExact, kFuzzy, kFallback };

std::string_view MatchKindName(MatchKind kind);

struct Resolution {
  MatchKind kind = MatchKind::kFallback;
  std::string matched_word;
  double similarity = 0.0;
  size_t edit_distance = 0;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

struct MatchOptions {
  double threshold = kDefaultFuzzyThreshold;
  size_t length_window = kDefaultLengthWindow;

  friend bool operator==(const MatchOptions&, const MatchOptions&) = default;
};

// Immutable index over a word vocabulary. Resolution is exact lookup first,
// then the most similar word whose length is within the window, then the
// filler word.
class Matcher {
 public:
  Matcher() = default;
  explicit Matcher(const std::vector<std::string>& vocab,
                   MatchOptions options = {});

  bool Contains(std::string_view word) const;
  size_t size() const { return words_.size(); }
  const MatchOptions& options() const { return options_; }

  // `token` must already be normalized and non-empty. Throws
  // InvalidArgument if `filler` is not in the vocabulary.
  Resolution Resolve(std::string_view token, std::string_view filler) const;

 private:
  struct Entry {
    std::string word;
    std::u32string chars;
  };

  MatchOptions options_;
  std::unordered_set<std::string> lookup_;
  std::vector<Entry> words_;
  // by_length_[n] lists indices into words_ of words with n code points.
  std::vector<std::vector<size_t>> by_length_;
};

// Convenience wrapper building a throwaway index.
Resolution Resolve(std::string_view token,
                   const std::vector<std::string>& vocab,
                   std::string_view filler, MatchOptions options = {});

}  // namespace stitchvox

#endif  // STITCHVOX_MATCHER_H_
