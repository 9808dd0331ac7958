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

#include "stitchvox/matcher.h"

#include <algorithm>
#include <array>
#include <limits>

#include "stitchvox/util.h"

namespace stitchvox {

namespace {

bool IsStripped(char32_t c) {
  switch (c) {
    case U'.': case U',': case U'!': case U'?': case U';': case U':':
    case U'"': case U'\'': case U'(': case U')': case U'[': case U']':
    case U'—': case U'–':
      return true;
    default:
      return false;
  }
}

// Levenshtein distance, or max_d + 1 once it is known to exceed max_d.
size_t BoundedLevenshtein(std::u32string_view a, std::u32string_view b,
                          size_t max_d) {
  if (a.size() < b.size()) std::swap(a, b);
  if (a.size() - b.size() > max_d) return max_d + 1;
  std::vector<size_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    size_t row_min = row[0];
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      const size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + cost});
      diag = up;
      row_min = std::min(row_min, row[j]);
    }
    if (row_min > max_d) return max_d + 1;
  }
  return row[b.size()];
}

constexpr std::array<std::string_view, 20> kOnes = {
    "zero",    "one",     "two",       "three",    "four",
    "five",    "six",     "seven",     "eight",    "nine",
    "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
constexpr std::array<std::string_view, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty",
    "ninety"};

void BelowThousand(int n, std::vector<std::string>& out) {
  if (n >= 100) {
    out.emplace_back(kOnes[n / 100]);
    out.emplace_back("hundred");
    n %= 100;
    if (n == 0) return;
  }
  if (n < 20) {
    out.emplace_back(kOnes[n]);
    return;
  }
  out.emplace_back(kTens[n / 10]);
  if (n % 10) out.emplace_back(kOnes[n % 10]);
}

}  // namespace

std::string NormalizeToken(std::string_view raw) {
  std::u32string cps = Utf8ToU32(raw);
  size_t begin = 0;
  size_t end = cps.size();
  while (begin < end && IsStripped(cps[begin])) ++begin;
  while (end > begin && IsStripped(cps[end - 1])) --end;
  std::u32string kept = cps.substr(begin, end - begin);
  for (char32_t& c : kept) {
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
  }
  return U32ToUtf8(kept);
}

std::vector<std::string> NumberToWords(std::string_view token) {
  if (token.empty() || token.size() > 9 ||
      !std::all_of(token.begin(), token.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return {};
  }
  int n = std::stoi(std::string(token));
  std::vector<std::string> out;
  if (n == 0) {
    out.emplace_back("zero");
    return out;
  }
  const int millions = n / 1000000;
  const int thousands = (n / 1000) % 1000;
  const int rest = n % 1000;
  if (millions) {
    BelowThousand(millions, out);
    out.emplace_back("million");
  }
  if (thousands) {
    BelowThousand(thousands, out);
    out.emplace_back("thousand");
  }
  if (rest) BelowThousand(rest, out);
  return out;
}

size_t Levenshtein(std::u32string_view a, std::u32string_view b) {
  return BoundedLevenshtein(a, b, std::numeric_limits<size_t>::max() - 1);
}

double Similarity(std::string_view a, std::string_view b) {
  const std::u32string ua = Utf8ToU32(a);
  const std::u32string ub = Utf8ToU32(b);
  const size_t m = std::max(ua.size(), ub.size());
  if (m == 0) return 1.0;
  return 1.0 - static_cast<double>(Levenshtein(ua, ub)) / m;
}

std::string_view MatchKindName(MatchKind kind) {
  switch (kind) {
    case MatchKind::kExact: return "exact";
    case MatchKind::kFuzzy: return "fuzzy";
    case MatchKind::kFallback: return "fallback";
  }
  return "unknown";
}

Matcher::Matcher(const std::vector<std::string>& vocab, MatchOptions options)
    : options_(options) {
  if (!(options_.threshold >= 0.0 && options_.threshold <= 1.0)) {
    throw InvalidArgument("fuzzy threshold must be in [0, 1]");
  }
  std::vector<std::string> sorted = vocab;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  words_.reserve(sorted.size());
  for (auto& w : sorted) {
    Entry e{w, Utf8ToU32(w)};
    const size_t len = e.chars.size();
    if (by_length_.size() <= len) by_length_.resize(len + 1);
    by_length_[len].push_back(words_.size());
    lookup_.insert(w);
    words_.push_back(std::move(e));
  }
}

bool Matcher::Contains(std::string_view word) const {
  return lookup_.count(std::string(word)) > 0;
}

Resolution Matcher::Resolve(std::string_view token,
                            std::string_view filler) const {
  if (!Contains(filler)) {
    throw InvalidArgument("filler word '" + std::string(filler) +
                          "' is not in the vocabulary");
  }
  if (token.empty()) throw InvalidArgument("cannot resolve an empty token");
  if (Contains(token)) {
    return {MatchKind::kExact, std::string(token), 1.0, 0};
  }

  const std::u32string query = Utf8ToU32(token);
  const size_t qlen = query.size();
  const size_t lo = qlen > options_.length_window ? qlen - options_.length_window : 0;
  const size_t hi = std::min(qlen + options_.length_window,
                             by_length_.empty() ? 0 : by_length_.size() - 1);

  const Entry* best = nullptr;
  double best_sim = -1.0;
  size_t best_d = 0;
  for (size_t len = lo; len <= hi && !by_length_.empty(); ++len) {
    for (size_t idx : by_length_[len]) {
      const Entry& cand = words_[idx];
      const size_t m = std::max(qlen, cand.chars.size());
      if (m == 0) continue;
      // Distances above this cannot reach the threshold.
      const auto max_d = static_cast<size_t>(
          (1.0 - options_.threshold) * static_cast<double>(m) + 1e-9);
      const size_t d = BoundedLevenshtein(query, cand.chars, max_d);
      if (d > max_d) continue;
      const double sim = 1.0 - static_cast<double>(d) / m;
      const bool better =
          best == nullptr || sim > best_sim ||
          (sim == best_sim &&
           (d < best_d || (d == best_d && cand.word < best->word)));
      if (better) {
        best = &cand;
        best_sim = sim;
        best_d = d;
      }
    }
  }
  if (best != nullptr && best_sim >= options_.threshold - 1e-12) {
    return {MatchKind::kFuzzy, best->word, best_sim, best_d};
  }
  return {MatchKind::kFallback, std::string(filler), 0.0, 0};
}

Resolution Resolve(std::string_view token,
                   const std::vector<std::string>& vocab,
                   std::string_view filler, MatchOptions options) {
  return Matcher(vocab, options).Resolve(token, filler);
}

}  // namespace stitchvox
